"""Command line front end: grep-like search, a benchmark harness, and a
self-test runner.

Exit codes follow grep conventions: 0 when at least one match was found,
1 when none was, and 2 on any error. Reported positions are 1-based end
positions by default; ``--start-offsets`` switches to 0-based starts.
"""

from __future__ import annotations

import json
import logging
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .mp import MpAutomaton, naive_scan, search_baseline
from .nextfn import choose_r, get_table
from .packed import ByteCodec, byte_codec, custom_codec, dna_codec, pack
from .report import BenchRow, format_bench_csv, render_bench_figure, write_bench_csv
from .search import largest_feasible_r, preprocess, search
from .verify import SUITES, worked_example

logger = logging.getLogger(__name__)


def _load_codec(spec: str, keep_newlines: bool) -> ByteCodec:
    if spec == "byte":
        return byte_codec()
    if spec == "dna":
        return dna_codec(strip_newlines=not keep_newlines)
    path = Path(spec)
    if not path.exists():
        raise click.UsageError(
            f"--alphabet must be 'byte', 'dna', or a mapping file; {spec!r} not found"
        )
    doc = json.loads(path.read_text())
    sigma = doc["sigma"]
    mapping = {}
    for ch, code in doc["codes"].items():
        raw = ch.encode("utf-8") if isinstance(ch, str) else bytes([int(ch)])
        if len(raw) != 1:
            raise click.UsageError(f"mapping key {ch!r} is not a single byte")
        mapping[raw[0]] = int(code)
    return custom_codec(mapping, sigma, name=path.stem)


def _validate_r(r: int | None) -> int | None:
    if r is not None and (r < 2 or r % 2):
        raise click.UsageError(f"--r must be even and >= 2, got {r}")
    return r


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Exact matching on bit-packed text."""
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")


@main.command("search")
@click.argument("pattern")
@click.argument("text_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--alphabet", default="byte", show_default=True,
              help="'byte', 'dna', or a JSON mapping file.")
@click.option("--budget-log2", default=22, show_default=True,
              help="Lookup table budget as a power of two of entries.")
@click.option("--r", "r_override", type=int, default=None,
              help="Force the segment span (even, >= 2).")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
@click.option("--start-offsets", is_flag=True,
              help="Report 0-based start offsets instead of 1-based end positions.")
@click.option("--verify", is_flag=True,
              help="Cross-check against the brute-force scan and fail loudly on mismatch.")
@click.option("--table-cache", type=click.Path(path_type=Path), default=None,
              help="Load/store the lookup table at this path.")
@click.option("--pattern-file", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Read the pattern bytes from a file instead.")
@click.option("--keep-newlines", is_flag=True,
              help="Do not strip line breaks in dna mode.")
def cmd_search(pattern, text_file, alphabet, budget_log2, r_override, fmt,
               start_offsets, verify, table_cache, pattern_file, keep_newlines) -> None:
    """Report every position where PATTERN occurs in TEXT_FILE."""
    try:
        codec = _load_codec(alphabet, keep_newlines)
        r_override = _validate_r(r_override)
        pattern_bytes = (
            pattern_file.read_bytes() if pattern_file is not None else pattern.encode("utf-8")
        )
        t0 = time.perf_counter()
        pattern_codes = codec.encode(pattern_bytes)
        if pattern_codes.size == 0:
            raise ValueError("pattern is empty after alphabet mapping")
        p = pack(pattern_codes, codec.alphabet)
        text = codec.pack(text_file.read_bytes())
        t_pack = time.perf_counter() - t0

        t0 = time.perf_counter()
        pp = preprocess(p, t_budget=1 << budget_log2, r=r_override)
        if table_cache is not None and table_cache.exists():
            pp.table.load(table_cache)
        t_pre = time.perf_counter() - t0

        t0 = time.perf_counter()
        outcome = search(pp, text)
        t_search = time.perf_counter() - t0

        if verify:
            expected = naive_scan(p, text)
            if outcome.end_positions != expected:
                raise RuntimeError(
                    f"verification failed: packed search found {len(outcome.end_positions)} "
                    f"matches, brute force found {len(expected)}"
                )
        if table_cache is not None:
            pp.table.save(table_cache)

        m = len(p)
        positions = (
            [end - m for end in outcome.end_positions] if start_offsets
            else outcome.end_positions
        )
        if fmt == "json":
            st = outcome.stats
            doc = {
                "matches": positions,
                "stats": {
                    "N_hforward": st.n_hforward,
                    "N_hfail": st.n_hfail,
                    "N_accept": st.n_accept,
                    "iterations": outcome.iterations,
                    "r": pp.r,
                    "sigma": codec.alphabet.sigma,
                },
                "timings": {
                    "pack_seconds": t_pack,
                    "preprocess_seconds": t_pre,
                    "search_seconds": t_search,
                },
            }
            click.echo(json.dumps(doc, indent=2))
        else:
            for pos in positions:
                click.echo(str(pos))
    except click.UsageError:
        raise
    except Exception as exc:  # noqa: BLE001 - single reporting point, exit code 2
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    sys.exit(0 if positions else 1)


def _generate(generator: str, sigma: int, n: int, m: int, seed: int):
    rng = np.random.default_rng(seed)
    dtype = np.uint8 if sigma <= 256 else np.uint16
    if generator == "all-equal":
        return np.zeros(m, dtype=dtype), np.zeros(n, dtype=dtype)
    if generator == "periodic":
        p = rng.integers(0, sigma, m).astype(dtype)
        reps = n // m + 1
        return p, np.tile(p, reps)[:n]
    p_or_t = rng.integers(0, sigma, n).astype(dtype)
    at = int(rng.integers(0, n - m + 1))
    return p_or_t[at : at + m].copy(), p_or_t


@main.command("bench")
@click.option("--sigma", default=4, show_default=True)
@click.option("--n", default=1_000_000, show_default=True)
@click.option("--m", default=32, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--trials", default=3, show_default=True)
@click.option("--generator", type=click.Choice(["random", "periodic", "all-equal"]),
              default="random", show_default=True)
@click.option("--budget-log2", default=22, show_default=True)
@click.option("--r", "r_override", type=int, default=None,
              help="Force the segment span (even, >= 2).")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="CSV output path (stdout when omitted).")
@click.option("--figure/--no-figure", default=True, show_default=True,
              help="Render a PNG next to the CSV (requires --out).")
def cmd_bench(sigma, n, m, seed, trials, generator, budget_log2, r_override, out, figure):
    """Time the packed engine against the scanning baselines.

    Per trial all engines must report the same match count; a mismatch
    aborts with the reproduction seed.
    """
    try:
        if not 1 <= m <= n:
            raise ValueError(f"need 1 <= m <= n, got m={m} n={n}")
        r_override = _validate_r(r_override)
        from .packed import Alphabet

        alpha = Alphabet(sigma)
        rows: list[BenchRow] = []
        for trial in range(trials):
            trial_seed = seed + trial
            p_codes, t_codes = _generate(generator, sigma, n, m, trial_seed)
            p = pack(p_codes, alpha)
            text = pack(t_codes, alpha)

            pp = preprocess(p, t_budget=1 << budget_log2, r=r_override)
            t0 = time.perf_counter()
            outcome = search(pp, text)
            sec_packed = time.perf_counter() - t0

            auto = MpAutomaton.build(p)
            t0 = time.perf_counter()
            base_pos, _ = search_baseline(auto, text)
            sec_base = time.perf_counter() - t0

            t0 = time.perf_counter()
            naive_pos = naive_scan(p, text)
            sec_naive = time.perf_counter() - t0

            counts = {
                "packed": len(outcome.end_positions),
                "mp_baseline": len(base_pos),
                "naive": len(naive_pos),
            }
            if len(set(counts.values())) != 1:
                raise RuntimeError(
                    f"engines disagree ({counts}); reproduce with --seed {trial_seed} "
                    f"--trials 1 --generator {generator}"
                )
            st = outcome.stats
            rows.append(BenchRow("packed", sigma, n, m, pp.r, sec_packed,
                                 counts["packed"], st.n_hforward, st.n_hfail))
            rows.append(BenchRow("mp_baseline", sigma, n, m, pp.r, sec_base,
                                 counts["mp_baseline"]))
            rows.append(BenchRow("naive", sigma, n, m, pp.r, sec_naive, counts["naive"]))

        if out is None:
            click.echo(format_bench_csv(rows), nl=False)
        else:
            write_bench_csv(rows, out)
            if figure:
                render_bench_figure(rows, out.with_suffix(".png"))
            click.echo(f"wrote {out}", err=True)
    except click.UsageError:
        raise
    except Exception as exc:  # noqa: BLE001
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@main.command("selftest")
@click.option("--inject-fault", default=None, hidden=True,
              help="Force the named suite to fail (harness sanity check).")
def cmd_selftest(inject_fault):
    """Run the built-in verification suites and print one line per suite."""
    failed = []
    for name, fn in SUITES.items():
        ok, detail = fn()
        if inject_fault == name:
            ok, detail = False, "fault injected"
        status = "PASS" if ok else "FAIL"
        click.echo(f"{name}: {status} ({detail})")
        if not ok:
            failed.append(name)
    ok, what, lines = worked_example()
    if inject_fault == "worked-example":
        ok = False
    for line in lines:
        click.echo(f"  {line}")
    click.echo(f"worked-example: {'PASS' if ok else 'FAIL'} ({what})")
    if not ok:
        failed.append("worked-example")
    if failed:
        click.echo(f"failing suites: {', '.join(failed)}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
