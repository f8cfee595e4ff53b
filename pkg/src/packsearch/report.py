"""Benchmark report output: delimited rows plus a rendered figure.

The CSV schema is fixed: one row per (trial, engine) with columns
``engine, sigma, n, m, r, seconds, matches, N_hforward, N_hfail``. The
heavy-move columns are zero for engines that have no segment structure.
A trailing comment line carries the packed-versus-baseline wall-clock
ratio so the CSV stays self-contained. When a figure path is given, a
bar chart of per-engine timings is rendered next to the CSV.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

BENCH_COLUMNS = (
    "engine",
    "sigma",
    "n",
    "m",
    "r",
    "seconds",
    "matches",
    "N_hforward",
    "N_hfail",
)

ENGINES = ("packed", "mp_baseline", "naive")


@dataclass(frozen=True)
class BenchRow:
    engine: str
    sigma: int
    n: int
    m: int
    r: int
    seconds: float
    matches: int
    n_hforward: int = 0
    n_hfail: int = 0

    def fields(self) -> tuple:
        return (
            self.engine,
            self.sigma,
            self.n,
            self.m,
            self.r,
            f"{self.seconds:.6f}",
            self.matches,
            self.n_hforward,
            self.n_hfail,
        )


def packed_vs_baseline_ratio(rows: list[BenchRow]) -> float | None:
    """Total packed seconds over total baseline seconds, if both ran."""
    packed = sum(row.seconds for row in rows if row.engine == "packed")
    baseline = sum(row.seconds for row in rows if row.engine == "mp_baseline")
    if baseline <= 0 or not any(row.engine == "packed" for row in rows):
        return None
    return packed / baseline


def format_bench_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        writer.writerow(row.fields())
    ratio = packed_vs_baseline_ratio(rows)
    if ratio is not None:
        buf.write(f"# packed_vs_mp_baseline_seconds_ratio={ratio:.4f}\n")
    return buf.getvalue()


def write_bench_csv(rows: list[BenchRow], path) -> None:
    with open(path, "w", newline="") as fp:
        fp.write(format_bench_csv(rows))


def render_bench_figure(rows: list[BenchRow], path) -> None:
    """Bar chart of per-engine timings, saved to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_engine: dict[str, list[float]] = {}
    for row in rows:
        by_engine.setdefault(row.engine, []).append(row.seconds)
    engines = [e for e in ENGINES if e in by_engine] + sorted(
        set(by_engine) - set(ENGINES)
    )
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for at, engine in enumerate(engines):
        samples = by_engine[engine]
        med = sorted(samples)[len(samples) // 2]
        ax.bar(at, med, width=0.6, label=engine)
        ax.scatter([at] * len(samples), samples, color="black", s=12, zorder=3)
    ax.set_xticks(range(len(engines)))
    ax.set_xticklabels(engines)
    ax.set_ylabel("seconds per trial")
    meta = rows[0] if rows else None
    if meta is not None:
        title = f"sigma={meta.sigma} n={meta.n} m={meta.m} r={meta.r}"
        ratio = packed_vs_baseline_ratio(rows)
        if ratio is not None:
            title += f"  packed/baseline={ratio:.2f}"
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
