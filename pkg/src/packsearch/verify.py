"""Built-in verification suites for the ``selftest`` command.

Each suite returns ``(ok, detail)``. They are smaller cousins of the full
test suite: exhaustive where that is cheap, randomized with a fixed seed
otherwise, and always checked against an independent brute-force answer.
"""

from __future__ import annotations

import itertools
import random

from .encoding import decode_segment, describe_segment, encode_segment
from .mp import MpAutomaton, naive_scan
from .nextfn import NextTable
from .packed import Alphabet, pack
from .search import largest_feasible_r, preprocess, search
from .segments import SegmentAutomaton

WORKED_PATTERN = "ababca"
WORKED_TEXT = "abacacababca"
# States visited on the worked example: start, then the state after every
# window step and after every single move.
WORKED_TRACE = [
    (0, 0), (0, 3), (0, 1), (0, 0), (0, 1),
    (0, 3), (2, 0), (2, 1), (2, 2), (2, 2),
]
WORKED_END_POSITIONS = [12]


def _letters(s: str) -> list[int]:
    return [ord(c) - ord("a") for c in s]


def suite_pack_roundtrip(seed: int = 0) -> tuple[bool, str]:
    rng = random.Random(seed)
    cases = 0
    for sigma in (1, 2, 4, 16, 256):
        alpha = Alphabet(sigma)
        for _ in range(40):
            n = rng.randint(0, 500)
            codes = [rng.randrange(sigma) for _ in range(n)]
            ps = pack(codes, alpha)
            if ps.unpack() != codes:
                return False, f"pack/unpack mismatch at sigma={sigma} n={n}"
            if len(ps.words) != (n * alpha.bits_per_char + 63) // 64:
                return False, f"word count off at sigma={sigma} n={n}"
            cases += 1
    return True, f"{cases} random round trips"


def suite_encoding_roundtrip() -> tuple[bool, str]:
    alpha = Alphabet(2)
    checked = 0
    for m in range(1, 11):
        for bits in itertools.product((0, 1), repeat=m):
            mp = MpAutomaton.build(pack(list(bits), alpha))
            for r in (2, 4):
                if r > m + 1:
                    continue
                sa = SegmentAutomaton.build(mp, r)
                for i in range(sa.z):
                    rec = encode_segment(sa, i)
                    if decode_segment(rec, r, 2) != describe_segment(sa, i):
                        return False, f"round trip failed for pattern {bits}, r={r}, segment {i}"
                    checked += 1
    return True, f"{checked} segment records"


def suite_tabulation() -> tuple[bool, str]:
    """Table answers equal the direct walk for every reachable small input."""
    from .nextfn import next_direct

    alpha = Alphabet(2)
    table = NextTable(4, 2)
    checked = 0
    for m in range(3, 8):
        for bits in itertools.product((0, 1), repeat=m):
            pp = preprocess(pack(list(bits), alpha), r=4)
            for rec in pp.encodings:
                desc = decode_segment(rec, 4, 2)
                for j in range(desc.size):
                    for qlen in range(4):
                        for q in itertools.product((0, 1), repeat=qlen):
                            qbits = 0
                            for at, c in enumerate(q):
                                qbits |= c << at
                            key = table.make_key(rec, j, qlen, qbits)
                            if table.lookup(key) != next_direct(desc, j, q):
                                return False, f"lookup mismatch pattern={bits} seg j={j} q={q}"
                            checked += 1
    return True, f"{checked} lookups against the direct walk"


def suite_counters(seed: int = 1, cases: int = 300) -> tuple[bool, str]:
    """Failure-function growth plus heavy-move bounds on random runs."""
    rng = random.Random(seed)
    for case in range(cases):
        sigma = rng.choice([2, 4, 26])
        m = rng.randint(1, 128)
        alpha = Alphabet(sigma)
        p = [rng.randrange(sigma) for _ in range(m)]
        mp = MpAutomaton.build(pack(p, alpha))
        for s in range(1, m):
            if mp.fail[s + 1] > mp.fail[s] + 1:
                return False, f"failure growth violated at state {s} of case {case}"
        n = rng.randint(m, 800)
        t = [rng.randrange(sigma) for _ in range(n)]
        if rng.random() < 0.3:
            at = rng.randint(0, n - m)
            t[at : at + m] = p
        text = pack(t, alpha)
        r = min((2, 4, 8)[case % 3], largest_feasible_r(m, alpha.bits_per_char))
        pp = preprocess(pack(p, alpha), r=r)
        out = search(pp, text)
        if out.end_positions != naive_scan(pp.mp.pattern, text):
            return False, f"occurrence mismatch in case {case}"
        st = out.stats
        occ = st.n_accept
        if st.n_hfail > 2 * st.n_hforward:
            return False, f"heavy failure bound violated in case {case}"
        if st.n_hforward > 4 * n / (pp.r - 1) + 1:
            return False, f"heavy forward bound violated in case {case}"
        if st.n_hforward + st.n_hfail + st.n_accept > 12 * n / pp.r + occ + 3:
            return False, f"total heavy bound violated in case {case}"
    return True, f"{cases} random runs"


def worked_example() -> tuple[bool, str, list[str]]:
    """Re-run the reference walkthrough and render its trace."""
    alpha = Alphabet(3)
    pp = preprocess(pack(_letters(WORKED_PATTERN), alpha), r=4)
    text = pack(_letters(WORKED_TEXT), alpha)
    trace: list[tuple[int, int]] = []
    out = search(pp, text, trace=trace)
    lines = [
        f"pattern={WORKED_PATTERN} text={WORKED_TEXT} r=4",
        "segment sizes: " + ", ".join(str(s.size) for s in pp.sa.segments),
        "visited states: " + " -> ".join(f"({i},{j})" for i, j in trace),
        f"occurrence end positions: {out.end_positions}",
    ]
    ok = (
        trace == WORKED_TRACE
        and out.end_positions == WORKED_END_POSITIONS
        and [s.size for s in pp.sa.segments] == [4, 4, 3]
    )
    return ok, "walkthrough trace and occurrence", lines


SUITES = {
    "pack-roundtrip": suite_pack_roundtrip,
    "encoding-roundtrip": suite_encoding_roundtrip,
    "tabulation": suite_tabulation,
    "counter-bounds": suite_counters,
}
