"""The packed search loop.

Each iteration pulls a window of up to ``r-1`` characters straight out of
the packed text, asks the lookup table how far light moves carry it, and
then resolves exactly one boundary transition by hand. The boundary move
is heavy or accepting whenever the window stopped early; after a fully
consumed window it can be any move, including a light one. Occurrences
are 1-based end positions (conversion to 0-based start offsets happens at
the command line, never here).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .encoding import encode_segment
from .mp import MpAutomaton
from .nextfn import DEFAULT_T_BUDGET, NextTable, choose_r, get_table
from .packed import WORD_BITS, PackedString
from .segments import SegmentAutomaton, SimStats


@dataclass
class PreprocessedPattern:
    """A pattern with its automata, segment records, and shared table.

    ``seg_memos`` front the shared table with one small-keyed dict per
    segment: the record bits of a given segment never change, so inside
    the search loop the key shrinks to (state, window length, window).
    Misses still go through the table, which stays the authoritative,
    pattern-independent store.
    """

    mp: MpAutomaton
    sa: SegmentAutomaton
    encodings: list[int]
    table: NextTable
    r: int
    seg_lo: list[int] = field(repr=False, default_factory=list)
    seg_hi: list[int] = field(repr=False, default_factory=list)
    seg_memos: list[dict[int, tuple[int, int]]] = field(repr=False, default_factory=list)

    @property
    def m(self) -> int:
        return self.mp.m


@dataclass
class SearchOutcome:
    end_positions: list[int]
    stats: SimStats
    iterations: int


def largest_feasible_r(m: int, bits_per_char: int) -> int:
    """Largest even span allowed by the pattern length and the word size."""
    by_m = m + 1 if (m + 1) % 2 == 0 else m
    by_word = WORD_BITS // bits_per_char + 1  # window of r-1 chars must fit a word
    by_word -= by_word % 2
    return max(2, min(by_m, by_word))


def preprocess(
    pattern: PackedString,
    t_budget: int = DEFAULT_T_BUDGET,
    r: int | None = None,
) -> PreprocessedPattern:
    """Build everything the search loop needs; runs in O(m).

    ``r`` overrides the budget-derived span; either way the span is
    clamped to the largest even value the pattern and word size allow.
    """
    m = len(pattern)
    if m == 0:
        raise ValueError("pattern must not be empty")
    sigma = pattern.alphabet.sigma
    if r is None:
        r = choose_r(t_budget, sigma)
    if r < 2 or r % 2:
        raise ValueError(f"segment span must be even and >= 2, got {r}")
    r = min(r, largest_feasible_r(m, pattern.alphabet.bits_per_char))
    mp = MpAutomaton.build(pattern)
    sa = SegmentAutomaton.build(mp, r)
    encodings = [encode_segment(sa, i) for i in range(sa.z)]
    table = get_table(r, sigma)
    return PreprocessedPattern(
        mp=mp,
        sa=sa,
        encodings=encodings,
        table=table,
        r=r,
        seg_lo=[seg.lo for seg in sa.segments],
        seg_hi=[seg.hi for seg in sa.segments],
        seg_memos=[{} for _ in sa.segments],
    )


def search(
    pp: PreprocessedPattern,
    text: PackedString,
    trace: list[tuple[int, int]] | None = None,
) -> SearchOutcome:
    """Find all occurrences of the preprocessed pattern in ``text``.

    ``trace``, when given, receives the visited states: the start state,
    then the state after each window step and after each single move.
    """
    if text.alphabet.sigma != pp.mp.pattern.alphabet.sigma:
        raise ValueError("pattern and text use different alphabets")
    mp = pp.mp
    pat = mp.codes
    fail = mp.fail
    m = mp.m
    r1 = pp.r - 1
    half = pp.r >> 1
    seg_lo = pp.seg_lo
    seg_hi = pp.seg_hi
    last = len(seg_lo) - 1
    table = pp.table
    lookup = table.lookup
    off_j = table.off_j
    w_state = table.off_qlen - table.off_j
    w_state2 = 2 * w_state
    base = pp.encodings
    seg_memos = pp.seg_memos
    words = text.words
    n = text.length
    bpc = text.alphabet.bits_per_char
    cmask = (1 << bpc) - 1

    k = 0
    i = j = 0
    out: list[int] = []
    iterations = 0
    nhf = nhfl = nacc = nlight = 0
    if trace is not None:
        trace.append((0, 0))
    while True:
        iterations += 1
        rem = n - k
        wlen = r1 if rem >= r1 else rem
        nbits = wlen * bpc
        off = k * bpc
        sh = off & 63
        wi = off >> 6
        qb = words[wi] >> sh if wi < len(words) else 0
        if sh + nbits > WORD_BITS:
            qb |= words[wi + 1] << (WORD_BITS - sh)
        qb &= (1 << nbits) - 1
        skey = j | (wlen << w_state) | (qb << w_state2)
        mem = seg_memos[i]
        res = mem.get(skey)
        if res is None:
            res = lookup(base[i] | (skey << off_j))
            mem[skey] = res
        l, j2 = res
        nlight += l
        if trace is not None:
            trace.append((i, j2))
        kl = k + l
        if kl == n:
            break
        # single transition on the character after the light walk
        off = kl * bpc
        sh = off & 63
        a = words[off >> 6] >> sh
        if sh + bpc > WORD_BITS:
            a |= words[(off >> 6) + 1] << (WORD_BITS - sh)
        a &= cmask
        s = seg_lo[i] + j2
        if s < m and pat[s] == a:
            s2 = s + 1
            if s2 <= seg_hi[i]:
                i2 = i
                j2 = s2 - seg_lo[i]
                if s2 == m:
                    nacc += 1
                    out.append(kl + 1)
                else:
                    nlight += 1
            else:
                i2 = s2 // half
                if i2 > last:
                    i2 = last
                j2 = s2 - seg_lo[i2]
                nhf += 1
                if s2 == m:
                    nacc += 1
                    out.append(kl + 1)
            k = kl + 1
        elif s == 0:
            i2 = 0
            j2 = 0
            nlight += 1
            k = kl + 1
        else:
            f = fail[s]
            if f >= seg_lo[i]:
                # a light move here is only possible after a full window
                assert l == wlen, "window stopped early yet the next move is light"
                i2 = i
                j2 = f - seg_lo[i]
            else:
                i2 = f // half
                if i2 > last:
                    i2 = last
                j2 = f - seg_lo[i2]
                nhfl += 1
            k = kl
        if trace is not None:
            trace.append((i2, j2))
        i, j = i2, j2
    return SearchOutcome(out, SimStats(nhf, nhfl, nacc, nlight), iterations)
