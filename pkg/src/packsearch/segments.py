"""Segment automaton: overlapping windows of Morris-Pratt states.

The ``m+1`` automaton states are covered by segments of ``r`` consecutive
states starting every ``r/2`` states, so adjacent segments share half
their states and every state lives in one or two segments. Transitions
are copied per segment: a copy whose target stays inside the source
segment is *light*, one that leaves it is *heavy*. Heavy targets land in
the segment that holds the target state in its leftmost half (clamped to
the final segment when that one does not exist), which is what keeps the
number of heavy moves per scanned character small.

``simulate_reference`` walks the copied transitions one character at a
time. It is the slow but transparent twin of the tabulated search loop
and fills the same counters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

from .mp import MpAutomaton
from .packed import PackedString


class TransitionKind(enum.Enum):
    LIGHT_FORWARD = "light_forward"
    LIGHT_FAILURE = "light_failure"
    HEAVY_FORWARD = "heavy_forward"
    HEAVY_FAILURE = "heavy_failure"


class Transition(NamedTuple):
    kind: TransitionKind
    accepting: bool
    target: tuple[int, int]  # (segment index, local state)


@dataclass(frozen=True)
class Segment:
    index: int
    lo: int  # first covered automaton state
    hi: int  # last covered automaton state

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


@dataclass
class SimStats:
    """Transition counters for one simulation run.

    ``n_hforward`` includes heavy accepting moves and ``n_accept`` counts
    every accepting move, so a heavy accept shows up in both (the counter
    inequalities are stated for that convention). ``n_light`` counts only
    the characters consumed on light non-accepting moves, i.e. light
    forward steps and stay-at-root steps; light failure moves consume
    nothing and are not counted, which keeps the tabulated search able to
    reproduce the value exactly.
    """

    n_hforward: int = 0
    n_hfail: int = 0
    n_accept: int = 0
    n_light: int = 0


class SegmentAutomaton:
    """Immutable after build; concurrent read-only simulation is safe."""

    def __init__(self, mp: MpAutomaton, r: int, segments: list[Segment]):
        self.mp = mp
        self.r = r
        self.segments = segments

    @classmethod
    def build(cls, mp: MpAutomaton, r: int) -> "SegmentAutomaton":
        """Cover states 0..m with segments spaced r/2 apart.

        Segments are generated while their start lies strictly below m;
        the next start would otherwise give a segment holding no forward
        transition, which nothing can reach usefully and which would
        break the fixed-width encoding.
        """
        m = mp.m
        if r % 2 or not 2 <= r <= m + 1:
            raise ValueError(f"segment span must be even and in [2, {m + 1}], got {r}")
        half = r // 2
        segments = []
        lo = 0
        i = 0
        while lo < m:
            segments.append(Segment(i, lo, min(lo + r - 1, m)))
            i += 1
            lo = i * half
        return cls(mp, r, segments)

    @property
    def z(self) -> int:
        return len(self.segments)

    def state_of(self, i: int, j: int) -> int:
        seg = self.segments[i]
        if not 0 <= j < seg.size:
            raise IndexError(f"local state {j} outside segment {i} of size {seg.size}")
        return seg.lo + j

    def target_segment(self, state: int) -> int:
        """Segment that receives a heavy move into ``state``."""
        i = state // (self.r // 2)
        last = len(self.segments) - 1
        return i if i <= last else last

    def forward_transition(self, i: int, j: int) -> Transition:
        s = self.state_of(i, j)
        m = self.mp.m
        if s == m:
            raise ValueError(f"state ({i},{j}) is the final state and has no forward transition")
        s2 = s + 1
        seg = self.segments[i]
        accepting = s2 == m
        if s2 <= seg.hi:
            return Transition(TransitionKind.LIGHT_FORWARD, accepting, (i, s2 - seg.lo))
        i2 = self.target_segment(s2)
        return Transition(TransitionKind.HEAVY_FORWARD, accepting, (i2, s2 - self.segments[i2].lo))

    def failure_transition(self, i: int, j: int) -> Transition:
        s = self.state_of(i, j)
        if s == 0:
            raise ValueError("state 0 has no failure transition")
        f = self.mp.fail[s]
        seg = self.segments[i]
        if f >= seg.lo:  # f < s <= seg.hi always holds
            return Transition(TransitionKind.LIGHT_FAILURE, False, (i, f - seg.lo))
        i2 = self.target_segment(f)
        return Transition(TransitionKind.HEAVY_FAILURE, False, (i2, f - self.segments[i2].lo))

    def simulate_reference(self, text: PackedString) -> tuple[list[int], SimStats]:
        """Character-at-a-time simulation; returns end positions and counters."""
        mp = self.mp
        pat = mp.codes
        fail = mp.fail
        m = mp.m
        half = self.r // 2
        seg_lo = [seg.lo for seg in self.segments]
        seg_hi = [seg.hi for seg in self.segments]
        last = len(self.segments) - 1
        sigma = text.alphabet.sigma
        codes = text.code_bytes() if sigma <= 256 else text.unpack()
        out: list[int] = []
        stats = SimStats()
        i = j = 0
        for k, c in enumerate(codes):
            while True:
                s = seg_lo[i] + j
                if s < m and pat[s] == c:
                    s2 = s + 1
                    light = s2 <= seg_hi[i]
                    if light:
                        j = s2 - seg_lo[i]
                    else:
                        i2 = s2 // half
                        if i2 > last:
                            i2 = last
                        stats.n_hforward += 1
                        i, j = i2, s2 - seg_lo[i2]
                    if s2 == m:
                        stats.n_accept += 1
                        out.append(k + 1)
                    elif light:
                        stats.n_light += 1
                    break
                if s == 0:
                    stats.n_light += 1  # stay at the root, consuming the character
                    break
                f = fail[s]
                if f >= seg_lo[i]:
                    j = f - seg_lo[i]
                else:
                    i2 = f // half
                    if i2 > last:
                        i2 = last
                    stats.n_hfail += 1
                    i, j = i2, f - seg_lo[i2]
        return out, stats
