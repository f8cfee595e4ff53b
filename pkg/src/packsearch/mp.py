"""Morris-Pratt automaton: failure function, single steps, and the linear
scanning baseline that serves as the reference matcher.

States are the integers ``0..m``; the forward transition from state ``s``
is labelled with pattern code ``s`` (0-based), and ``fail[s]`` is the
length of the longest prefix of the pattern that is a proper suffix of
its first ``s`` characters. Occurrences are reported as 1-based end
positions and may overlap: after an accepting step the matcher resumes
from ``fail[m]``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .packed import PackedString


@dataclass(frozen=True)
class MpAutomaton:
    pattern: PackedString
    codes: bytes | tuple[int, ...]  # forward label of state s is codes[s]
    fail: tuple[int, ...]  # indexed 1..m, fail[0] unused

    @property
    def m(self) -> int:
        return len(self.codes)

    @classmethod
    def build(cls, pattern: PackedString) -> "MpAutomaton":
        """Construct the automaton in O(m)."""
        m = len(pattern)
        if m == 0:
            raise ValueError("pattern must not be empty")
        codes = pattern.code_bytes() if pattern.alphabet.sigma <= 256 else tuple(pattern.unpack())
        fail = [0] * (m + 1)
        for s in range(2, m + 1):
            k = fail[s - 1]
            c = codes[s - 1]
            while k > 0 and codes[k] != c:
                k = fail[k]
            if codes[k] == c:
                k += 1
            fail[s] = k
        return cls(pattern, codes, tuple(fail))

    def step(self, s: int, code: int) -> tuple[int, bool]:
        """Consume one character from state ``s`` (< m); returns (s', accepted)."""
        if not 0 <= s < self.m:
            raise ValueError(f"state {s} outside [0, {self.m})")
        codes = self.codes
        fail = self.fail
        while s > 0 and codes[s] != code:
            s = fail[s]
        if codes[s] == code:
            s += 1
            return s, s == self.m
        return 0, False


def search_baseline(auto: MpAutomaton, text: PackedString) -> tuple[list[int], int]:
    """All occurrence end positions plus the number of transitions followed.

    The transition count covers forward moves, failure moves, and the
    failure taken out of the accepting state; it never exceeds 2n.
    """
    pat = auto.codes
    fail = auto.fail
    m = auto.m
    fail_m = fail[m]
    sigma = text.alphabet.sigma
    codes = text.code_bytes() if sigma <= 256 else text.unpack()
    out: list[int] = []
    s = 0
    trans = 0
    for k, c in enumerate(codes):
        while s and pat[s] != c:
            s = fail[s]
            trans += 1
        if pat[s] == c:
            s += 1
            trans += 1
            if s == m:
                out.append(k + 1)
                s = fail_m
                trans += 1
        # mismatch at the root consumes the character without a transition
    return out, trans


def naive_scan(pattern: PackedString, text: PackedString) -> list[int]:
    """Brute-force oracle: 1-based end positions of all (overlapping) matches."""
    m = len(pattern)
    if m == 0:
        raise ValueError("pattern must not be empty")
    if m > len(text):
        return []
    if pattern.alphabet.sigma <= 256 and text.alphabet.sigma <= 256:
        return naive_scan_codes(pattern.code_bytes(), text.code_bytes())
    p = tuple(pattern.unpack())
    t = tuple(text.unpack())
    return [i + m for i in range(len(t) - m + 1) if t[i : i + m] == p]


def naive_scan_codes(pattern: bytes, text: bytes) -> list[int]:
    """Same oracle on raw code bytes; delegates scanning to bytes.find."""
    m = len(pattern)
    out: list[int] = []
    at = text.find(pattern)
    while at != -1:
        out.append(at + m)
        at = text.find(pattern, at + 1)
    return out
