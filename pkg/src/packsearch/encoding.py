"""Fixed-width bit records for the light transitions of one segment.

Every segment of span ``r`` over an alphabet of size ``sigma`` encodes to
the same number of bits, ``encoding_width(r, sigma)``, so a record can key
a lookup table directly. Fields appear in the stream in this order, each
packed little-endian (field value bit 0 at the field's base offset):

====================  =======================  =====================================
field                 width (bits)             meaning
====================  =======================  =====================================
size                  ceil(log2(r+1))          number of covered states (<= r)
first_segment         1                        segment holds global state 0
accepting             1                        rightmost light forward step accepts
heavy_label           bits_per_char            label of the heavy forward step out
                                               of the rightmost state (0 if absent)
heavy_present         1                        heavy_label is meaningful
labels                (r-1) * bits_per_char    light forward labels, tail zeroed
light_fail_bitmap     r                        bit j set: local state j has a light
                                               failure step
first_fail            ceil(log2 r)             first light failure target
diff_bits             4r                       two's-complement deltas between
                                               consecutive light failure targets,
                                               each at its minimal width
diff_starts           4r                       bit k set: a delta starts at bit k
                                               of diff_bits
====================  =======================  =====================================

Each delta occupies the fewest bits that can hold it in two's complement
(width 1 encodes 0 and -1). Delta k ends where delta k+1 starts; the last
delta extends to the end of ``diff_bits`` and is stored sign-extended so
the fixed-width record stays uniquely decodable, which also means the tail
is all zeros whenever the last delta is non-negative.

``decode_segment`` rejects any bit pattern the encoder cannot produce, so
the set of valid records is exactly the encoder's range.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .packed import Alphabet
from .segments import SegmentAutomaton


class MalformedEncodingError(ValueError):
    """A bit pattern violates the record or key structure."""


@dataclass(frozen=True)
class RecordLayout:
    r: int
    sigma: int
    bpc: int
    w_size: int
    w_state: int
    w_diff: int
    off_first: int
    off_accepting: int
    off_heavy_label: int
    off_heavy_present: int
    off_labels: int
    off_bitmap: int
    off_first_fail: int
    off_diff_bits: int
    off_diff_starts: int
    total: int


@lru_cache(maxsize=None)
def record_layout(r: int, sigma: int) -> RecordLayout:
    if r < 2 or r % 2:
        raise ValueError(f"segment span must be even and >= 2, got {r}")
    bpc = Alphabet(sigma).bits_per_char
    w_size = r.bit_length()  # ceil(log2(r+1))
    w_state = (r - 1).bit_length()  # ceil(log2 r)
    w_diff = 4 * r
    off_first = w_size
    off_accepting = off_first + 1
    off_heavy_label = off_accepting + 1
    off_heavy_present = off_heavy_label + bpc
    off_labels = off_heavy_present + 1
    off_bitmap = off_labels + (r - 1) * bpc
    off_first_fail = off_bitmap + r
    off_diff_bits = off_first_fail + w_state
    off_diff_starts = off_diff_bits + w_diff
    total = off_diff_starts + w_diff
    return RecordLayout(
        r, sigma, bpc, w_size, w_state, w_diff,
        off_first, off_accepting, off_heavy_label, off_heavy_present,
        off_labels, off_bitmap, off_first_fail, off_diff_bits, off_diff_starts,
        total,
    )


def encoding_width(r: int, sigma: int) -> int:
    """Total record width in bits; a pure function of (r, sigma)."""
    return record_layout(r, sigma).total


@dataclass(frozen=True)
class SegmentDescription:
    """Decoded view of one segment's light transitions."""

    size: int
    first_segment: bool
    accepting: bool
    heavy_label: int | None  # None when the rightmost state has no forward step out
    labels: tuple[int, ...]  # light forward labels, len == size - 1
    fail: tuple[int, ...]  # len == size, -1 where there is no light failure


def _signed_width(d: int) -> int:
    """Fewest bits representing d in two's complement (>= 1)."""
    if d >= 0:
        return d.bit_length() + 1 if d else 1
    return (-d - 1).bit_length() + 1


def describe_segment(sa: SegmentAutomaton, i: int) -> SegmentDescription:
    """Build the description straight from the automaton (no bit tricks)."""
    seg = sa.segments[i]
    mp = sa.mp
    codes = mp.codes
    fail = mp.fail
    size = seg.size
    labels = tuple(codes[seg.lo + j] for j in range(size - 1))
    heavy_label = codes[seg.hi] if seg.hi < mp.m else None
    light_fail = [-1] * size
    for j in range(1, size):
        f = fail[seg.lo + j]
        if f >= seg.lo:
            light_fail[j] = f - seg.lo
    return SegmentDescription(
        size=size,
        first_segment=seg.lo == 0,
        accepting=seg.hi == mp.m and size >= 2,
        heavy_label=heavy_label,
        labels=labels,
        fail=tuple(light_fail),
    )


def encode_segment(sa: SegmentAutomaton, i: int) -> int:
    """Pack segment ``i`` into its fixed-width record."""
    lay = record_layout(sa.r, sa.mp.pattern.alphabet.sigma)
    desc = describe_segment(sa, i)
    bpc = lay.bpc

    rec = desc.size
    if desc.first_segment:
        rec |= 1 << lay.off_first
    if desc.accepting:
        rec |= 1 << lay.off_accepting
    if desc.heavy_label is not None:
        rec |= desc.heavy_label << lay.off_heavy_label
        rec |= 1 << lay.off_heavy_present
    for j, label in enumerate(desc.labels):
        rec |= label << (lay.off_labels + j * bpc)

    targets = [(j, f) for j, f in enumerate(desc.fail) if f >= 0]
    for j, _ in targets:
        rec |= 1 << (lay.off_bitmap + j)
    if targets:
        rec |= targets[0][1] << lay.off_first_fail
    if len(targets) >= 2:
        diff_bits = 0
        starts = 0
        pos = 0
        prev = targets[0][1]
        last_d = 0
        for _, f in targets[1:]:
            d = f - prev
            prev = f
            w = _signed_width(d)
            starts |= 1 << pos
            diff_bits |= (d & ((1 << w) - 1)) << pos
            pos += w
            last_d = d
        assert pos <= lay.w_diff, "delta stream overflowed its fixed field"
        if last_d < 0 and pos < lay.w_diff:
            diff_bits |= ((1 << (lay.w_diff - pos)) - 1) << pos  # sign-extend tail
        rec |= diff_bits << lay.off_diff_bits
        rec |= starts << lay.off_diff_starts
    return rec


def _bit_positions(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _walk_diffs(diff_bits: int, starts: list[int], w_diff: int) -> tuple[list[int], int]:
    """Deltas plus the number of bits their minimal encodings occupy.

    Raises when an inner delta does not fill its span exactly (the encoder
    always emits minimal widths, so anything wider is non-canonical).
    """
    diffs: list[int] = []
    used = 0
    for k, p in enumerate(starts):
        end = starts[k + 1] if k + 1 < len(starts) else w_diff
        width = end - p
        raw = (diff_bits >> p) & ((1 << width) - 1)
        d = raw - (1 << width) if raw >> (width - 1) else raw
        w_min = _signed_width(d)
        if k + 1 < len(starts) and w_min != width:
            raise MalformedEncodingError(
                f"delta at bit {p} stored in {width} bits but needs {w_min}"
            )
        diffs.append(d)
        used += w_min
    return diffs, used


def decode_segment(record: int, r: int, sigma: int) -> SegmentDescription:
    """Inverse of :func:`encode_segment`; rejects non-canonical patterns."""
    lay = record_layout(r, sigma)
    if record < 0 or record >> lay.total:
        raise MalformedEncodingError("record has bits beyond its fixed width")
    bpc = lay.bpc
    cmask = (1 << bpc) - 1

    size = record & ((1 << lay.w_size) - 1)
    if not 1 <= size <= r:
        raise MalformedEncodingError(f"segment size {size} outside [1, {r}]")
    first_segment = bool((record >> lay.off_first) & 1)
    accepting = bool((record >> lay.off_accepting) & 1)
    heavy_present = bool((record >> lay.off_heavy_present) & 1)
    heavy_label = (record >> lay.off_heavy_label) & cmask

    if heavy_present:
        if heavy_label >= sigma:
            raise MalformedEncodingError(f"heavy forward label {heavy_label} >= sigma")
    elif heavy_label:
        raise MalformedEncodingError("heavy forward label set without its presence bit")

    labels_field = (record >> lay.off_labels) & ((1 << ((r - 1) * bpc)) - 1)
    labels = []
    for j in range(size - 1):
        c = (labels_field >> (j * bpc)) & cmask
        if c >= sigma:
            raise MalformedEncodingError(f"forward label {c} at local state {j} >= sigma")
        labels.append(c)
    if labels_field >> ((size - 1) * bpc):
        raise MalformedEncodingError("unused forward label bits are not zero")

    bitmap = (record >> lay.off_bitmap) & ((1 << r) - 1)
    if bitmap & 1:
        raise MalformedEncodingError("local state 0 cannot have a light failure step")
    if bitmap >> size:
        raise MalformedEncodingError("light failure bitmap marks states beyond the segment")
    members = _bit_positions(bitmap)

    first_fail = (record >> lay.off_first_fail) & ((1 << lay.w_state) - 1)
    diff_bits = (record >> lay.off_diff_bits) & ((1 << lay.w_diff) - 1)
    starts_field = (record >> lay.off_diff_starts) & ((1 << lay.w_diff) - 1)

    fail = [-1] * size
    if not members:
        if first_fail or diff_bits or starts_field:
            raise MalformedEncodingError("failure fields must be zero when no state has one")
    else:
        starts = _bit_positions(starts_field)
        if len(starts) != len(members) - 1:
            raise MalformedEncodingError(
                f"{len(starts)} delta markers for {len(members)} light failure states"
            )
        if starts and starts[0] != 0:
            raise MalformedEncodingError("first delta must start at bit 0")
        if len(members) == 1 and diff_bits:
            raise MalformedEncodingError("delta bits present without delta markers")
        f = first_fail
        if f >= size or f >= members[0]:
            raise MalformedEncodingError(
                f"first light failure target {f} invalid for state {members[0]}"
            )
        fail[members[0]] = f
        if starts:
            diffs, _ = _walk_diffs(diff_bits, starts, lay.w_diff)
            for j, d in zip(members[1:], diffs):
                f += d
                if not 0 <= f < size or f >= j:
                    raise MalformedEncodingError(
                        f"light failure target {f} invalid for state {j}"
                    )
                fail[j] = f
    return SegmentDescription(
        size=size,
        first_segment=first_segment,
        accepting=accepting,
        heavy_label=heavy_label if heavy_present else None,
        labels=tuple(labels),
        fail=tuple(fail),
    )


def delta_stats(record: int, r: int, sigma: int) -> tuple[int, int]:
    """(sum of |delta|, bits used by minimal delta encodings) for a record."""
    lay = record_layout(r, sigma)
    starts_field = (record >> lay.off_diff_starts) & ((1 << lay.w_diff) - 1)
    starts = _bit_positions(starts_field)
    if not starts:
        return 0, 0
    diff_bits = (record >> lay.off_diff_bits) & ((1 << lay.w_diff) - 1)
    diffs, used = _walk_diffs(diff_bits, starts, lay.w_diff)
    return sum(abs(d) for d in diffs), used


def record_fields(record: int, r: int, sigma: int) -> dict[str, int]:
    """Raw field values of a record, keyed by field name (for inspection)."""
    lay = record_layout(r, sigma)
    return {
        "size": record & ((1 << lay.w_size) - 1),
        "first_segment": (record >> lay.off_first) & 1,
        "accepting": (record >> lay.off_accepting) & 1,
        "heavy_label": (record >> lay.off_heavy_label) & ((1 << lay.bpc) - 1),
        "heavy_present": (record >> lay.off_heavy_present) & 1,
        "labels": (record >> lay.off_labels) & ((1 << ((r - 1) * lay.bpc)) - 1),
        "light_fail_bitmap": (record >> lay.off_bitmap) & ((1 << r) - 1),
        "first_fail": (record >> lay.off_first_fail) & ((1 << lay.w_state) - 1),
        "diff_bits": (record >> lay.off_diff_bits) & ((1 << lay.w_diff) - 1),
        "diff_starts": (record >> lay.off_diff_starts) & ((1 << lay.w_diff) - 1),
    }
