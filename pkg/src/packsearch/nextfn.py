"""Longest light path queries and their tabulation.

``next_direct`` answers: starting at local state ``j`` of a decoded
segment, how far along the query window can we walk using only light,
non-accepting moves, and where do we end up? The answer ``(l, j')``
counts consumed characters (stay-at-root steps included, so the caller's
cursor arithmetic works out) and stops just before any heavy or accepting
move.

``NextTable`` memoises these answers keyed on the integer formed by the
segment record, the state, the window length, and the window characters,
laid out in that order (little-endian, fixed widths). The table depends
only on ``(r, sigma)``, never on a pattern, so one instance is shared by
every preprocessed pattern with the same parameters. Entries appear
lazily by default; ``eager_fill`` enumerates every canonical input for
small parameter sets, which is what the exhaustive self tests use.

Concurrency: lookups race benignly. A missing key may be computed twice
by two threads, but the value is deterministic and dict updates are
atomic, so readers never observe a torn entry.
"""

from __future__ import annotations

import itertools
import logging
import struct
from typing import Iterator, Sequence

from .encoding import (
    MalformedEncodingError,
    SegmentDescription,
    decode_segment,
    encoding_width,
    record_layout,
)
from .packed import Alphabet

logger = logging.getLogger(__name__)

DEFAULT_T_BUDGET = 1 << 22

CACHE_MAGIC = b"PKSM"
CACHE_VERSION = 1


def key_width(r: int, sigma: int) -> int:
    """Bits in a lookup key: record, state, window length, window chars."""
    w_state = (r - 1).bit_length()
    bpc = Alphabet(sigma).bits_per_char
    return encoding_width(r, sigma) + 2 * w_state + (r - 1) * bpc


def next_direct(desc: SegmentDescription, j: int, q: Sequence[int]) -> tuple[int, int]:
    """Walk light non-accepting moves from ``j`` over a prefix of ``q``.

    Runs in O(size + len(q)): every light failure strictly lowers the
    state, so failures are paid for by forward moves plus the start state.
    """
    size = desc.size
    if not 0 <= j < size:
        raise MalformedEncodingError(f"state {j} outside segment of size {size}")
    labels = desc.labels
    fail = desc.fail
    at_root = desc.first_segment
    accepting = desc.accepting
    heavy_label = desc.heavy_label
    top = size - 1
    l = 0
    for c in q:
        while True:
            if j < top and labels[j] == c:
                if accepting and j == top - 1:
                    return l, j  # the matching move would accept
                j += 1
                l += 1
                break
            if j == top and heavy_label == c:
                return l, j  # the matching move is heavy
            f = fail[j]
            if f >= 0:
                j = f  # light failure, consumes nothing
                continue
            if j == 0 and at_root:
                l += 1  # stay at the root; the character is consumed
                break
            return l, j  # a heavy failure would be needed
    return l, j


class NextTable:
    """Memoised light-path answers for one ``(r, sigma)`` pair."""

    def __init__(self, r: int, sigma: int):
        if r < 2 or r % 2:
            raise ValueError(f"segment span must be even and >= 2, got {r}")
        self.r = r
        self.sigma = sigma
        self.bpc = Alphabet(sigma).bits_per_char
        lay = record_layout(r, sigma)
        self.off_j = lay.total
        self.off_qlen = self.off_j + lay.w_state
        self.off_q = self.off_qlen + lay.w_state
        self.width = self.off_q + (r - 1) * self.bpc
        self._memo: dict[int, tuple[int, int]] = {}
        self._descs: dict[int, SegmentDescription] = {}

    def __len__(self) -> int:
        return len(self._memo)

    def clear(self) -> None:
        self._memo.clear()
        self._descs.clear()

    def make_key(self, record: int, j: int, q_len: int, q_bits: int) -> int:
        return record | (j << self.off_j) | (q_len << self.off_qlen) | (q_bits << self.off_q)

    def decode_key(self, key: int) -> tuple[SegmentDescription, int, tuple[int, ...]]:
        """Split and validate a key; raises MalformedEncodingError if invalid."""
        if key < 0 or key >> self.width:
            raise MalformedEncodingError("key has bits beyond its fixed width")
        record = key & ((1 << self.off_j) - 1)
        desc = self._descs.get(record)
        if desc is None:
            desc = decode_segment(record, self.r, self.sigma)
            self._descs[record] = desc
        w_state_mask = (1 << (self.off_qlen - self.off_j)) - 1
        j = (key >> self.off_j) & w_state_mask
        q_len = (key >> self.off_qlen) & w_state_mask
        if j >= desc.size:
            raise MalformedEncodingError(f"state {j} outside segment of size {desc.size}")
        if q_len > self.r - 1:
            raise MalformedEncodingError(f"window length {q_len} exceeds {self.r - 1}")
        q_bits = key >> self.off_q
        bpc = self.bpc
        cmask = (1 << bpc) - 1
        q = []
        for k in range(q_len):
            c = (q_bits >> (k * bpc)) & cmask
            if c >= self.sigma:
                raise MalformedEncodingError(f"window character {c} >= sigma")
            q.append(c)
        if q_bits >> (q_len * bpc):
            raise MalformedEncodingError("unused window bits are not zero")
        return desc, j, tuple(q)

    def lookup(self, key: int) -> tuple[int, int]:
        """Answer for ``key``; first access computes and memoises."""
        res = self._memo.get(key)
        if res is None:
            desc, j, q = self.decode_key(key)
            res = next_direct(desc, j, q)
            self._memo[key] = res
        return res

    # -- eager enumeration ---------------------------------------------------

    def estimate_full_size(self) -> int:
        """Number of (record, state, window) combinations ``eager_fill`` visits."""
        sigma = self.sigma
        windows = sum(sigma**t for t in range(self.r))
        total = 0
        for size in range(1, self.r + 1):
            fmaps = 1
            for j in range(1, size):
                fmaps *= 1 + j  # each light-failure state j contributes j targets
            records = 4 * (1 + sigma) * sigma ** max(0, size - 1) * fmaps
            total += records * size * windows
        return total

    def _iter_records(self) -> Iterator[int]:
        """Every canonical record for (r, sigma), by direct construction."""
        lay = record_layout(self.r, self.sigma)
        sigma = self.sigma
        bpc = self.bpc
        for size in range(1, self.r + 1):
            label_sets = itertools.product(range(sigma), repeat=size - 1)
            for labels in label_sets:
                base = size
                for j, lab in enumerate(labels):
                    base |= lab << (lay.off_labels + j * bpc)
                heads = [(acc, h) for acc in (False, True) for h in [None, *range(sigma)]]
                for first in (0, 1):
                    b1 = base | (first << lay.off_first)
                    for accepting, heavy in heads:
                        b2 = b1
                        if accepting:
                            b2 |= 1 << lay.off_accepting
                        if heavy is not None:
                            b2 |= (heavy << lay.off_heavy_label) | (1 << lay.off_heavy_present)
                        yield from self._iter_fail_fields(b2, size, lay)

    def _iter_fail_fields(self, base: int, size: int, lay) -> Iterator[int]:
        for nset in range(size):
            for members in itertools.combinations(range(1, size), nset):
                bitmap = 0
                for j in members:
                    bitmap |= 1 << j
                b = base | (bitmap << lay.off_bitmap)
                if not members:
                    yield b
                    continue
                for targets in itertools.product(*(range(j) for j in members)):
                    rec = b | (targets[0] << lay.off_first_fail)
                    if len(targets) >= 2:
                        diff_bits = 0
                        starts = 0
                        pos = 0
                        prev = targets[0]
                        d = 0
                        for f in targets[1:]:
                            d = f - prev
                            prev = f
                            w = _signed_width(d)
                            starts |= 1 << pos
                            diff_bits |= (d & ((1 << w) - 1)) << pos
                            pos += w
                        if d < 0 and pos < lay.w_diff:
                            diff_bits |= ((1 << (lay.w_diff - pos)) - 1) << pos
                        rec |= (diff_bits << lay.off_diff_bits) | (starts << lay.off_diff_starts)
                    yield rec

    def eager_fill(self, max_entries: int = 1 << 22) -> int:
        """Precompute every canonical key. Feasible only for tiny (r, sigma).

        Returns the number of table entries afterwards; raises ValueError
        when the enumeration would exceed ``max_entries``.
        """
        est = self.estimate_full_size()
        if est > max_entries:
            raise ValueError(
                f"eager fill would touch {est} entries, above the cap of {max_entries}"
            )
        memo = self._memo
        sigma = self.sigma
        bpc = self.bpc
        r1 = self.r - 1
        windows: list[tuple[int, int, tuple[int, ...]]] = []
        for q_len in range(r1 + 1):
            for q in itertools.product(range(sigma), repeat=q_len):
                q_bits = 0
                for k, c in enumerate(q):
                    q_bits |= c << (k * bpc)
                windows.append((q_len, q_bits, q))
        for record in self._iter_records():
            desc = decode_segment(record, self.r, self.sigma)
            self._descs[record] = desc
            for j in range(desc.size):
                for q_len, q_bits, q in windows:
                    key = self.make_key(record, j, q_len, q_bits)
                    memo[key] = next_direct(desc, j, q)
        return len(memo)

    # -- persistence -----------------------------------------------------------

    def save(self, path) -> None:
        with open(path, "wb") as fp:
            fp.write(serialize_entries(self.r, self.sigma, self.width, self._memo))

    def load(self, path) -> int:
        """Merge entries from a cache file; returns how many were read."""
        with open(path, "rb") as fp:
            data = fp.read()
        entries = parse_entries(data, self.r, self.sigma, self.width)
        self._memo.update(entries)
        return len(entries)


def _signed_width(d: int) -> int:
    if d >= 0:
        return d.bit_length() + 1 if d else 1
    return (-d - 1).bit_length() + 1


def serialize_entries(r: int, sigma: int, width: int, entries: dict[int, tuple[int, int]]) -> bytes:
    """Cache file image: header plus sorted (key, l, j') triples."""
    key_bytes = (width + 7) // 8
    out = bytearray()
    out += CACHE_MAGIC
    out.append(CACHE_VERSION)
    out += struct.pack("<III", r, sigma, width)
    out += struct.pack("<Q", len(entries))
    for key in sorted(entries):
        l, j = entries[key]
        out += key.to_bytes(key_bytes, "little")
        out += struct.pack("<HH", l, j)
    return bytes(out)


def parse_entries(data: bytes, r: int, sigma: int, width: int) -> dict[int, tuple[int, int]]:
    if data[:4] != CACHE_MAGIC:
        raise ValueError("not a lookup table cache file (bad magic)")
    if data[4] != CACHE_VERSION:
        raise ValueError(f"unsupported cache version {data[4]}")
    got_r, got_sigma, got_width = struct.unpack_from("<III", data, 5)
    if (got_r, got_sigma) != (r, sigma):
        raise ValueError(
            f"cache is for r={got_r}, sigma={got_sigma}; expected r={r}, sigma={sigma}"
        )
    if got_width != width or got_width != key_width(r, sigma):
        raise ValueError(f"cache key width {got_width} does not match {key_width(r, sigma)}")
    (count,) = struct.unpack_from("<Q", data, 17)
    key_bytes = (width + 7) // 8
    stride = key_bytes + 4
    at = 25
    if len(data) != at + count * stride:
        raise ValueError("cache file is truncated or padded")
    entries: dict[int, tuple[int, int]] = {}
    for _ in range(count):
        key = int.from_bytes(data[at : at + key_bytes], "little")
        l, j = struct.unpack_from("<HH", data, at + key_bytes)
        entries[key] = (l, j)
        at += stride
    return entries


# -- table registry (one shared instance per parameter pair) -------------------

_TABLES: dict[tuple[int, int], NextTable] = {}


def get_table(r: int, sigma: int) -> NextTable:
    table = _TABLES.get((r, sigma))
    if table is None:
        table = _TABLES[(r, sigma)] = NextTable(r, sigma)
    return table


def clear_table_registry() -> None:
    _TABLES.clear()


def choose_r(t_budget: int, sigma: int) -> int:
    """Largest even span whose key space fits an entry budget.

    The table must be addressable by its key, so the requirement is
    ``2**key_width(r, sigma) <= t_budget``. When even the smallest span
    does not fit, the smallest legal span is returned with a diagnostic;
    the lazily filled table then simply stays sparse.
    """
    if t_budget < 2:
        raise ValueError(f"table budget must be at least 2, got {t_budget}")
    budget_bits = t_budget.bit_length() - 1
    best = None
    r = 2
    while key_width(r, sigma) <= budget_bits:
        best = r
        r += 2
    if best is None:
        logger.warning(
            "no even span fits a budget of 2^%d entries for sigma=%d "
            "(smallest key is %d bits); falling back to r=2",
            budget_bits, sigma, key_width(2, sigma),
        )
        return 2
    return best
