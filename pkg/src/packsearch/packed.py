"""Bit-packed strings over small alphabets.

A packed string stores each character in ``bits_per_char`` bits of a
little-endian bit stream held in 64-bit words, so one word carries many
characters and short substrings can be fetched with two shifts and a mask
instead of a per-character loop.

Layout rules:

- character ``i`` occupies stream bits ``[i*bpc, (i+1)*bpc)`` where
  ``bpc = bits_per_char``;
- stream bit ``k`` is bit ``k % 64`` of word ``k // 64`` (character 0
  sits in the lowest-order bits of word 0);
- storage is exactly ``ceil(len * bpc / 64)`` words.

``pack`` uses vectorised numpy paths for the common widths (1, 2, 4, 8
and 16 bits per character) and a plain word-filling loop otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

WORD_BITS = 64
MAX_SIGMA = 1 << 16

_WORD_MASK = (1 << WORD_BITS) - 1
_FAST_WIDTHS = (1, 2, 4, 8, 16)


@dataclass(frozen=True)
class Alphabet:
    """Character universe: codes are integers in ``[0, sigma)``."""

    sigma: int
    bits_per_char: int = field(init=False)

    def __post_init__(self) -> None:
        if not 1 <= self.sigma <= MAX_SIGMA:
            raise ValueError(f"alphabet size must be in [1, {MAX_SIGMA}], got {self.sigma}")
        # sigma == 1 still gets one bit per character to avoid zero-width fields
        object.__setattr__(self, "bits_per_char", max(1, (self.sigma - 1).bit_length()))


class Window(NamedTuple):
    """Up to a machine word of consecutive characters, still packed."""

    length: int
    bits: int


def decode_window(window: Window, alphabet: Alphabet) -> tuple[int, ...]:
    bpc = alphabet.bits_per_char
    mask = (1 << bpc) - 1
    bits = window.bits
    return tuple((bits >> (k * bpc)) & mask for k in range(window.length))


class PackedString:
    """Immutable packed character sequence. Safe for concurrent reads."""

    __slots__ = ("alphabet", "length", "words")

    def __init__(self, alphabet: Alphabet, length: int, words: list[int]):
        self.alphabet = alphabet
        self.length = length
        self.words = words

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PackedString):
            return NotImplemented
        return (
            self.alphabet.sigma == other.alphabet.sigma
            and self.length == other.length
            and self.words == other.words
        )

    def __repr__(self) -> str:
        return f"PackedString(sigma={self.alphabet.sigma}, length={self.length})"

    def char_at(self, i: int) -> int:
        """Code of character ``i``."""
        if not 0 <= i < self.length:
            raise IndexError(f"character index {i} out of range [0, {self.length})")
        bpc = self.alphabet.bits_per_char
        off = i * bpc
        sh = off & 63
        v = self.words[off >> 6] >> sh
        if sh + bpc > WORD_BITS:
            v |= self.words[(off >> 6) + 1] << (WORD_BITS - sh)
        return v & ((1 << bpc) - 1)

    def window(self, start: int, length: int) -> Window:
        """Extract ``length`` characters starting at ``start`` as one integer.

        Touches at most two storage words; requires length*bpc <= 64.
        """
        bpc = self.alphabet.bits_per_char
        if length < 0 or start < 0 or start + length > self.length:
            raise IndexError(
                f"window [{start}, {start + length}) out of range for length {self.length}"
            )
        nbits = length * bpc
        if nbits > WORD_BITS:
            raise ValueError(f"window of {length} chars needs {nbits} bits > {WORD_BITS}")
        if length == 0:
            return Window(0, 0)
        off = start * bpc
        sh = off & 63
        bits = self.words[off >> 6] >> sh
        if sh + nbits > WORD_BITS:
            bits |= self.words[(off >> 6) + 1] << (WORD_BITS - sh)
        return Window(length, bits & ((1 << nbits) - 1))

    def unpack_array(self) -> np.ndarray:
        """All codes as a numpy array (uint8 when sigma <= 256, else uint16)."""
        n = self.length
        bpc = self.alphabet.bits_per_char
        dtype = np.uint8 if self.alphabet.sigma <= 256 else np.uint16
        if n == 0:
            return np.zeros(0, dtype=dtype)
        if bpc in _FAST_WIDTHS:
            nbytes = (n * bpc + 7) // 8
            raw = np.frombuffer(
                np.array(self.words, dtype="<u8").tobytes()[:nbytes], dtype=np.uint8
            )
            if bpc == 8:
                out = raw
            elif bpc == 16:
                out = np.frombuffer(raw.tobytes(), dtype="<u2")
            elif bpc == 1:
                out = np.unpackbits(raw, bitorder="little")[:n]
            elif bpc == 4:
                out = np.empty(raw.size * 2, dtype=np.uint8)
                out[0::2] = raw & 0x0F
                out[1::2] = raw >> 4
                out = out[:n]
            else:  # bpc == 2
                out = np.empty(raw.size * 4, dtype=np.uint8)
                out[0::4] = raw & 3
                out[1::4] = (raw >> 2) & 3
                out[2::4] = (raw >> 4) & 3
                out[3::4] = raw >> 6
                out = out[:n]
            return out.astype(dtype, copy=False)
        return np.array([self.char_at(i) for i in range(n)], dtype=dtype)

    def unpack(self) -> list[int]:
        return self.unpack_array().tolist()

    def code_bytes(self) -> bytes:
        """Codes as raw bytes, one per character. Needs sigma <= 256."""
        if self.alphabet.sigma > 256:
            raise ValueError("code_bytes requires sigma <= 256")
        return self.unpack_array().tobytes()


def pack(codes: Sequence[int] | np.ndarray, alphabet: Alphabet) -> PackedString:
    """Pack a code sequence into a :class:`PackedString`.

    Raises ValueError if any code is outside ``[0, sigma)``.
    """
    bpc = alphabet.bits_per_char
    arr = np.asarray(codes, dtype=np.uint32)
    n = int(arr.size)
    if n and int(arr.max(initial=0)) >= alphabet.sigma:
        bad = int(np.argmax(arr >= alphabet.sigma))
        raise ValueError(
            f"code {int(arr[bad])} at position {bad} not below alphabet size {alphabet.sigma}"
        )
    if n == 0:
        return PackedString(alphabet, 0, [])
    if bpc in _FAST_WIDTHS:
        if bpc == 8:
            data = arr.astype(np.uint8).tobytes()
        elif bpc == 16:
            data = arr.astype("<u2").tobytes()
        elif bpc == 1:
            data = np.packbits(arr.astype(np.uint8), bitorder="little").tobytes()
        elif bpc == 4:
            c = arr.astype(np.uint8)
            if c.size & 1:
                c = np.append(c, np.uint8(0))
            data = (c[0::2] | (c[1::2] << 4)).tobytes()
        else:  # bpc == 2
            c = arr.astype(np.uint8)
            if c.size & 3:
                c = np.append(c, np.zeros(4 - (c.size & 3), dtype=np.uint8))
            data = (c[0::4] | (c[1::4] << 2) | (c[2::4] << 4) | (c[3::4] << 6)).tobytes()
        if len(data) & 7:
            data += b"\x00" * (8 - (len(data) & 7))
        words = np.frombuffer(data, dtype="<u8").tolist()
        return PackedString(alphabet, n, words)
    # general width: word-filling loop
    words = [0] * ((n * bpc + WORD_BITS - 1) // WORD_BITS)
    for i, c in enumerate(arr.tolist()):
        off = i * bpc
        sh = off & 63
        words[off >> 6] |= (c << sh) & _WORD_MASK
        if sh + bpc > WORD_BITS:
            words[(off >> 6) + 1] |= c >> (WORD_BITS - sh)
    return PackedString(alphabet, n, words)


# ---------------------------------------------------------------------------
# Byte-to-code mappings used by the command line front end.

BYTE_ALPHABET = Alphabet(256)
DNA_ALPHABET = Alphabet(4)

_DNA_CODES = {ord("A"): 0, ord("C"): 1, ord("G"): 2, ord("T"): 3}
_NEWLINE_BYTES = (ord("\n"), ord("\r"))


@dataclass(frozen=True)
class ByteCodec:
    """Maps raw bytes to character codes for one alphabet."""

    name: str
    alphabet: Alphabet
    table: np.ndarray  # shape (256,), int32, -1 marks an unmappable byte
    strip_newlines: bool = False

    def encode(self, data: bytes) -> np.ndarray:
        """Translate bytes to codes; raises naming the first bad byte offset."""
        raw = np.frombuffer(data, dtype=np.uint8)
        offsets = None
        if self.strip_newlines:
            keep = (raw != _NEWLINE_BYTES[0]) & (raw != _NEWLINE_BYTES[1])
            offsets = np.nonzero(keep)[0]
            raw = raw[keep]
        codes = self.table[raw]
        if codes.size and int(codes.min(initial=0)) < 0:
            at = int(np.argmax(codes < 0))
            orig = int(offsets[at]) if offsets is not None else at
            raise ValueError(
                f"byte 0x{int(raw[at]):02x} at offset {orig} has no code in alphabet {self.name!r}"
            )
        return codes.astype(np.uint16 if self.alphabet.sigma > 256 else np.uint8)

    def pack(self, data: bytes) -> PackedString:
        return pack(self.encode(data), self.alphabet)


def byte_codec() -> ByteCodec:
    """Identity byte mapping, sigma = 256."""
    return ByteCodec("byte", BYTE_ALPHABET, np.arange(256, dtype=np.int32))


def dna_codec(strip_newlines: bool = True) -> ByteCodec:
    """A/C/G/T to 0..3, sigma = 4. Strips line breaks unless told otherwise."""
    table = np.full(256, -1, dtype=np.int32)
    for byte, code in _DNA_CODES.items():
        table[byte] = code
    return ByteCodec("dna", DNA_ALPHABET, table, strip_newlines=strip_newlines)


def custom_codec(mapping: dict[int, int], sigma: int, name: str = "custom") -> ByteCodec:
    """Codec from an explicit byte-to-code mapping.

    The mapping must be injective into ``[0, sigma)``.
    """
    alphabet = Alphabet(sigma)
    table = np.full(256, -1, dtype=np.int32)
    seen: dict[int, int] = {}
    for byte, code in mapping.items():
        if not 0 <= byte <= 255:
            raise ValueError(f"mapped byte {byte} outside [0, 255]")
        if not 0 <= code < sigma:
            raise ValueError(f"code {code} for byte {byte} outside [0, {sigma})")
        if code in seen:
            raise ValueError(f"code {code} assigned to both bytes {seen[code]} and {byte}")
        seen[code] = byte
        table[byte] = code
    return ByteCodec(name, alphabet, table)
