"""Exact string matching over bit-packed text.

The library packs text at a few bits per character, decomposes the
Morris-Pratt automaton of the pattern into overlapping segments, encodes
each segment's light transitions into one fixed-width machine word, and
drives the scan through a memoised lookup table so that long stretches of
light moves cost a single table probe.
"""

from .encoding import (
    MalformedEncodingError,
    SegmentDescription,
    decode_segment,
    describe_segment,
    encode_segment,
    encoding_width,
)
from .mp import MpAutomaton, naive_scan, search_baseline
from .nextfn import (
    DEFAULT_T_BUDGET,
    NextTable,
    choose_r,
    clear_table_registry,
    get_table,
    key_width,
    next_direct,
)
from .packed import (
    Alphabet,
    ByteCodec,
    PackedString,
    Window,
    byte_codec,
    custom_codec,
    decode_window,
    dna_codec,
    pack,
)
from .search import PreprocessedPattern, SearchOutcome, preprocess, search
from .segments import Segment, SegmentAutomaton, SimStats, Transition, TransitionKind

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "ByteCodec",
    "DEFAULT_T_BUDGET",
    "MalformedEncodingError",
    "MpAutomaton",
    "NextTable",
    "PackedString",
    "PreprocessedPattern",
    "SearchOutcome",
    "Segment",
    "SegmentAutomaton",
    "SegmentDescription",
    "SimStats",
    "Transition",
    "TransitionKind",
    "Window",
    "byte_codec",
    "choose_r",
    "clear_table_registry",
    "custom_codec",
    "decode_segment",
    "decode_window",
    "describe_segment",
    "dna_codec",
    "encode_segment",
    "encoding_width",
    "get_table",
    "key_width",
    "naive_scan",
    "next_direct",
    "pack",
    "preprocess",
    "search",
    "search_baseline",
    "timed_search",
]
