import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packsearch import (
    Alphabet,
    MalformedEncodingError,
    MpAutomaton,
    SegmentAutomaton,
    decode_segment,
    describe_segment,
    encode_segment,
    encoding_width,
    pack,
)
from packsearch.encoding import delta_stats, record_fields, record_layout

from conftest import packed, random_codes


def segments_of(codes, sigma, r):
    mp = MpAutomaton.build(pack(codes, Alphabet(sigma)))
    return SegmentAutomaton.build(mp, r)


class TestWidth:
    def test_r4_sigma4(self):
        assert encoding_width(4, 4) == 52

    def test_r2_sigma2(self):
        assert encoding_width(2, 2) == 26

    def test_monotone(self):
        widths_r = [encoding_width(r, 4) for r in (2, 4, 6, 8, 16)]
        assert widths_r == sorted(widths_r)
        widths_s = [encoding_width(4, s) for s in (1, 2, 4, 16, 256, 65536)]
        assert widths_s == sorted(widths_s)

    def test_linear_in_r_log_sigma(self):
        for r in range(2, 66, 2):
            for sigma in (1, 2, 3, 4, 16, 256, 65536):
                bound = 14 * r * max(1.0, math.log2(sigma))
                assert encoding_width(r, sigma) <= bound


class TestWorkedExample:
    def test_first_segment_fields(self):
        sa = segments_of([0, 1, 0, 1, 2, 0], 3, 4)  # ababca
        fields = record_fields(encode_segment(sa, 0), 4, 3)
        assert fields["size"] == 4
        assert fields["first_segment"] == 1
        assert fields["accepting"] == 0
        assert fields["heavy_present"] == 1 and fields["heavy_label"] == 1  # 'b'
        # light forward labels a, b, a
        assert fields["labels"] == (0 << 0) | (1 << 2) | (0 << 4)
        assert fields["light_fail_bitmap"] == 0b1110
        assert fields["first_fail"] == 0
        # deltas (0, 1): widths 1 and 2, so markers sit at bits 0 and 1
        assert fields["diff_starts"] == 0b11
        sum_abs, used = delta_stats(encode_segment(sa, 0), 4, 3)
        assert (sum_abs, used) == (1, 3)

    def test_first_segment_failure_map(self):
        sa = segments_of([0, 1, 0, 1, 2, 0], 3, 4)
        desc = decode_segment(encode_segment(sa, 0), 4, 3)
        assert desc.fail == (-1, 0, 0, 1)

    def test_last_segment_is_accepting(self):
        sa = segments_of([0, 1, 0, 1, 2, 0], 3, 4)
        fields = record_fields(encode_segment(sa, 2), 4, 3)
        assert fields["accepting"] == 1
        assert fields["heavy_present"] == 0

    def test_segment_without_light_failures(self):
        sa = segments_of([0, 1, 0, 1, 2, 0], 3, 4)
        fields = record_fields(encode_segment(sa, 2), 4, 3)  # states 4..6, all heavy
        assert fields["light_fail_bitmap"] == 0
        assert fields["first_fail"] == 0
        assert fields["diff_bits"] == 0 and fields["diff_starts"] == 0


class TestDecode:
    def test_all_zero_record_with_size_two(self):
        desc = decode_segment(2, 4, 4)  # only the size field set
        assert desc.size == 2
        assert desc.fail == (-1, -1)
        assert not desc.first_segment
        assert not desc.accepting
        assert desc.heavy_label is None
        assert desc.labels == (0,)

    def test_roundtrip_exhaustive_binary(self):
        checked = 0
        for m in range(1, 11):
            for bits in itertools.product((0, 1), repeat=m):
                for r in (2, 4):
                    if r > m + 1:
                        continue
                    sa = segments_of(list(bits), 2, r)
                    for i in range(sa.z):
                        rec = encode_segment(sa, i)
                        assert decode_segment(rec, r, 2) == describe_segment(sa, i)
                        checked += 1
        assert checked > 20_000

    @settings(max_examples=150, deadline=None)
    @given(
        sigma=st.sampled_from([2, 3, 4, 16, 256]),
        r=st.sampled_from([2, 4, 6, 8]),
        data=st.data(),
    )
    def test_roundtrip_random(self, sigma, r, data):
        m = data.draw(st.integers(max(1, r - 1), 48))
        codes = data.draw(st.lists(st.integers(0, sigma - 1), min_size=m, max_size=m))
        sa = segments_of(codes, sigma, r)
        for i in range(sa.z):
            rec = encode_segment(sa, i)
            assert decode_segment(rec, r, sigma) == describe_segment(sa, i)

    def test_delta_bounds_random(self):
        rng = random.Random(17)
        for _ in range(400):
            sigma = rng.choice([2, 4, 16])
            r = rng.choice([2, 4, 8, 16])
            m = rng.randint(max(1, r - 1), 96)
            sa = segments_of(random_codes(rng, sigma, m), sigma, r)
            for i in range(sa.z):
                sum_abs, used = delta_stats(encode_segment(sa, i), r, sigma)
                assert sum_abs <= 2 * r
                assert used <= 3 * r


class TestMalformed:
    LAY = record_layout(4, 4)

    def test_size_zero(self):
        with pytest.raises(MalformedEncodingError):
            decode_segment(0, 4, 4)

    def test_size_too_large(self):
        with pytest.raises(MalformedEncodingError):
            decode_segment(5, 4, 4)

    def test_extra_high_bits(self):
        with pytest.raises(MalformedEncodingError):
            decode_segment(1 << self.LAY.total, 4, 4)

    def test_root_cannot_have_light_failure(self):
        rec = 2 | (1 << self.LAY.off_accepting) | (1 << self.LAY.off_bitmap)
        with pytest.raises(MalformedEncodingError, match="state 0"):
            decode_segment(rec, 4, 4)

    def test_bitmap_past_size(self):
        rec = 2 | (1 << self.LAY.off_accepting) | (0b100 << self.LAY.off_bitmap)
        with pytest.raises(MalformedEncodingError, match="beyond"):
            decode_segment(rec, 4, 4)

    def test_label_tail_must_be_zero(self):
        rec = 2 | (1 << self.LAY.off_accepting) | (3 << (self.LAY.off_labels + 2))
        with pytest.raises(MalformedEncodingError, match="unused forward label"):
            decode_segment(rec, 4, 4)

    def test_heavy_label_needs_presence_bit(self):
        rec = 3 | (1 << self.LAY.off_heavy_label)
        with pytest.raises(MalformedEncodingError, match="presence"):
            decode_segment(rec, 4, 4)

    def test_failure_target_range(self):
        lay = self.LAY
        # size 4, state 1 marked with first target 2 >= its own index
        rec = 4 | (0b0010 << lay.off_bitmap) | (2 << lay.off_first_fail)
        with pytest.raises(MalformedEncodingError, match="invalid for state 1"):
            decode_segment(rec, 4, 4)

    def test_marker_count_mismatch(self):
        lay = self.LAY
        # two light-failure states but no delta marker
        rec = 4 | (0b0110 << lay.off_bitmap)
        with pytest.raises(MalformedEncodingError, match="delta markers"):
            decode_segment(rec, 4, 4)

    def test_nonzero_failure_fields_without_states(self):
        rec = 2 | (1 << self.LAY.off_first_fail)
        with pytest.raises(MalformedEncodingError, match="must be zero"):
            decode_segment(rec, 4, 4)

    def test_non_canonical_delta_width(self):
        lay = self.LAY
        # states 1,2,3 light with targets 0,0,0: deltas (0,0) need 1 bit each,
        # markers at bits 0 and 2 would store the first delta in 2 bits
        rec = 4 | (0b1110 << lay.off_bitmap) | (0b101 << lay.off_diff_starts)
        with pytest.raises(MalformedEncodingError, match="stored in 2 bits"):
            decode_segment(rec, 4, 4)

    def test_negative_tail_is_sign_extended(self):
        # delta sequence ending in a negative number: the tail of the delta
        # field carries the sign, and decode still restores the map exactly
        codes = [0, 1, 0, 0, 1, 0, 1, 0]
        sa = segments_of(codes, 2, 4)
        for i in range(sa.z):
            rec = encode_segment(sa, i)
            desc = describe_segment(sa, i)
            assert decode_segment(rec, 4, 2) == desc
