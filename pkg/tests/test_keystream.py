"""Tests for keystream module."""

import numpy as np
import pytest

from alphaeta_lab.keystream import (
    FilteredLfsrExpander,
    Gf2LinearForm,
    LfsrExpander,
    LfsrSpec,
    SeedKey,
    advance_state,
    bits_per_symbol,
    chunk_symbols,
    format_bits,
    keystream_symbols,
    lfsr_expand,
    lfsr_expand_many,
    linear_form_matrix,
    make_expander,
    nonlinear_filter,
    parse_bits,
    rewind_state,
    seed_matrix,
    symbol_linear_forms,
)


@pytest.fixture
def spec4():
    """x^4 + x + 1 register."""
    return LfsrSpec(4, (0, 1))


class TestBits:
    """Test bit parsing helpers."""

    def test_parse_string(self):
        """Test ASCII 0/1 parsing keeps the first character first."""
        assert parse_bits("0110").tolist() == [0, 1, 1, 0]

    def test_parse_rejects_other_characters(self):
        """Test non-binary characters raise."""
        with pytest.raises(ValueError):
            parse_bits("0120")

    def test_format_roundtrip(self):
        """Test formatting back to a string."""
        assert format_bits(parse_bits("100101")) == "100101"

    def test_bits_per_symbol(self):
        """Test m = log2(M)."""
        assert bits_per_symbol(2) == 1
        assert bits_per_symbol(2048) == 11

    def test_bits_per_symbol_rejects_non_power_of_two(self):
        """Test M = 2000 is rejected for chunking."""
        with pytest.raises(ValueError):
            bits_per_symbol(2000)


class TestSeedKey:
    """Test SeedKey."""

    def test_from_int(self):
        """Test bit j of the integer is s_j."""
        assert SeedKey.from_int(5, 4).bits == (1, 0, 1, 0)
        assert SeedKey.from_int(5, 4).to_int() == 5

    def test_from_string(self):
        """Test the first character is s_0."""
        seed = SeedKey.from_string("1000")
        assert seed.bits[0] == 1
        assert seed.to_int() == 1
        assert seed.to_string() == "1000"

    def test_too_short(self):
        """Test seeds need at least two bits."""
        with pytest.raises(ValueError):
            SeedKey((1,))

    def test_all_zero_is_legal(self):
        """Test the all-zero key is accepted."""
        assert SeedKey.from_int(0, 8).to_int() == 0

    def test_random_is_reproducible(self):
        """Test random keys follow the generator."""
        a = SeedKey.random(16, np.random.default_rng(3))
        b = SeedKey.random(16, np.random.default_rng(3))
        assert a == b
        assert a.length == 16


class TestLfsrSpec:
    """Test LfsrSpec."""

    def test_taps_sorted(self):
        """Test taps are normalised."""
        assert LfsrSpec(5, (2, 0)).taps == (0, 2)

    def test_tap_out_of_range(self):
        """Test taps must lie below the length."""
        with pytest.raises(ValueError):
            LfsrSpec(4, (0, 4))

    def test_empty_taps(self):
        """Test taps must be nonempty."""
        with pytest.raises(ValueError):
            LfsrSpec(4, ())

    def test_unknown_primitive(self):
        """Test lengths without tabulated taps raise."""
        with pytest.raises(ValueError):
            LfsrSpec.primitive(13)


class TestLfsrExpand:
    """Test register expansion."""

    def test_all_zero_seed(self, spec4):
        """Test the zero state is a fixed point."""
        assert lfsr_expand(SeedKey.from_int(0, 4), spec4, 8).tolist() == [0] * 8

    def test_first_output_is_s0(self, spec4):
        """Test the first output bit is cell 0 of the seed."""
        assert lfsr_expand(SeedKey((1, 0, 0, 0)), spec4, 4)[0] == 1

    def test_hand_simulation(self, spec4):
        """Test a hand-simulated run of x^4 + x + 1."""
        bits = lfsr_expand(SeedKey((1, 0, 0, 0)), spec4, 16)
        assert format_bits(bits) == "1000100110101111"

    def test_period_fifteen(self, spec4):
        """Test x^4 + x + 1 has period 15 from any nonzero seed."""
        for value in range(1, 16):
            bits = lfsr_expand(SeedKey.from_int(value, 4), spec4, 45)
            assert np.array_equal(bits[:15], bits[15:30])
            assert np.array_equal(bits[:15], bits[30:45])

    @pytest.mark.parametrize("length", [3, 4, 5, 8])
    def test_primitive_taps_are_maximal(self, length):
        """Test primitive taps visit every nonzero state."""
        spec = LfsrSpec.primitive(length)
        period = 2**length - 1
        bits = lfsr_expand(SeedKey.from_int(1, length), spec, period + length)
        states = {tuple(bits[t:t + length]) for t in range(period)}
        assert len(states) == period
        assert np.array_equal(bits[:length], bits[period:period + length])

    def test_length_mismatch(self, spec4):
        """Test seed and register length must agree."""
        with pytest.raises(ValueError):
            lfsr_expand(SeedKey.from_int(1, 5), spec4, 8)

    def test_short_output(self, spec4):
        """Test fewer bits than the register length."""
        assert lfsr_expand(SeedKey((1, 1, 0, 0)), spec4, 2).tolist() == [1, 1]
        assert lfsr_expand(SeedKey((1, 1, 0, 0)), spec4, 0).size == 0

    def test_linearity(self):
        """Test expansion is linear over GF(2)."""
        spec = LfsrSpec.primitive(16)
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = SeedKey.random(16, rng)
            b = SeedKey.random(16, rng)
            ab = SeedKey(tuple(a.as_array() ^ b.as_array()))
            expected = lfsr_expand(a, spec, 200) ^ lfsr_expand(b, spec, 200)
            assert np.array_equal(lfsr_expand(ab, spec, 200), expected)

    def test_batch_matches_single(self):
        """Test batched expansion row by row."""
        spec = LfsrSpec.primitive(8)
        seeds = seed_matrix(0, 256, 8)
        batch = lfsr_expand_many(seeds, spec, 64)
        for value in (0, 1, 37, 255):
            assert np.array_equal(batch[value], lfsr_expand(SeedKey.from_int(value, 8), spec, 64))

    def test_seed_matrix_bit_order(self):
        """Test column j of the seed matrix is s_j."""
        assert seed_matrix(5, 1, 4).tolist() == [[1, 0, 1, 0]]


class TestChunkSymbols:
    """Test chunking into keystream symbols."""

    def test_msb_first(self):
        """Test the first bit is most significant."""
        assert chunk_symbols("0110", 4).tolist() == [1, 2]

    def test_single_symbol(self):
        """Test three bits at M = 8."""
        assert chunk_symbols("111", 8).tolist() == [7]

    def test_remainder_error(self):
        """Test a trailing remainder raises."""
        with pytest.raises(ValueError):
            chunk_symbols("10100", 4)

    def test_non_power_of_two(self):
        """Test non power-of-two M raises."""
        with pytest.raises(ValueError):
            chunk_symbols("0110", 6)

    def test_batch_axis(self):
        """Test chunking along the last axis of a batch."""
        bits = np.array([[1, 0, 0, 1], [0, 1, 1, 1]])
        assert chunk_symbols(bits, 4).tolist() == [[2, 1], [1, 3]]

    def test_array_values_checked(self):
        """Test array input with a value other than 0 or 1 raises."""
        with pytest.raises(ValueError):
            chunk_symbols(np.array([2, 0]), 4)
        with pytest.raises(ValueError):
            chunk_symbols([[0, 1], [1, -1]], 4)

    def test_bool_array(self):
        """Test boolean bit arrays chunk like integers."""
        assert chunk_symbols(np.array([True, False, False, True]), 4).tolist() == [2, 1]


class TestLinearForms:
    """Test GF(2) linear forms of the seed."""

    def test_first_rows_identity(self):
        """Test the first L output bits are the seed cells."""
        spec = LfsrSpec.primitive(10)
        assert np.array_equal(linear_form_matrix(spec, 10), np.eye(10, dtype=np.uint8))

    def test_first_symbol_forms(self, spec4):
        """Test slot 1 forms select s_0 and s_1."""
        forms = symbol_linear_forms(spec4, 1, 4)
        assert forms[0].coefficients == (1, 0, 0, 0)
        assert forms[1].coefficients == (0, 1, 0, 0)
        assert all(f.constant == 0 for f in forms)

    def test_zero_seed(self, spec4):
        """Test every form vanishes on the zero seed."""
        zero = SeedKey.from_int(0, 4)
        for i in range(1, 6):
            assert all(f.evaluate(zero) == 0 for f in symbol_linear_forms(spec4, i, 4))

    def test_random_seeds_slot_three(self, spec4):
        """Test slot 3 forms against brute-force expansion."""
        rng = np.random.default_rng(5)
        forms = symbol_linear_forms(spec4, 3, 4)
        for _ in range(100):
            seed = SeedKey.random(4, rng)
            bits = lfsr_expand(seed, spec4, 6)
            assert [f.evaluate(seed) for f in forms] == bits[4:6].tolist()

    def test_exhaustive_against_expansion(self):
        """Test forms agree with expansion on all 2^L seeds."""
        spec = LfsrSpec.primitive(10)
        M, slots = 16, 6
        matrix = linear_form_matrix(spec, slots * 4)
        seeds = seed_matrix(0, 2**10, 10)
        predicted = (seeds.astype(np.int64) @ matrix.T.astype(np.int64)) % 2
        assert np.array_equal(predicted, lfsr_expand_many(seeds, spec, slots * 4))
        symbols = chunk_symbols(predicted, M)
        assert np.array_equal(symbols, chunk_symbols(lfsr_expand_many(seeds, spec, slots * 4), M))

    def test_slot_index_is_one_based(self, spec4):
        """Test slot 0 is rejected."""
        with pytest.raises(ValueError):
            symbol_linear_forms(spec4, 0, 4)

    def test_evaluate_length_mismatch(self):
        """Test evaluating a form on a seed of the wrong length."""
        with pytest.raises(ValueError):
            Gf2LinearForm((1, 0, 1)).evaluate(SeedKey.from_int(1, 4))


class TestNonlinearFilter:
    """Test the nonlinear output filter."""

    def test_all_zero(self):
        """Test zeros stay zeros."""
        assert nonlinear_filter("000000").tolist() == [0, 0, 0, 0]

    def test_all_ones(self):
        """Test ones map to zeros."""
        assert nonlinear_filter("11111").tolist() == [0, 0, 0]

    def test_hand_evaluation(self):
        """Test 10110 -> 111."""
        assert nonlinear_filter("10110").tolist() == [1, 1, 1]

    def test_too_short(self):
        """Test inputs shorter than the window raise."""
        with pytest.raises(ValueError):
            nonlinear_filter("10")

    def test_filtered_expander_is_nonlinear(self):
        """Test the filtered expander fails the linearity check."""
        expander = FilteredLfsrExpander(LfsrSpec.primitive(16))
        rng = np.random.default_rng(2)
        mismatches = 0
        for _ in range(100):
            a = SeedKey.random(16, rng)
            b = SeedKey.random(16, rng)
            ab = SeedKey(tuple(a.as_array() ^ b.as_array()))
            if not np.array_equal(expander.expand(ab, 64), expander.expand(a, 64) ^ expander.expand(b, 64)):
                mismatches += 1
        assert mismatches >= 1

    def test_filtered_expander_without_warmup(self, spec4):
        """Test warmup 0 is the filter applied to the raw register output."""
        seed = SeedKey((1, 0, 1, 1))
        expander = FilteredLfsrExpander(spec4, window=3, warmup=0)
        raw = lfsr_expand(seed, spec4, 22)
        assert np.array_equal(expander.expand(seed, 20), nonlinear_filter(raw))

    def test_filtered_expander_skips_warmup(self, spec4):
        """Test the default warmup discards one register length."""
        seed = SeedKey((1, 0, 1, 1))
        raw = lfsr_expand(seed, spec4, 26)
        assert np.array_equal(FilteredLfsrExpander(spec4).expand(seed, 20), nonlinear_filter(raw[4:]))

    def test_filtered_expander_is_warmup_state_filtered(self):
        """Test the filtered output equals a warmup-0 expander started from the advanced state."""
        spec = LfsrSpec.primitive(16)
        seed = SeedKey.from_int(40503, 16)
        state = advance_state(seed, spec, 16)
        assert np.array_equal(
            FilteredLfsrExpander(spec).expand(seed, 64),
            FilteredLfsrExpander(spec, warmup=0).expand(state, 64),
        )


class TestRegisterState:
    """Test advancing and rewinding the register."""

    def test_advance_hand_value(self, spec4):
        """Test four clocks from 1000 give the output window 1001."""
        assert advance_state(SeedKey.from_string("1000"), spec4, 4) == SeedKey.from_string("1001")

    def test_advance_zero(self, spec4):
        """Test zero clocks leave the state unchanged."""
        seed = SeedKey.from_string("1011")
        assert advance_state(seed, spec4, 0) == seed
        assert rewind_state(seed, spec4, 0) == seed

    def test_rewind_hand_value(self, spec4):
        """Test rewinding 1001 by four clocks returns 1000."""
        assert rewind_state(SeedKey.from_string("1001"), spec4, 4) == SeedKey.from_string("1000")

    @pytest.mark.parametrize("clocks", [1, 16, 37])
    def test_rewind_inverts_advance(self, clocks):
        """Test rewind undoes advance on a primitive register."""
        spec = LfsrSpec.primitive(16)
        rng = np.random.default_rng(clocks)
        for _ in range(5):
            seed = SeedKey.random(16, rng)
            assert rewind_state(advance_state(seed, spec, clocks), spec, clocks) == seed

    def test_advance_continues_output(self, spec4):
        """Test the advanced state expands to the shifted output."""
        seed = SeedKey.from_string("1011")
        state = advance_state(seed, spec4, 5)
        assert np.array_equal(lfsr_expand(state, spec4, 20), lfsr_expand(seed, spec4, 25)[5:])

    def test_rewind_needs_tap_zero(self):
        """Test a register without tap 0 cannot be rewound."""
        with pytest.raises(ValueError):
            rewind_state(SeedKey.from_string("1001"), LfsrSpec(4, (1,)), 1)

    def test_negative_clocks(self, spec4):
        """Test negative clock counts raise."""
        seed = SeedKey.from_string("1001")
        with pytest.raises(ValueError):
            advance_state(seed, spec4, -1)
        with pytest.raises(ValueError):
            rewind_state(seed, spec4, -1)


class TestExpanders:
    """Test expander selection."""

    def test_make_expander(self, spec4):
        """Test configuration picks the expander class."""
        assert make_expander(spec4).linear is True
        assert make_expander(spec4, nonlinear=True).linear is False

    def test_describe(self, spec4):
        """Test expander descriptions."""
        assert LfsrExpander(spec4).describe() == {"kind": "lfsr", "length": 4, "taps": [0, 1]}
        assert FilteredLfsrExpander(spec4).describe()["warmup"] == 4

    def test_keystream_symbols(self, spec4):
        """Test symbol extraction from an expander."""
        symbols = keystream_symbols(LfsrExpander(spec4), SeedKey((1, 0, 0, 0)), 4, 16)
        assert symbols.tolist() == [8, 9, 10, 15]
