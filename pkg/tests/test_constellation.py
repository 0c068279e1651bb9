"""Tests for constellation module."""

import math

import numpy as np
import pytest

from alphaeta_lab.constellation import (
    SystemParams,
    bit_at_index,
    constellation_table,
    demap_bit,
    map_angle,
    map_index,
    pol,
    wrap_angle,
)


@pytest.fixture
def params4():
    return SystemParams(M=4, S=1.0)


class TestSystemParams:
    """Test SystemParams."""

    def test_alpha(self):
        """Test alpha = sqrt(S)."""
        params = SystemParams(M=2048, S=40000)
        assert params.alpha == 200.0
        assert params.m == 11
        assert params.grid_size == 4096

    def test_even_non_power_of_two(self):
        """Test M = 2000 is accepted but has no bits per symbol."""
        params = SystemParams(M=2000, S=40000)
        assert not params.is_power_of_two
        with pytest.raises(ValueError):
            params.m

    @pytest.mark.parametrize("M", [0, 1, 3, 7, 2.5])
    def test_invalid_M(self, M):
        """Test odd or tiny M raises."""
        with pytest.raises(ValueError):
            SystemParams(M=M, S=1.0)

    @pytest.mark.parametrize("S", [-1.0, float("nan"), float("inf")])
    def test_invalid_S(self, S):
        """Test negative or non-finite S raises."""
        with pytest.raises(ValueError):
            SystemParams(M=4, S=S)

    def test_to_dict(self):
        """Test converting to dictionary."""
        assert SystemParams(M=16, S=4).to_dict() == {"M": 16, "S": 4.0}


class TestMapper:
    """Test the bit/basis mapper."""

    def test_pol(self):
        """Test parity of keystream symbols."""
        assert pol(0) == 0
        assert pol(7) == 1
        assert pol(2000) == 0

    @pytest.mark.parametrize(
        "x,z,index,angle",
        [
            (0, 0, 0, 0.0),
            (1, 0, 4, math.pi),
            (0, 3, 7, 7 * math.pi / 4),
            (1, 3, 3, 3 * math.pi / 4),
        ],
    )
    def test_hand_examples(self, params4, x, z, index, angle):
        """Test hand-evaluated mapper outputs at M = 4."""
        mapped = map_angle(x, z, params4)
        assert mapped.index == index
        assert mapped.radians == pytest.approx(angle)

    def test_symbol_out_of_range(self, params4):
        """Test z >= M raises."""
        with pytest.raises(ValueError):
            map_angle(0, 4, params4)

    def test_bit_out_of_range(self, params4):
        """Test x must be a bit."""
        with pytest.raises(ValueError):
            map_index(2, 0, params4)

    @pytest.mark.parametrize("M", [2, 4, 8, 16, 32, 64, 128, 256])
    def test_bijection(self, M):
        """Test (x, z) -> index is a bijection onto [0, 2M)."""
        params = SystemParams(M=M, S=1.0)
        z = np.tile(np.arange(M), 2)
        x = np.repeat([0, 1], M)
        indices = map_index(x, z, params)
        assert sorted(indices.tolist()) == list(range(2 * M))

    def test_antipodal(self):
        """Test bit 1 sits opposite bit 0 on every basis."""
        params = SystemParams(M=16, S=1.0)
        z = np.arange(16)
        zero = map_angle(np.zeros(16, dtype=int), z, params).radians
        one = map_angle(np.ones(16, dtype=int), z, params).radians
        assert np.allclose(wrap_angle(zero + math.pi), one)


class TestDemap:
    """Test demapping."""

    def test_examples(self, params4):
        """Test inverse of the hand examples."""
        assert demap_bit(0, 4, params4) == 1
        assert demap_bit(3, 3, params4) == 1

    def test_off_basis(self, params4):
        """Test an index not on the basis raises."""
        with pytest.raises(ValueError):
            demap_bit(1, 2, params4)

    def test_roundtrip(self):
        """Test demap(map(x, z)) = x for every pair."""
        params = SystemParams(M=32, S=1.0)
        for z in range(32):
            for x in (0, 1):
                assert demap_bit(z, map_index(x, z, params), params) == x


class TestBitAtIndex:
    """Test the interleaved bit assignment."""

    def test_enumeration_m4(self, params4):
        """Test bits around the M = 4 circle."""
        assert bit_at_index(np.arange(8), params4).tolist() == [0, 1, 0, 1, 1, 0, 1, 0]

    def test_antipode_of_zero(self):
        """Test l = M carries bit 1."""
        for M in (2, 8, 2000):
            assert bit_at_index(M, SystemParams(M=M, S=1.0)) == 1

    @pytest.mark.parametrize("M", [2, 4, 8, 16, 64, 256])
    def test_interleaving_with_seams(self, M):
        """Test neighbours differ except across the two seams."""
        params = SystemParams(M=M, S=1.0)
        l = np.arange(2 * M)
        bits = bit_at_index(l, params)
        same = np.flatnonzero(bits == bits[(l + 1) % (2 * M)])
        assert same.tolist() == [M - 1, 2 * M - 1]

    def test_matches_mapper(self):
        """Test bit_at_index agrees with the mapper everywhere."""
        params = SystemParams(M=16, S=1.0)
        for z in range(16):
            for x in (0, 1):
                assert bit_at_index(map_index(x, z, params), params) == x

    def test_out_of_range(self, params4):
        """Test indices beyond 2M raise."""
        with pytest.raises(ValueError):
            bit_at_index(8, params4)


class TestConstellationTable:
    """Test the constellation dump."""

    def test_rows(self, params4):
        """Test one row per grid point."""
        table = constellation_table(params4)
        assert len(table) == 8
        assert table[5] == {
            "index": 5,
            "angle_radians": pytest.approx(5 * math.pi / 4),
            "bit": 0,
            "basis": 1,
        }

    def test_wrap_angle(self):
        """Test wrapping into [0, 2 pi)."""
        assert wrap_angle(-0.5) == pytest.approx(2 * math.pi - 0.5)
        assert wrap_angle(2 * math.pi) == 0.0
