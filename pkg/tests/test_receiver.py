"""Tests for receiver module."""

import math

import numpy as np
import pytest

from alphaeta_lab.constellation import SystemParams
from alphaeta_lab.keystream import LfsrExpander, LfsrSpec, SeedKey, keystream_symbols
from alphaeta_lab.receiver import (
    CipherFrame,
    binomial_interval,
    bob_ber_analytic,
    bob_ber_helstrom,
    bob_decide,
    encrypt,
    encrypt_symbols,
    perturb_angles,
    receive,
    roundtrip_ber,
)
from alphaeta_lab.seeding import derive_rng


@pytest.fixture
def spec4():
    return LfsrSpec(4, (0, 1))


class TestEncrypt:
    """Test encryption into a cipher frame."""

    def test_empty(self, spec4):
        """Test n = 0 gives an empty frame."""
        frame = encrypt("", SeedKey((1, 0, 0, 0)), spec4, SystemParams(4, 1.0))
        assert frame.n == 0

    def test_zero_seed(self, spec4):
        """Test the all-zero seed keeps every slot on basis 0."""
        frame = encrypt("010", SeedKey((0, 0, 0, 0)), spec4, SystemParams(4, 1.0))
        assert frame.angles == pytest.approx([0.0, math.pi, 0.0])

    def test_hand_composition(self, spec4):
        """Test keystream bits 10 00 ... give Z = (2, 0) and angles (3 pi/2, pi)."""
        frame = encrypt("11", SeedKey((1, 0, 0, 0)), spec4, SystemParams(4, 1.0))
        assert frame.indices.tolist() == [6, 4]
        assert frame.angles == pytest.approx([1.5 * math.pi, math.pi])

    def test_deterministic(self):
        """Test encryption has no hidden randomness."""
        spec = LfsrSpec.primitive(16)
        seed = SeedKey.from_int(12345, 16)
        params = SystemParams(16, 4.0)
        a = encrypt("0110100110010110", seed, spec, params)
        b = encrypt("0110100110010110", seed, spec, params)
        assert np.array_equal(a.angles, b.angles)

    def test_shape_mismatch(self):
        """Test plaintext and keystream must align."""
        with pytest.raises(ValueError):
            encrypt_symbols([0, 1], np.array([0, 1, 2]), SystemParams(4, 1.0))

    def test_frame_shapes(self):
        """Test indices and angles must agree in shape."""
        with pytest.raises(ValueError):
            CipherFrame(angles=np.zeros(3), indices=np.zeros(2))


class TestBobDecide:
    """Test Bob's per-slot decision."""

    def test_even_basis(self):
        """Test a positive outcome on an even basis decides 0."""
        assert bob_decide(2, 2.0, SystemParams(4, 4.0)) == 0

    def test_odd_basis(self):
        """Test a positive outcome on an odd basis decides 1."""
        assert bob_decide(3, 2.0, SystemParams(4, 4.0)) == 1

    def test_negative(self):
        """Test a negative outcome flips the decision."""
        assert bob_decide(2, -0.1, SystemParams(4, 4.0)) == 1
        assert bob_decide(3, -0.1, SystemParams(4, 4.0)) == 0

    def test_tie(self):
        """Test a zero outcome decides pol(z)."""
        assert bob_decide(1, 0.0, SystemParams(4, 4.0)) == 1
        assert bob_decide(0, 0.0, SystemParams(4, 4.0)) == 0

    def test_vectorised(self):
        """Test arrays of symbols and outcomes."""
        out = bob_decide(np.array([0, 1, 2, 3]), np.array([1.0, 1.0, -1.0, -1.0]), SystemParams(4, 1.0))
        assert out.tolist() == [0, 1, 1, 0]


class TestNoiselessReception:
    """Test decryption with outcomes replaced by their means."""

    @pytest.mark.parametrize("M", [2, 4, 16])
    def test_exhaustive(self, M):
        """Test every 8-bit seed decrypts a random plaintext exactly."""
        spec = LfsrSpec.primitive(8)
        params = SystemParams(M, 1.0)
        rng = np.random.default_rng(M)
        expander = LfsrExpander(spec)
        for value in range(256):
            seed = SeedKey.from_int(value, 8)
            x = rng.integers(0, 2, size=12)
            frame = encrypt(x.tolist(), seed, spec, params)
            z = keystream_symbols(expander, seed, 12, M)
            assert np.array_equal(receive(frame, z, params, noiseless=True), x)

    def test_requires_rng(self, spec4):
        """Test noisy reception needs a random stream."""
        frame = encrypt("01", SeedKey((1, 0, 0, 0)), spec4, SystemParams(4, 1.0))
        with pytest.raises(ValueError):
            receive(frame, np.array([2, 0]), SystemParams(4, 1.0))

    def test_length_mismatch(self, spec4):
        """Test the keystream must cover the frame."""
        frame = encrypt("01", SeedKey((1, 0, 0, 0)), spec4, SystemParams(4, 1.0))
        with pytest.raises(ValueError):
            receive(frame, np.array([2]), SystemParams(4, 1.0), noiseless=True)


class TestAnalyticBer:
    """Test the closed-form receiver error."""

    @pytest.mark.parametrize("S,expected", [(0.0, 0.5), (1.0, 0.02275), (0.25, 0.15866)])
    def test_values(self, S, expected):
        """Test Q(2 sqrt(S)) at table points."""
        assert bob_ber_analytic(SystemParams(2, S)) == pytest.approx(expected, abs=1e-5)

    def test_operating_point(self):
        """Test the error is below 1e-300 at S = 40000."""
        assert bob_ber_analytic(SystemParams(2000, 40000)) < 1e-300

    def test_helstrom_below_homodyne(self):
        """Test the optimal receiver never does worse."""
        for S in (0.1, 0.5, 2.0):
            params = SystemParams(2, S)
            assert bob_ber_helstrom(params) <= bob_ber_analytic(params)


class TestBinomialInterval:
    """Test the BER interval."""

    def test_interval(self):
        """Test the 95% interval brackets the estimate."""
        est = binomial_interval(50, 10000)
        assert est.ber == 0.005
        assert est.ci_low < 0.005 < est.ci_high
        assert est.ci_high - est.ci_low == pytest.approx(2 * 1.96 * est.sigma, rel=1e-3)

    def test_zero_errors(self):
        """Test zero errors give a degenerate interval at 0."""
        est = binomial_interval(0, 1000000)
        assert (est.ci_low, est.ci_high) == (0.0, 0.0)

    def test_small_sample_warning(self, caplog):
        """Test a warning below 1000 trials."""
        with caplog.at_level("WARNING"):
            binomial_interval(3, 100)
        assert "unreliable" in caplog.text

    def test_no_trials(self):
        """Test zero trials raises."""
        with pytest.raises(ValueError):
            binomial_interval(0, 0)


class TestRoundtripBer:
    """Test Monte Carlo round trips."""

    def test_vacuum(self):
        """Test S = 0 gives a coin flip."""
        est = roundtrip_ber(SystemParams(16, 0.0), LfsrSpec.primitive(16), 10000, derive_rng(0, "t"))
        assert abs(est.ber - 0.5) < 0.02

    @pytest.mark.parametrize("S", [0.25, 1.0, 4.0])
    def test_matches_analytic(self, S):
        """Test agreement with Q(2 sqrt(S)) within 3 sigma."""
        params = SystemParams(16, S)
        est = roundtrip_ber(params, LfsrSpec.primitive(16), 100000, derive_rng(1, f"cal-{S}"))
        expected = bob_ber_analytic(params)
        sigma = math.sqrt(expected * (1 - expected) / 100000)
        assert abs(est.ber - expected) < 3 * sigma

    def test_operating_point(self):
        """Test no errors at M = 2000, S = 40000 over 10^6 slots."""
        est = roundtrip_ber(SystemParams(2000, 40000), None, 1000000, derive_rng(2, "op"))
        assert est.errors == 0

    def test_plaintext_independent(self):
        """Test all-zero and random plaintexts give the same error rate."""
        params = SystemParams(16, 1.0)
        spec = LfsrSpec.primitive(16)
        a = roundtrip_ber(params, spec, 100000, derive_rng(3, "a"), plaintext="random")
        b = roundtrip_ber(params, spec, 100000, derive_rng(3, "b"), plaintext="zeros")
        assert abs(a.ber - b.ber) < 4 * math.sqrt(a.sigma**2 + b.sigma**2)

    def test_reproducible(self):
        """Test a fixed stream reproduces the count."""
        params = SystemParams(16, 1.0)
        spec = LfsrSpec.primitive(16)
        a = roundtrip_ber(params, spec, 50000, derive_rng(4, "r"))
        b = roundtrip_ber(params, spec, 50000, derive_rng(4, "r"))
        assert a == b

    def test_worker_count_invariant(self):
        """Test the count does not depend on the thread pool size."""
        params = SystemParams(16, 1.0)
        spec = LfsrSpec.primitive(16)
        a = roundtrip_ber(params, spec, 200000, derive_rng(5, "w"), workers=1)
        b = roundtrip_ber(params, spec, 200000, derive_rng(5, "w"), workers=4)
        assert a.errors == b.errors

    def test_bad_plaintext_policy(self):
        """Test unknown plaintext policies raise."""
        with pytest.raises(ValueError):
            roundtrip_ber(SystemParams(4, 1.0), None, 10, derive_rng(0, "x"), plaintext="ones")

    def test_randomizer_hook(self):
        """Test a quarter-turn randomiser destroys Bob's decision."""

        def quarter_turn(frame, rng):
            return perturb_angles(frame, np.full(frame.n, math.pi / 2))

        est = roundtrip_ber(
            SystemParams(16, 100.0), None, 20000, derive_rng(6, "q"), randomizer=quarter_turn
        )
        assert abs(est.ber - 0.5) < 0.03


class TestPerturbAngles:
    """Test frame perturbation."""

    def test_off_grid(self):
        """Test perturbed frames drop their grid indices."""
        frame = encrypt_symbols([0, 1], np.array([0, 1]), SystemParams(4, 1.0))
        moved = perturb_angles(frame, np.array([0.1, -0.1]))
        assert not moved.on_grid
        assert moved.angles[0] == pytest.approx(0.1)
