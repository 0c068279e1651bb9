"""Tests for jointattack module."""

import math

import numpy as np
import pytest
from scipy import linalg

from alphaeta_lab.constellation import SystemParams
from alphaeta_lab.errors import GuardViolation, NumericalError
from alphaeta_lab.jointattack import (
    GramMatrix,
    PeCurve,
    build_gram,
    gram_from_indices,
    make_plaintext,
    pe_vs_n,
    read_gram,
    srm_error,
    write_gram,
)
from alphaeta_lab.keystream import LfsrSpec
from alphaeta_lab.measurement import coherent_overlap, helstrom_binary_error


def overlap_gram(angles, params):
    """Gram matrix of product states from pairwise coherent overlaps."""
    a = np.asarray(angles, dtype=np.float64)
    return np.prod(coherent_overlap(a[:, None, :], a[None, :, :], params), axis=2)


class TestGram:
    """Test Gram matrix construction."""

    def test_empty_product(self):
        """Test n = 0 gives the all-ones matrix."""
        gram = build_gram("", LfsrSpec.primitive(4), SystemParams(4, 1.0))
        assert gram.N == 16
        assert np.allclose(gram.matrix, 1.0)

    def test_single_overlap(self):
        """Test two one-slot states reproduce the coherent overlap."""
        params = SystemParams(4, 0.5)
        g = gram_from_indices(np.array([[0], [1]]), params)
        expected = coherent_overlap(0.0, math.pi / 4, params)
        assert g[0, 1] == pytest.approx(expected, abs=1e-14)
        assert g[1, 0] == pytest.approx(np.conj(expected), abs=1e-14)

    def test_duplicate_states(self):
        """Test identical index rows give identical Gram rows."""
        g = gram_from_indices(np.array([[2, 5], [2, 5], [1, 0]]), SystemParams(4, 1.0))
        assert np.allclose(g[0], g[1])
        assert np.linalg.matrix_rank(g) == 2

    def test_properties(self):
        """Test Hermitian, unit diagonal and positive semidefinite."""
        gram = build_gram("0110", LfsrSpec.primitive(6), SystemParams(8, 1.0))
        g = gram.matrix
        assert np.max(np.abs(g - g.conj().T)) <= 1e-12
        assert np.allclose(np.diag(g), 1.0, atol=1e-12)
        assert np.linalg.eigvalsh(g).min() > -1e-10

    def test_matches_pairwise_overlaps(self):
        """Test the index builder agrees with products of coherent overlaps."""
        params = SystemParams(8, 2.0)
        indices = np.array([[0, 3], [7, 12], [9, 1]])
        by_angle = overlap_gram(indices * math.pi / 8, params)
        assert np.allclose(by_angle, gram_from_indices(indices, params))

    def test_guard(self):
        """Test |K| above the guard needs an override."""
        with pytest.raises(GuardViolation):
            build_gram("0", LfsrSpec.primitive(10), SystemParams(4, 1.0), guard=8)

    def test_validate(self):
        """Test a non-Hermitian matrix fails validation."""
        bad = GramMatrix(np.array([[1.0, 0.5], [0.2, 1.0]], dtype=complex), SystemParams(2, 1.0), 1)
        with pytest.raises(NumericalError) as excinfo:
            bad.validate()
        assert excinfo.value.diagnostics["max_asymmetry"] == pytest.approx(0.3)


class TestSrmError:
    """Test the square-root measurement error."""

    def test_identical_states(self):
        """Test the all-ones 2x2 matrix gives 1/2."""
        assert srm_error(np.ones((2, 2))) == pytest.approx(0.5)

    def test_orthogonal_states(self):
        """Test the identity gives 0."""
        assert srm_error(np.eye(5)) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("s", [0.0, 0.3, 0.9, 0.999])
    def test_two_state_closed_form(self, s):
        """Test a real 2x2 overlap s gives (1 - sqrt(1 - s^2)) / 2."""
        g = np.array([[1.0, s], [s, 1.0]])
        assert srm_error(g) == pytest.approx(0.5 * (1 - math.sqrt(1 - s * s)), abs=1e-12)

    @pytest.mark.parametrize("S", [0.1, 1.0, 10.0])
    def test_matches_helstrom(self, S):
        """Test antipodal coherent states reach the Helstrom error."""
        params = SystemParams(2, S)
        g = overlap_gram(np.array([[0.0], [math.pi]]), params)
        assert abs(srm_error(g) - helstrom_binary_error(params)) < 1e-10

    def test_four_states_against_sqrtm(self):
        """Test |K| = 2, n = 1 against scipy's matrix square root."""
        gram = build_gram("1", LfsrSpec(2, (0,)), SystemParams(4, 1.0))
        root = linalg.sqrtm(gram.matrix)
        expected = 1 - np.mean(np.abs(np.diag(root)) ** 2)
        assert srm_error(gram) == pytest.approx(expected, abs=1e-10)

    def test_permutation_invariant(self):
        """Test reordering the seeds leaves the error unchanged."""
        gram = build_gram("0101101", LfsrSpec.primitive(6), SystemParams(8, 1.0))
        order = np.random.default_rng(0).permutation(gram.N)
        assert srm_error(gram.permuted(order)) == pytest.approx(srm_error(gram), abs=1e-10)

    def test_duplicate_lower_bound(self):
        """Test k identical states cost at least (k - 1) / N."""
        g = gram_from_indices(np.array([[0], [0], [0], [5]]), SystemParams(4, 9.0))
        assert srm_error(g) >= 2 / 4 - 1e-12

    def test_not_psd(self):
        """Test a negative eigenvalue raises with diagnostics."""
        with pytest.raises(NumericalError) as excinfo:
            srm_error(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert excinfo.value.diagnostics["min_eigenvalue"] == pytest.approx(-1.0)

    def test_empty(self):
        """Test an empty matrix raises."""
        with pytest.raises(ValueError):
            srm_error(np.zeros((0, 0)))


class TestPeVsN:
    """Test the error-versus-length curve."""

    def test_no_data(self):
        """Test n = 0 gives 1 - 1/N."""
        curve = pe_vs_n(LfsrSpec.primitive(6), SystemParams(8, 1.0), [0])
        assert curve.rows[0][1] == pytest.approx(1 - 1 / 64, abs=1e-12)

    def test_desk_scale_decay(self):
        """Test |K| = 8, M = 16, S = 4 drops below 1e-3 by n = 64."""
        n_values = [0, 1, 2, 4, 8, 16, 32, 64]
        curve = pe_vs_n(LfsrSpec.primitive(8), SystemParams(16, 4.0), n_values)
        assert [n for n, _ in curve.rows] == n_values
        assert curve.is_monotone()
        assert dict(curve.rows)[64] < 1e-3
        assert curve.first_below(1e-3) <= 64
        assert curve.metadata["N"] == 256

    def test_fixed_random_plaintext(self):
        """Test a seeded random plaintext gives a monotone curve too."""
        curve = pe_vs_n(
            LfsrSpec.primitive(6),
            SystemParams(8, 1.0),
            [0, 4, 16, 32],
            plaintext_policy="fixed_random",
            rng=np.random.default_rng(1),
        )
        assert curve.is_monotone()
        assert curve.metadata["plaintext_policy"] == "fixed_random"

    def test_gram_sink(self):
        """Test the sink receives the Gram matrix of the longest frame."""
        seen = []
        pe_vs_n(LfsrSpec.primitive(4), SystemParams(4, 1.0), [0, 3, 6], gram_sink=seen.append)
        assert len(seen) == 1
        assert seen[0].n == 6

    def test_progress_callback(self):
        """Test one callback per data length."""
        calls = []
        pe_vs_n(
            LfsrSpec.primitive(4),
            SystemParams(4, 1.0),
            [0, 2],
            progress_callback=lambda c, t, label: calls.append(label),
        )
        assert calls == ["n=0", "n=2"]

    def test_negative_length(self):
        """Test negative data lengths raise."""
        with pytest.raises(ValueError):
            pe_vs_n(LfsrSpec.primitive(4), SystemParams(4, 1.0), [-1])

    def test_curve_helpers(self):
        """Test monotonicity and threshold lookups on a hand curve."""
        curve = PeCurve(rows=[(0, 0.5), (4, 0.1), (8, 0.2)])
        assert not curve.is_monotone()
        assert curve.first_below(0.15) == 4
        assert curve.first_below(0.01) is None


class TestPlaintext:
    """Test plaintext policies."""

    def test_all_zeros(self):
        """Test the all-zeros policy."""
        assert make_plaintext("all_zeros", 3).tolist() == [0, 0, 0]

    def test_fixed_random_needs_rng(self):
        """Test fixed_random without a stream raises."""
        with pytest.raises(ValueError):
            make_plaintext("fixed_random", 3)

    def test_unknown(self):
        """Test unknown policies raise."""
        with pytest.raises(ValueError):
            make_plaintext("ones", 3)


class TestGramDump:
    """Test the binary Gram dump."""

    def test_write_read(self, tmp_path):
        """Test a dump reloads with its header fields."""
        gram = build_gram("011", LfsrSpec.primitive(4), SystemParams(4, 2.0))
        path = write_gram(tmp_path / "gram.bin", gram)
        assert path.stat().st_size == 40 + 16 * 16 * 16
        loaded = read_gram(path)
        assert np.array_equal(loaded.matrix, gram.matrix)
        assert loaded.n == 3
        assert loaded.params == gram.params

    def test_bad_magic(self, tmp_path):
        """Test a foreign file is rejected."""
        path = tmp_path / "other.bin"
        path.write_bytes(b"NOTAGRAM" + bytes(32))
        with pytest.raises(ValueError, match="magic"):
            read_gram(path)

    def test_truncated(self, tmp_path):
        """Test a short body is rejected."""
        gram = build_gram("0", LfsrSpec.primitive(3), SystemParams(4, 1.0))
        path = write_gram(tmp_path / "gram.bin", gram)
        path.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(ValueError, match="expected"):
            read_gram(path)
