"""
Joint known-plaintext attack at desk scale.

For a fixed plaintext every seed induces a product of coherent states. Eve
holding a full copy of the transmission must discriminate these 2^|K| states;
the square-root measurement gives a realizable (hence upper-bounding) error
probability computed from the Gram matrix of pairwise overlaps.

Gram dump layout (little-endian):

    header  magic  8 bytes  b"AEGRAM1\\0"
            N      uint64   number of states
            n      uint64   slots per state
            M      uint64   constellation half-size
            S      float64  signal energy
    body    N*N complex128 entries, row-major (real, imaginary float64 pairs)
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .constellation import SystemParams, map_index
from .errors import NumericalError, check_guard
from .keystream import LfsrExpander, LfsrSpec, chunk_symbols, parse_bits, seed_matrix

logger = logging.getLogger(__name__)

GRAM_GUARD = 12
GRAM_MAGIC = b"AEGRAM1\x00"
GRAM_HEADER = np.dtype(
    [("magic", "S8"), ("N", "<u8"), ("n", "<u8"), ("M", "<u8"), ("S", "<f8")]
)

# Eigenvalues below this fraction of the largest are treated as zero.
CLAMP_RELATIVE = 1e-12

PLAINTEXT_POLICIES = ("all_zeros", "fixed_random")


@dataclass
class GramMatrix:
    """Pairwise overlaps of the seed-indexed product states."""

    matrix: np.ndarray
    params: SystemParams
    n: int
    seeds: Optional[np.ndarray] = None

    @property
    def N(self) -> int:
        return int(self.matrix.shape[0])

    def validate(self, tol: float = 1e-12) -> None:
        """
        Check Hermiticity and the unit diagonal.

        Raises:
            NumericalError: If either deviates beyond ``tol``
        """
        g = self.matrix
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise NumericalError(f"Gram matrix must be square, got shape {g.shape}")
        asym = float(np.max(np.abs(g - g.conj().T))) if g.size else 0.0
        diag = float(np.max(np.abs(np.diag(g) - 1.0))) if g.size else 0.0
        if asym > tol or diag > tol:
            raise NumericalError(
                "Gram matrix is not Hermitian with unit diagonal",
                {"max_asymmetry": asym, "max_diagonal_error": diag, "tolerance": tol},
            )

    def permuted(self, order: Sequence[int]) -> "GramMatrix":
        order = np.asarray(order)
        seeds = None if self.seeds is None else self.seeds[order]
        return GramMatrix(self.matrix[np.ix_(order, order)], self.params, self.n, seeds)


def _roots(params: SystemParams) -> np.ndarray:
    return np.exp(1j * np.pi * np.arange(params.grid_size) / params.M)


def gram_from_indices(indices: np.ndarray, params: SystemParams) -> np.ndarray:
    """
    Gram matrix of product states given their grid indices.

    Args:
        indices: (N, n) grid indices, row k is state k

    Returns:
        (N, N) complex array with entry [k, k'] = prod_i <state_k,i | state_k',i>
    """
    indices = np.asarray(indices, dtype=np.int64)
    n = indices.shape[1]
    u = _roots(params)[indices]
    exponent = params.S * (u.conj() @ u.T - n)
    np.fill_diagonal(exponent, 0.0)
    gram = np.exp(exponent)
    return 0.5 * (gram + gram.conj().T)


def seed_indices(
    plaintext: np.ndarray,
    spec: LfsrSpec,
    params: SystemParams,
    expander: Optional[LfsrExpander] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Grid indices of every seed's ciphertext for one plaintext.

    Returns:
        (seeds, indices): seed integers 0 ... 2^|K|-1 and the (N, n) index table
    """
    expander = expander or LfsrExpander(spec)
    total = 2**spec.length
    n = plaintext.shape[0]
    bits = expander.expand_many(seed_matrix(0, total, spec.length), n * params.m)
    z = chunk_symbols(bits, params.M)
    x = np.broadcast_to(plaintext.astype(np.int64), z.shape)
    return np.arange(total), np.asarray(map_index(x, z, params)).reshape(total, n)


def build_gram(
    plaintext: Union[str, Sequence[int]],
    spec: LfsrSpec,
    params: SystemParams,
    guard: int = GRAM_GUARD,
    allow_override: bool = False,
    expander: Optional[LfsrExpander] = None,
) -> GramMatrix:
    """
    Gram matrix of the 2^|K| states induced by all seeds for one plaintext.

    Raises:
        GuardViolation: If |K| exceeds the guard without override
        NumericalError: If the result is not Hermitian with unit diagonal
    """
    check_guard("key length |K|", spec.length, guard, allow_override)
    x = parse_bits(plaintext)
    seeds, indices = seed_indices(x, spec, params, expander)
    gram = GramMatrix(gram_from_indices(indices, params), params, int(x.size), seeds)
    gram.validate()
    return gram


def srm_error(gram: Union[GramMatrix, np.ndarray], tol: float = 1e-9) -> float:
    """
    Average error of the square-root measurement with equal priors.

    P_e = 1 - (1/N) sum_k ((sqrt G)_kk)^2, with sqrt G from the Hermitian
    eigendecomposition. Eigenvalues below 1e-12 of the largest are clamped to
    zero (pseudo square root).

    Raises:
        NumericalError: If an eigenvalue is negative beyond ``tol`` relative to
            the largest one
    """
    g = gram.matrix if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=np.complex128)
    N = g.shape[0]
    if N == 0:
        raise ValueError("Gram matrix is empty")
    eigvals, eigvecs = linalg.eigh(g)
    largest = float(eigvals[-1])
    smallest = float(eigvals[0])
    if largest <= 0 or smallest < -tol * largest:
        raise NumericalError(
            "Gram matrix is not positive semidefinite within tolerance",
            {"min_eigenvalue": smallest, "max_eigenvalue": largest, "N": N, "tolerance": tol},
        )
    eigvals = np.where(eigvals < CLAMP_RELATIVE * largest, 0.0, eigvals)
    sqrt_diag = (np.abs(eigvecs) ** 2) @ np.sqrt(eigvals)
    pe = 1.0 - float(np.mean(sqrt_diag**2))
    return min(max(pe, 0.0), 1.0 - 1.0 / N)


@dataclass
class PeCurve:
    """SRM error as a function of data length."""

    rows: List[Tuple[int, float]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def is_monotone(self, tol: float = 1e-9) -> bool:
        ordered = sorted(self.rows)
        return all(b[1] <= a[1] + tol for a, b in zip(ordered, ordered[1:]))

    def first_below(self, threshold: float) -> Optional[int]:
        """Smallest n whose error is below ``threshold``, if any."""
        for n, pe in sorted(self.rows):
            if pe < threshold:
                return n
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": [{"n": n, "pe": pe} for n, pe in self.rows],
            "metadata": self.metadata,
        }


def make_plaintext(policy: str, n: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    if policy == "all_zeros":
        return np.zeros(n, dtype=np.uint8)
    if policy == "fixed_random":
        if rng is None:
            raise ValueError("fixed_random plaintext needs a random stream")
        return rng.integers(0, 2, size=n).astype(np.uint8)
    raise ValueError(f"plaintext policy must be one of {PLAINTEXT_POLICIES}, got {policy!r}")


def pe_vs_n(
    spec: LfsrSpec,
    params: SystemParams,
    n_values: Sequence[int],
    plaintext_policy: str = "all_zeros",
    rng: Optional[np.random.Generator] = None,
    guard: int = GRAM_GUARD,
    allow_override: bool = False,
    expander: Optional[LfsrExpander] = None,
    progress_callback: Optional[Callable[[int, int, str], None]] = None,
    gram_sink: Optional[Callable[[GramMatrix], None]] = None,
) -> PeCurve:
    """
    Trace the SRM error over data lengths.

    One plaintext of length max(n_values) is drawn and every n uses its
    prefix, so the curves for different n extend the same transmission.

    Args:
        spec: Expander LFSR
        params: System parameters
        n_values: Data lengths to evaluate
        plaintext_policy: ``all_zeros`` or ``fixed_random``
        rng: Stream for ``fixed_random``
        guard: Largest |K| accepted without override
        allow_override: Accept larger |K|
        expander: Expander override built on ``spec``
        progress_callback: Callback(current, total, label)
        gram_sink: Receives the Gram matrix of the largest n (for dumps)
    """
    check_guard("key length |K|", spec.length, guard, allow_override)
    if any(n < 0 for n in n_values):
        raise ValueError(f"data lengths must be >= 0, got {list(n_values)}")
    n_max = max(n_values) if n_values else 0
    x = make_plaintext(plaintext_policy, n_max, rng)
    seeds, indices = seed_indices(x, spec, params, expander)

    curve = PeCurve(
        metadata={
            "key_bits": spec.length,
            "spec": spec.to_dict(),
            "params": params.to_dict(),
            "plaintext_policy": plaintext_policy,
            "N": int(seeds.size),
        }
    )
    for step, n in enumerate(n_values):
        gram = GramMatrix(gram_from_indices(indices[:, :n], params), params, n, seeds)
        gram.validate()
        pe = srm_error(gram)
        curve.rows.append((int(n), pe))
        logger.debug("SRM |K|=%d n=%d: P_e = %.6g", spec.length, n, pe)
        if gram_sink is not None and n == n_max:
            gram_sink(gram)
        if progress_callback:
            progress_callback(step + 1, len(n_values), f"n={n}")

    if not curve.is_monotone():
        logger.warning("SRM error is not monotone in n beyond tolerance: %s", curve.rows)
    return curve


def write_gram(path: Union[str, Path], gram: GramMatrix) -> Path:
    """Dump a Gram matrix in the binary layout described in the module docstring."""
    path = Path(path)
    header = np.zeros(1, dtype=GRAM_HEADER)
    header["magic"] = GRAM_MAGIC
    header["N"] = gram.N
    header["n"] = gram.n
    header["M"] = gram.params.M
    header["S"] = gram.params.S
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(gram.matrix, dtype="<c16").tobytes())
    return path


def read_gram(path: Union[str, Path]) -> GramMatrix:
    """
    Load a Gram dump written by ``write_gram``.

    Raises:
        ValueError: On a bad magic number or truncated body
    """
    data = Path(path).read_bytes()
    if len(data) < GRAM_HEADER.itemsize:
        raise ValueError(f"{path}: file too short for a Gram header")
    header = np.frombuffer(data[:GRAM_HEADER.itemsize], dtype=GRAM_HEADER)[0]
    if bytes(header["magic"]).ljust(8, b"\x00") != GRAM_MAGIC:
        raise ValueError(f"{path}: not a Gram dump (bad magic)")
    N = int(header["N"])
    body = np.frombuffer(data[GRAM_HEADER.itemsize:], dtype="<c16")
    if body.size != N * N:
        raise ValueError(f"{path}: expected {N * N} entries, found {body.size}")
    params = SystemParams(int(header["M"]), float(header["S"]))
    return GramMatrix(body.reshape(N, N).astype(np.complex128), params, int(header["n"]), np.arange(N))
