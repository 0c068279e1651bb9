"""
Bob's keyed decryption and bit-error-rate evaluation.

Bob knows every keystream symbol Z_i and measures the homodyne quadrature
along the basis axis ``Z_i * pi / M``; the sign of the outcome selects between
the two end points of the basis.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.stats import norm

from .constellation import SystemParams, map_angle, pol, wrap_angle
from .keystream import (
    LfsrExpander,
    LfsrSpec,
    SeedKey,
    chunk_symbols,
    keystream_symbols,
    parse_bits,
)
from .measurement import helstrom_binary_error, homodyne_mean, homodyne_sample
from .seeding import run_chunked

logger = logging.getLogger(__name__)

# Below this many trials the normal-approximation interval is unreliable.
MIN_CI_TRIALS = 1000

# Slots sharing one random seed key in Monte Carlo round trips.
FRAME_LENGTH = 1024

Randomizer = Callable[["CipherFrame", np.random.Generator], "CipherFrame"]


@dataclass
class CipherFrame:
    """Transmitted coherent-state angles, one per plaintext bit."""

    angles: np.ndarray
    indices: Optional[np.ndarray] = None

    def __post_init__(self):
        self.angles = np.atleast_1d(np.asarray(self.angles, dtype=np.float64))
        if self.indices is not None:
            self.indices = np.atleast_1d(np.asarray(self.indices, dtype=np.int64))
            if self.indices.shape != self.angles.shape:
                raise ValueError("frame indices and angles differ in shape")

    @property
    def n(self) -> int:
        return int(self.angles.shape[0])

    @property
    def on_grid(self) -> bool:
        return self.indices is not None


@dataclass
class BerEstimate:
    """Error count with a 95% normal-approximation binomial interval."""

    errors: int
    trials: int
    ber: float
    ci_low: float
    ci_high: float

    @property
    def sigma(self) -> float:
        """Binomial standard error of the estimate."""
        if self.trials == 0:
            return 0.0
        return math.sqrt(max(self.ber * (1.0 - self.ber), 0.0) / self.trials)

    def to_dict(self) -> dict:
        return asdict(self)


def binomial_interval(errors: int, trials: int, z: float = 1.959963984540054) -> BerEstimate:
    """Wrap an error count into a BerEstimate."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if trials < MIN_CI_TRIALS:
        logger.warning(
            "Only %d trials: the normal-approximation interval is unreliable below %d",
            trials,
            MIN_CI_TRIALS,
        )
    p = errors / trials
    half = z * math.sqrt(p * (1.0 - p) / trials)
    return BerEstimate(int(errors), int(trials), p, max(0.0, p - half), min(1.0, p + half))


def encrypt_symbols(plaintext: Sequence[int], keystream: np.ndarray, params: SystemParams) -> CipherFrame:
    """Map plaintext bits onto the circle using precomputed keystream symbols."""
    x = np.asarray(plaintext, dtype=np.int64)
    z = np.asarray(keystream, dtype=np.int64)
    if x.shape != z.shape:
        raise ValueError(f"plaintext shape {x.shape} does not match keystream shape {z.shape}")
    mapped = map_angle(x, z, params)
    return CipherFrame(angles=mapped.radians, indices=mapped.index)


def encrypt(
    plaintext: Union[str, Sequence[int]],
    seed: SeedKey,
    spec: LfsrSpec,
    params: SystemParams,
    expander: Optional[LfsrExpander] = None,
) -> CipherFrame:
    """
    Encrypt plaintext bits into a frame of coherent-state angles.

    Args:
        plaintext: Bits X_1 ... X_n (ASCII 0/1 string or sequence)
        seed: Shared key
        spec: LFSR spec of the expander
        params: System parameters
        expander: Alternative expander built on ``spec`` (e.g. filtered)

    Returns:
        CipherFrame with angle_i = map_angle(X_i, Z_i)
    """
    x = parse_bits(plaintext).astype(np.int64)
    expander = expander or LfsrExpander(spec)
    if x.size == 0:
        return CipherFrame(angles=np.zeros(0), indices=np.zeros(0, dtype=np.int64))
    z = keystream_symbols(expander, seed, x.size, params.M)
    return encrypt_symbols(x, z, params)


def lo_angles(keystream: np.ndarray, params: SystemParams) -> np.ndarray:
    """Bob's local-oscillator angle per slot, along the basis axis."""
    return np.asarray(keystream, dtype=np.float64) * math.pi / params.M


def bob_decide(z, sample, params: SystemParams):
    """
    Decide the data bit from a homodyne outcome taken along basis ``z``.

    Positive outcomes decide ``pol(z)``, negative ones ``1 XOR pol(z)``; an
    outcome of exactly zero decides ``pol(z)``.
    """
    parity = pol(np.asarray(z, dtype=np.int64))
    decided = np.where(np.asarray(sample) < 0, 1 ^ parity, parity)
    return int(decided) if decided.ndim == 0 else decided


def receive(
    frame: CipherFrame,
    keystream: np.ndarray,
    params: SystemParams,
    rng: Optional[np.random.Generator] = None,
    noiseless: bool = False,
) -> np.ndarray:
    """
    Bob's receiver: homodyne along each basis axis, then ``bob_decide``.

    Args:
        frame: Received frame (grid angles or randomised angles)
        keystream: Bob's copy of Z_1 ... Z_n
        params: System parameters
        rng: Noise stream (unused when ``noiseless``)
        noiseless: Replace each outcome by its mean

    Returns:
        Decided bits
    """
    keystream = np.asarray(keystream, dtype=np.int64)
    if keystream.shape[0] != frame.n:
        raise ValueError(f"keystream has {keystream.shape[0]} symbols for {frame.n} slots")
    lo = lo_angles(keystream, params)
    if noiseless:
        samples = homodyne_mean(frame.angles, lo, params)
    else:
        if rng is None:
            raise ValueError("a random stream is required for noisy reception")
        samples = homodyne_sample(frame.angles, lo, params, rng)
    return np.atleast_1d(bob_decide(keystream, samples, params))


def bob_ber_analytic(params: SystemParams) -> float:
    """Homodyne-receiver error probability Q(2 sqrt(S))."""
    return float(norm.sf(2.0 * params.alpha))


def bob_ber_helstrom(params: SystemParams) -> float:
    """Optimal binary error for the same antipodal pair."""
    return helstrom_binary_error(params)


def _draw_keystream(
    size: int,
    params: SystemParams,
    expander: Optional[LfsrExpander],
    rng: np.random.Generator,
) -> np.ndarray:
    if expander is None:
        return rng.integers(0, params.M, size=size)
    m = params.m
    frames = -(-size // FRAME_LENGTH)
    seeds = rng.integers(0, 2, size=(frames, expander.key_bits), dtype=np.uint8)
    bits = expander.expand_many(seeds, FRAME_LENGTH * m)
    return chunk_symbols(bits, params.M).ravel()[:size]


def roundtrip_ber(
    params: SystemParams,
    spec: Optional[LfsrSpec],
    n_trials: int,
    rng: np.random.Generator,
    plaintext: str = "random",
    expander: Optional[LfsrExpander] = None,
    randomizer: Optional[Randomizer] = None,
    workers: Optional[int] = None,
) -> BerEstimate:
    """
    Monte Carlo encrypt / transmit / decrypt bit-error rate.

    Each trial is one slot. Keys are redrawn every ``FRAME_LENGTH`` slots;
    with ``spec=None`` keystream symbols are drawn uniformly instead.

    Args:
        params: System parameters
        spec: Expander LFSR, or None for i.i.d. uniform keystream symbols
        n_trials: Number of slots
        rng: Parent random stream
        plaintext: ``"random"`` or ``"zeros"``
        expander: Expander override built on ``spec``
        randomizer: Sender-side frame transformation applied before
            transmission (deliberate signal randomisation)
        workers: Thread pool size for chunked trials

    Returns:
        BerEstimate
    """
    if n_trials < 1:
        raise ValueError(f"need at least one trial, got {n_trials}")
    if plaintext not in ("random", "zeros"):
        raise ValueError(f"plaintext policy must be 'random' or 'zeros', got {plaintext!r}")
    if expander is None and spec is not None:
        expander = LfsrExpander(spec)

    def chunk_errors(size: int, chunk_rng: np.random.Generator) -> int:
        z = _draw_keystream(size, params, expander, chunk_rng)
        if plaintext == "random":
            x = chunk_rng.integers(0, 2, size=size)
        else:
            x = np.zeros(size, dtype=np.int64)
        frame = encrypt_symbols(x, z, params)
        if randomizer is not None:
            frame = randomizer(frame, chunk_rng)
        decided = receive(frame, z, params, chunk_rng)
        return int(np.count_nonzero(decided != x))

    errors = sum(run_chunked(chunk_errors, n_trials, rng, workers=workers))
    estimate = binomial_interval(errors, n_trials)
    logger.debug(
        "roundtrip M=%d S=%g: %d errors in %d trials", params.M, params.S, errors, n_trials
    )
    return estimate


def perturb_angles(frame: CipherFrame, offsets: np.ndarray) -> CipherFrame:
    """Shift every angle by an offset; the result is generally off-grid."""
    return CipherFrame(angles=wrap_angle(frame.angles + offsets), indices=None)
