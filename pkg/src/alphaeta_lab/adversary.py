"""
Eve's individual-measurement attacks.

Covers the ciphertext-only bit guess, the known-plaintext wedge approximation
and its Gamma estimates, the assisted brute-force seed search, and the
correlation (linear decoding) attack on LFSR keystreams.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from .constellation import SystemParams, bit_at_index, map_angle
from .errors import check_guard
from .keystream import (
    LfsrExpander,
    LfsrSpec,
    SeedKey,
    advance_state,
    chunk_symbols,
    keystream_symbols,
    lfsr_expand_many,
    linear_form_matrix,
    rewind_state,
    seed_matrix,
)
from .measurement import (
    QuadratureSample,
    angular_distance,
    heterodyne_sample,
    phase_error_quantile,
    phase_estimate,
)
from .receiver import BerEstimate, binomial_interval, encrypt
from .seeding import run_chunked

logger = logging.getLogger(__name__)

BRUTEFORCE_GUARD = 28
CORRELATION_GUARD = 24

WEDGE_POLICIES = ("paper_default", "confidence", "exact")

# Upper bound on elements per (rows x M) working array.
_WORKING_ELEMENTS = 1 << 22


# ============================================================================
# TYPES
# ============================================================================


@dataclass(frozen=True)
class WedgePolicy:
    """
    Rule for Eve's wedge full-width.

    ``paper_default`` uses 2/sqrt(S), which makes the expected candidate count
    M/(pi sqrt(S)). ``confidence`` uses 2 * z * (1/sqrt(2S)) where z is the
    two-sided standard normal quantile for coverage ``confidence`` and
    1/sqrt(2S) approximates the heterodyne phase-noise standard deviation
    (valid for S >> 1). ``exact`` takes twice the ``confidence`` quantile of
    the exact heterodyne phase-error distribution, which has heavier tails
    than the Gaussian at small S.
    """

    kind: str = "paper_default"
    confidence: float = 0.9999

    def __post_init__(self):
        if self.kind not in WEDGE_POLICIES:
            raise ValueError(f"unknown wedge policy {self.kind!r}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence}")

    @classmethod
    def paper_default(cls) -> "WedgePolicy":
        return cls("paper_default")

    @classmethod
    def confidence_level(cls, p_w: float) -> "WedgePolicy":
        return cls("confidence", p_w)

    @classmethod
    def exact_level(cls, p_w: float) -> "WedgePolicy":
        return cls("exact", p_w)

    def width(self, params: SystemParams) -> float:
        if params.S <= 0:
            raise ValueError("wedge width needs S > 0")
        if self.kind == "paper_default":
            return 2.0 / math.sqrt(params.S)
        if self.kind == "exact":
            return 2.0 * phase_error_quantile(self.confidence, params)
        z = norm.ppf(0.5 * (1.0 + self.confidence))
        return 2.0 * z / math.sqrt(2.0 * params.S)


@dataclass(frozen=True)
class WedgeSet:
    """Keystream symbols consistent with one observation under known plaintext."""

    slot: int
    candidates: Tuple[int, ...]
    width_radians: float

    def __len__(self) -> int:
        return len(self.candidates)

    def __contains__(self, z) -> bool:
        return int(z) in self.candidates


@dataclass
class AttackReport:
    """Structured outcome of one attack experiment."""

    attack: str
    parameters: Dict[str, Any]
    surviving_seeds: int
    success: bool
    work: int
    error_rates: Dict[str, float] = field(default_factory=dict)
    survivors: List[int] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class GammaEstimate:
    """Monte Carlo wedge size statistics."""

    mean: float
    std: float
    coverage: float
    trials: int
    width: float

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.trials) if self.trials else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ComplexityEstimate:
    """Assisted brute-force complexity C = Gamma^(|K| / log2 M)."""

    value: float
    log10: float
    exponent: float
    gamma: float
    clamped: bool = False
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ============================================================================
# GAMMA AND WEDGES
# ============================================================================


def gamma_analytic(params: SystemParams) -> float:
    """Heterodyne estimate Gamma ~ M / (pi sqrt(S))."""
    if params.S <= 0:
        raise ValueError("gamma_analytic needs S > 0")
    return params.M / (math.pi * math.sqrt(params.S))


def candidate_angles(x: int, params: SystemParams) -> np.ndarray:
    """Angles of bit ``x`` under every basis z = 0 ... M-1."""
    return map_angle(np.full(params.M, int(x)), np.arange(params.M), params).radians


def wedge_masks(
    phi: np.ndarray, known_x: np.ndarray, params: SystemParams, width: float
) -> np.ndarray:
    """
    Candidate masks for many slots.

    Returns:
        (n, M) bool array; entry [i, z] is True when basis z puts bit
        ``known_x[i]`` within ``width / 2`` of the phase estimate ``phi[i]``
    """
    if width <= 0:
        raise ValueError(f"wedge width must be positive, got {width}")
    base = np.stack([candidate_angles(0, params), candidate_angles(1, params)])
    rows = base[np.asarray(known_x, dtype=np.int64)]
    return angular_distance(rows, np.asarray(phi)[:, None]) <= width / 2.0


def wedge_candidates(
    sample: QuadratureSample,
    known_x: int,
    params: SystemParams,
    width: Optional[float] = None,
    slot: int = 0,
) -> WedgeSet:
    """
    Tabulate the keystream symbols compatible with one heterodyne outcome.

    Args:
        sample: Eve's heterodyne outcome
        known_x: Known plaintext bit
        params: System parameters
        width: Wedge full-width; defaults to 2/sqrt(S)
        slot: Slot index recorded in the result

    Raises:
        ValueError: For a zero-vector sample or non-positive width
    """
    if width is None:
        width = WedgePolicy.paper_default().width(params)
    phi = np.atleast_1d(phase_estimate(sample))
    mask = wedge_masks(phi, np.array([known_x]), params, width)[0]
    return WedgeSet(slot, tuple(int(z) for z in np.flatnonzero(mask)), float(width))


def observe_wedges(
    samples: QuadratureSample,
    plaintext: Sequence[int],
    params: SystemParams,
    width: float,
) -> List[WedgeSet]:
    """Wedge sets for a whole frame of heterodyne outcomes."""
    phi = np.atleast_1d(phase_estimate(samples))
    masks = wedge_masks(phi, np.asarray(plaintext), params, width)
    return [
        WedgeSet(i, tuple(int(z) for z in np.flatnonzero(row)), float(width))
        for i, row in enumerate(masks)
    ]


def gamma_empirical(
    params: SystemParams,
    width_policy: WedgePolicy,
    trials: int,
    rng: np.random.Generator,
    phase_dither: float = 0.0,
    workers: Optional[int] = None,
) -> GammaEstimate:
    """
    Monte Carlo mean wedge size under known plaintext.

    The true symbol z and bit x are uniform per trial. ``phase_dither`` adds a
    uniform sender-side phase offset of that full-width before measurement.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    width = width_policy.width(params)

    def chunk_stats(size: int, chunk_rng: np.random.Generator) -> Tuple[float, float, int]:
        z = chunk_rng.integers(0, params.M, size=size)
        x = chunk_rng.integers(0, 2, size=size)
        theta = map_angle(x, z, params).radians
        if phase_dither > 0:
            theta = theta + chunk_rng.uniform(-phase_dither / 2, phase_dither / 2, size=size)
        phi = phase_estimate(heterodyne_sample(theta, params, chunk_rng))
        masks = wedge_masks(np.atleast_1d(phi), x, params, width)
        counts = masks.sum(axis=1).astype(np.float64)
        covered = int(np.count_nonzero(masks[np.arange(size), z]))
        return float(counts.sum()), float((counts**2).sum()), covered

    chunk = max(1, _WORKING_ELEMENTS // params.M)
    parts = run_chunked(chunk_stats, trials, rng, chunk=chunk, workers=workers)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    covered = sum(p[2] for p in parts)
    mean = total / trials
    std = math.sqrt(max(total_sq / trials - mean * mean, 0.0))
    logger.debug("gamma_empirical M=%d S=%g width=%.4g: mean %.4f", params.M, params.S, width, mean)
    return GammaEstimate(mean, std, covered / trials, trials, width)


def complexity_estimate(gamma: float, key_bits: int, params: SystemParams) -> ComplexityEstimate:
    """
    Assisted brute-force complexity factor Gamma^(|K| / log2 M).

    Values of Gamma below 1 are clamped to 1 (no search gain) with a note.
    """
    if key_bits < 0:
        raise ValueError(f"key_bits must be >= 0, got {key_bits}")
    clamped = gamma < 1.0
    note = ""
    if clamped:
        note = f"gamma {gamma:.4g} < 1 clamped to 1: the observation resolves the keystream"
        logger.warning(note)
        gamma = 1.0
    exponent = key_bits / math.log2(params.M)
    log10 = exponent * math.log10(gamma)
    try:
        value = math.pow(gamma, exponent)
    except OverflowError:
        value = math.inf
    return ComplexityEstimate(value, log10, exponent, gamma, clamped, note)


# ============================================================================
# CIPHERTEXT-ONLY
# ============================================================================


def eve_ciphertext_only_bit(
    sample: QuadratureSample, params: SystemParams, rule: str = "nearest_index"
):
    """
    Guess data bit(s) from heterodyne outcome(s) without the keystream.

    Args:
        sample: Heterodyne outcome(s)
        params: System parameters
        rule: ``nearest_index`` (bit of the nearest grid point) or ``full_ml``
            (maximum likelihood, marginalising the uniform keystream symbol)
    """
    y1 = np.atleast_1d(np.asarray(sample.y1, dtype=np.float64))
    y2 = np.atleast_1d(np.asarray(sample.y2, dtype=np.float64))
    scalar = np.ndim(sample.y1) == 0

    if rule == "nearest_index":
        phi = np.atleast_1d(phase_estimate(QuadratureSample(y1, y2)))
        l = np.rint(phi * params.M / math.pi).astype(np.int64) % params.grid_size
        guess = np.atleast_1d(bit_at_index(l, params))
    elif rule == "full_ml":
        grid = np.arange(params.grid_size)
        angles = grid * math.pi / params.M
        cos_g, sin_g = np.cos(angles), np.sin(angles)
        ones = bit_at_index(grid, params).astype(bool)
        guess = np.empty(y1.shape[0], dtype=np.int64)
        rows = max(1, _WORKING_ELEMENTS // params.grid_size)
        for start in range(0, y1.shape[0], rows):
            a, b = y1[start:start + rows], y2[start:start + rows]
            # log-likelihood up to a per-sample constant
            score = 2.0 * params.alpha * (np.outer(a, cos_g) + np.outer(b, sin_g))
            ll0 = logsumexp(score[:, ~ones], axis=1)
            ll1 = logsumexp(score[:, ones], axis=1)
            guess[start:start + rows] = (ll1 > ll0).astype(np.int64)
    else:
        raise ValueError(f"unknown rule {rule!r}; use 'nearest_index' or 'full_ml'")

    return int(guess[0]) if scalar else guess


def eve_ciphertext_only_ber(
    params: SystemParams,
    rule: str,
    trials: int,
    rng: np.random.Generator,
    workers: Optional[int] = None,
) -> BerEstimate:
    """Monte Carlo bit error of Eve's ciphertext-only guess (random x and z)."""

    def chunk_errors(size: int, chunk_rng: np.random.Generator) -> int:
        z = chunk_rng.integers(0, params.M, size=size)
        x = chunk_rng.integers(0, 2, size=size)
        sample = heterodyne_sample(map_angle(x, z, params).radians, params, chunk_rng)
        guess = eve_ciphertext_only_bit(sample, params, rule)
        return int(np.count_nonzero(guess != x))

    chunk = max(1, min(65536, _WORKING_ELEMENTS // params.grid_size * 8))
    errors = sum(run_chunked(chunk_errors, trials, rng, chunk=chunk, workers=workers))
    return binomial_interval(errors, trials)


# ============================================================================
# ASSISTED BRUTE-FORCE SEARCH
# ============================================================================


def assisted_bruteforce(
    wedges: Sequence[WedgeSet],
    spec: LfsrSpec,
    params: SystemParams,
    true_seed: Optional[SeedKey] = None,
    guard: int = BRUTEFORCE_GUARD,
    allow_override: bool = False,
    block_bits: int = 16,
    max_listed: int = 1024,
    progress_callback: Optional[Callable[[int, int, str], None]] = None,
) -> AttackReport:
    """
    Exhaustive seed search constrained by per-slot wedge sets.

    A seed survives when its keystream symbol lies in the wedge set of every
    slot. Seeds are enumerated in independent blocks of ``2**block_bits``.

    Args:
        wedges: Wedge sets for slots 0 ... n-1, in slot order
        spec: LFSR of the expander
        params: System parameters (M must be a power of two)
        true_seed: Actual key, to report whether it survives
        guard: Largest |K| searched without override
        allow_override: Search above the guard
        block_bits: log2 of seeds per enumeration block
        max_listed: Cap on survivors listed in the report
        progress_callback: Callback(block, blocks, label)

    Raises:
        GuardViolation: If |K| exceeds the guard without override
    """
    check_guard("key length |K|", spec.length, guard, allow_override)
    m = params.m
    n = len(wedges)
    table = np.zeros((n, params.M), dtype=bool)
    for i, wedge in enumerate(wedges):
        table[i, list(wedge.candidates)] = True

    total = 2**spec.length
    block = min(total, 2**block_bits)
    blocks = -(-total // block)
    survivors: List[np.ndarray] = []
    survivor_symbols: List[np.ndarray] = []
    prefix = np.zeros(n + 1, dtype=np.int64)
    slots_checked = 0
    rejected = 0
    slot_index = np.arange(n)

    for b, start in enumerate(range(0, total, block)):
        count = min(block, total - start)
        seeds = seed_matrix(start, count, spec.length)
        symbols = chunk_symbols(lfsr_expand_many(seeds, spec, n * m), params.M)
        member = table[slot_index, symbols] if n else np.ones((count, 0), dtype=bool)
        alive = np.logical_and.accumulate(member, axis=1) if n else member
        prefix[0] += count
        prefix[1:] += alive.sum(axis=0)
        survive = alive[:, -1] if n else np.ones(count, dtype=bool)
        dead = ~survive
        if np.any(dead):
            slots_checked += int((np.argmin(member[dead], axis=1) + 1).sum())
            rejected += int(np.count_nonzero(dead))
        survivors.append(start + np.flatnonzero(survive))
        survivor_symbols.append(symbols[survive])
        if progress_callback:
            progress_callback(b + 1, blocks, "seed block")

    found = np.concatenate(survivors) if survivors else np.zeros(0, dtype=np.int64)
    found_symbols = np.concatenate(survivor_symbols) if survivor_symbols else np.zeros((0, n))
    classes = int(np.unique(found_symbols, axis=0).shape[0]) if found.size and n else int(found.size > 0)
    true_survives = bool(true_seed is not None and np.any(found == true_seed.to_int()))

    notes = []
    if found.size > max_listed:
        notes.append(f"survivor list truncated to the first {max_listed} of {found.size}")
    if classes < found.size:
        notes.append(
            f"{found.size} survivors fall into {classes} keystream-equivalence classes"
        )

    report = AttackReport(
        attack="assisted_bruteforce",
        parameters={
            "M": params.M,
            "S": params.S,
            "key_bits": spec.length,
            "taps": list(spec.taps),
            "slots": n,
            "mean_wedge_size": float(table.sum() / n) if n else float(params.M),
        },
        surviving_seeds=int(found.size),
        success=true_survives and found.size == 1,
        work=total,
        error_rates={},
        survivors=[int(s) for s in found[:max_listed]],
        notes=notes,
        details={
            "true_seed_survives": true_survives,
            "keystream_classes": classes,
            "mean_slots_checked": slots_checked / rejected if rejected else float(n),
            "surviving_by_slots": [int(c) for c in prefix],
        },
    )
    logger.debug(
        "assisted_bruteforce |K|=%d n=%d: %d survivors", spec.length, n, report.surviving_seeds
    )
    return report


# ============================================================================
# CORRELATION ATTACK
# ============================================================================


def ml_symbols(
    samples: QuadratureSample, known_plaintext: Sequence[int], params: SystemParams
) -> np.ndarray:
    """Per-slot maximum-likelihood keystream symbol given the known bit."""
    y1 = np.atleast_1d(np.asarray(samples.y1, dtype=np.float64))
    y2 = np.atleast_1d(np.asarray(samples.y2, dtype=np.float64))
    x = np.atleast_1d(np.asarray(known_plaintext, dtype=np.int64))
    base = np.stack([candidate_angles(0, params), candidate_angles(1, params)])
    theta = base[x]
    score = y1[:, None] * np.cos(theta) + y2[:, None] * np.sin(theta)
    return np.argmax(score, axis=1)


def msb_bits(symbols: np.ndarray, m: int, t: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Top-t bits of each symbol and their running-key positions.

    Returns:
        (bits, positions) both flattened slot-major
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(m - 1, m - 1 - t, -1)
    bits = ((symbols[:, None] >> shifts) & 1).ravel()
    positions = (np.arange(symbols.shape[0])[:, None] * m + np.arange(t)).ravel()
    return bits.astype(np.uint8), positions


def correlation_attack(
    samples: QuadratureSample,
    known_plaintext: Sequence[int],
    spec: LfsrSpec,
    params: SystemParams,
    msb_count: int = 1,
    true_seed: Optional[SeedKey] = None,
    guard: int = CORRELATION_GUARD,
    allow_override: bool = False,
    top: int = 10,
    block_bits: int = 14,
    offset: int = 0,
) -> AttackReport:
    """
    Linear-decoding attack on an LFSR keystream.

    Eve estimates each symbol by maximum likelihood, keeps its ``msb_count``
    most significant bits, treats them as noisy evaluations of GF(2) linear
    forms of the seed, and scores every seed by agreement count.

    Running-key bit t is modelled as register output ``t + offset``. For a
    filtered expander the matching offset is its warm-up; with a smaller
    offset the best-scoring seed is the register state ``warmup - offset``
    clocks after the true seed.

    Raises:
        GuardViolation: If |K| exceeds the guard without override
        ValueError: If msb_count is outside [1, m]
    """
    check_guard("key length |K|", spec.length, guard, allow_override)
    m = params.m
    if not 1 <= msb_count <= m:
        raise ValueError(f"msb_count must lie in [1, {m}], got {msb_count}")
    if offset < 0:
        raise ValueError(f"offset must be >= 0, got {offset}")

    z_hat = ml_symbols(samples, known_plaintext, params)
    n = z_hat.shape[0]
    observed, positions = msb_bits(z_hat, m, msb_count)
    forms = linear_form_matrix(spec, offset + n * m)[positions + offset].astype(np.float32)
    observed_f = observed.astype(np.float32)
    n_bits = observed.shape[0]

    total = 2**spec.length
    block = min(total, 2**block_bits)
    best_scores = np.zeros(0, dtype=np.int64)
    best_seeds = np.zeros(0, dtype=np.int64)
    for start in range(0, total, block):
        count = min(block, total - start)
        seeds = seed_matrix(start, count, spec.length).astype(np.float32)
        predicted = np.mod(seeds @ forms.T, 2.0)
        scores = (predicted == observed_f).sum(axis=1).astype(np.int64)
        cand_scores = np.concatenate([best_scores, scores])
        cand_seeds = np.concatenate([best_seeds, np.arange(start, start + count)])
        order = np.lexsort((cand_seeds, -cand_scores))[:top]
        best_scores, best_seeds = cand_scores[order], cand_seeds[order]

    error_rates = {"msb_error_estimate": 1.0 - best_scores[0] / n_bits if n_bits else 0.0}
    success = False
    details: Dict[str, Any] = {
        "ranked": [
            {"seed": int(s), "score": int(v)} for s, v in zip(best_seeds, best_scores)
        ],
        "observed_bits": n_bits,
    }
    if true_seed is not None:
        truth = true_seed.as_array().astype(np.float32)
        true_score = int((np.mod(truth @ forms.T, 2.0) == observed_f).sum())
        error_rates["msb_error_true"] = 1.0 - true_score / n_bits if n_bits else 0.0
        details["true_seed"] = true_seed.to_int()
        details["true_score"] = true_score
        success = bool(best_seeds[0] == true_seed.to_int())

    notes = []
    if n_bits < spec.length:
        notes.append(f"{n_bits} observed bits cannot determine a {spec.length}-bit seed")

    return AttackReport(
        attack="correlation_attack",
        parameters={
            "M": params.M,
            "S": params.S,
            "key_bits": spec.length,
            "taps": list(spec.taps),
            "slots": n,
            "msb_count": msb_count,
            "offset": offset,
        },
        surviving_seeds=int(np.count_nonzero(best_scores == best_scores[0])),
        success=success,
        work=total,
        error_rates=error_rates,
        survivors=[int(best_seeds[0])],
        notes=notes,
        details=details,
    )


# ============================================================================
# TRIAL DRIVERS
# ============================================================================


def _known_plaintext_frame(
    params: SystemParams,
    expander: LfsrExpander,
    n: int,
    rng: np.random.Generator,
) -> Tuple[SeedKey, np.ndarray, QuadratureSample]:
    seed = SeedKey.random(expander.key_bits, rng)
    plaintext = rng.integers(0, 2, size=n)
    frame = encrypt(plaintext, seed, expander.spec, params, expander=expander)
    samples = heterodyne_sample(frame.angles, params, rng)
    return seed, plaintext, samples


def run_bruteforce_trial(
    params: SystemParams,
    spec: LfsrSpec,
    n: int,
    policy: WedgePolicy,
    rng: np.random.Generator,
    guard: int = BRUTEFORCE_GUARD,
    allow_override: bool = False,
) -> AttackReport:
    """One known-plaintext assisted brute-force experiment with a random key."""
    seed, plaintext, samples = _known_plaintext_frame(params, LfsrExpander(spec), n, rng)
    wedges = observe_wedges(samples, plaintext, params, policy.width(params))
    report = assisted_bruteforce(
        wedges, spec, params, true_seed=seed, guard=guard, allow_override=allow_override
    )
    report.parameters["wedge_policy"] = policy.kind
    report.parameters["wedge_width"] = policy.width(params)
    return report


def run_correlation_trial(
    params: SystemParams,
    expander: LfsrExpander,
    n: int,
    msb_count: int,
    rng: np.random.Generator,
    guard: int = CORRELATION_GUARD,
    allow_override: bool = False,
    model_offset: Optional[int] = None,
) -> AttackReport:
    """
    One known-plaintext correlation attack with a random key.

    The cipher runs ``expander`` (plain or filtered); the attack models the
    running key as the linear part of ``expander``, register outputs shifted
    by its warm-up unless ``model_offset`` says otherwise. The top seed counts
    as a recovery when it is the true seed or, for a shifted model, the
    register state that rewinds to it.
    """
    warmup = getattr(expander, "warmup", 0)
    offset = warmup if model_offset is None else model_offset
    seed, plaintext, samples = _known_plaintext_frame(params, expander, n, rng)
    report = correlation_attack(
        samples,
        plaintext,
        expander.spec,
        params,
        msb_count=msb_count,
        true_seed=seed,
        guard=guard,
        allow_override=allow_override,
        offset=offset,
    )
    report.parameters["expander"] = expander.describe()
    top = SeedKey.from_int(report.survivors[0], expander.spec.length)
    if offset < warmup:
        recovered = rewind_state(top, expander.spec, warmup - offset)
    else:
        recovered = advance_state(top, expander.spec, offset - warmup)
    report.details["recovered_seed"] = recovered.to_int()
    report.success = recovered == seed
    true_symbols = keystream_symbols(expander, seed, n, params.M)
    observed, _ = msb_bits(ml_symbols(samples, plaintext, params), params.m, msb_count)
    actual, _ = msb_bits(true_symbols, params.m, msb_count)
    report.error_rates["msb_channel_error"] = float(np.mean(observed != actual)) if n else 0.0
    return report
