"""
Deliberate signal randomisation.

Alice adds a fresh uniform phase offset to every transmitted state. Bob keeps
his receiver unchanged and pays a small error penalty; Eve's per-slot
ambiguity is preserved. Offsets are drawn from the caller's generator and are
never stored.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import log_ndtr, logsumexp

from .adversary import WedgePolicy, gamma_analytic, gamma_empirical
from .constellation import SystemParams
from .receiver import BerEstimate, CipherFrame, bob_ber_analytic, perturb_angles, roundtrip_ber

logger = logging.getLogger(__name__)

DEFAULT_COUPLING = 2.0

_QUADRATURE_NODES = 128


@dataclass(frozen=True)
class DsrPolicy:
    """
    Full-width ``delta`` of the uniform phase offset.

    With ``coupling`` set, the width follows ``delta = coupling / sqrt(S)``
    once bound to system parameters (see ``for_params``).
    """

    delta: float = 0.0
    coupling: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.delta < math.pi:
            raise ValueError(
                f"DSR width must lie in [0, pi) so Bob's mean never crosses the "
                f"decision boundary, got {self.delta}"
            )
        if self.coupling is not None and self.coupling < 0:
            raise ValueError(f"coupling must be >= 0, got {self.coupling}")

    @classmethod
    def coupled(cls, coupling: float, params: SystemParams) -> "DsrPolicy":
        if params.S <= 0:
            raise ValueError("coupled DSR needs S > 0")
        return cls(coupling / math.sqrt(params.S), coupling)

    def for_params(self, params: SystemParams) -> "DsrPolicy":
        """Resolve a coupled policy against ``params``; fixed policies pass through."""
        if self.coupling is None:
            return self
        return DsrPolicy.coupled(self.coupling, params)


def dsr_offsets(n: int, policy: DsrPolicy, rng: np.random.Generator) -> np.ndarray:
    """
    Draw ``n`` offsets uniform on [-delta/2, delta/2).

    One uniform variate is consumed per slot for every policy, including
    ``delta = 0``, so runs that differ only in ``delta`` share their streams.
    """
    return policy.delta * (rng.random(n) - 0.5)


def dsr_apply(frame: CipherFrame, policy: DsrPolicy, rng: np.random.Generator) -> CipherFrame:
    """Randomise every angle of ``frame`` by an independent uniform offset."""
    return perturb_angles(frame, dsr_offsets(frame.n, policy, rng))


@dataclass
class AnalyticPenalty:
    """Bob's error under DSR from quadrature, with log-domain penalty."""

    ber: float
    baseline: float
    penalty: float
    log10_penalty: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def dsr_ber_analytic(params: SystemParams, delta: float) -> AnalyticPenalty:
    """
    E_xi[Q(2 sqrt(S) cos xi)] for xi uniform on [-delta/2, delta/2].

    Evaluated by Gauss-Legendre quadrature on [0, delta/2] (the integrand is
    even) entirely in the log domain; ``log10_penalty`` stays finite where the
    penalty itself underflows.
    """
    if not 0.0 <= delta < math.pi:
        raise ValueError(f"delta must lie in [0, pi), got {delta}")
    alpha = params.alpha
    log_base = float(log_ndtr(-2.0 * alpha))
    baseline = bob_ber_analytic(params)
    if delta == 0.0:
        return AnalyticPenalty(baseline, baseline, 0.0, -math.inf)

    nodes, weights = leggauss(_QUADRATURE_NODES)
    xi = 0.25 * delta * (nodes + 1.0)
    # mean over [0, delta/2] = 0.5 * sum(w_k f(xi_k))
    log_mean = math.log(0.5) + float(logsumexp(log_ndtr(-2.0 * alpha * np.cos(xi)) + np.log(weights)))
    if log_mean <= log_base:
        log_penalty = -math.inf
    else:
        log_penalty = log_mean + math.log1p(-math.exp(log_base - log_mean))
    return AnalyticPenalty(
        ber=math.exp(log_mean),
        baseline=baseline,
        penalty=math.exp(log_penalty) if log_penalty > -math.inf else 0.0,
        log10_penalty=log_penalty / math.log(10.0),
    )


@dataclass
class DsrPenalty:
    """Bob's Monte Carlo error with and without DSR plus the analytic reference."""

    S: float
    M: int
    delta: float
    with_dsr: BerEstimate
    without_dsr: BerEstimate
    analytic: AnalyticPenalty

    @property
    def penalty(self) -> float:
        return self.with_dsr.ber - self.without_dsr.ber

    def to_dict(self) -> Dict[str, Any]:
        return {
            "S": self.S,
            "M": self.M,
            "delta": self.delta,
            "with_dsr": self.with_dsr.to_dict(),
            "without_dsr": self.without_dsr.to_dict(),
            "penalty": self.penalty,
            "analytic": self.analytic.to_dict(),
        }


def bob_penalty(
    params: SystemParams,
    policy: DsrPolicy,
    n_trials: int,
    rng: np.random.Generator,
    workers: Optional[int] = None,
) -> DsrPenalty:
    """
    Bob's decoding penalty from DSR with his receiver unchanged.

    Both arms run from the same child seed (common random numbers): slot for
    slot they see the same keystream, plaintext and receiver noise, and the
    reference arm draws zero-width offsets. The Monte Carlo penalty is then
    non-decreasing in ``delta`` for every seed.
    """
    policy = policy.for_params(params)
    child = int(rng.integers(0, 2**63 - 1))
    reference = DsrPolicy(0.0)

    def randomized(frame: CipherFrame, chunk_rng: np.random.Generator) -> CipherFrame:
        return dsr_apply(frame, policy, chunk_rng)

    def unrandomized(frame: CipherFrame, chunk_rng: np.random.Generator) -> CipherFrame:
        return dsr_apply(frame, reference, chunk_rng)

    with_dsr = roundtrip_ber(
        params, None, n_trials, np.random.default_rng(child), randomizer=randomized, workers=workers
    )
    without_dsr = roundtrip_ber(
        params, None, n_trials, np.random.default_rng(child), randomizer=unrandomized, workers=workers
    )
    result = DsrPenalty(
        S=params.S,
        M=params.M,
        delta=policy.delta,
        with_dsr=with_dsr,
        without_dsr=without_dsr,
        analytic=dsr_ber_analytic(params, policy.delta),
    )
    logger.debug(
        "bob_penalty S=%g delta=%.4g: %d vs %d errors",
        params.S,
        policy.delta,
        with_dsr.errors,
        without_dsr.errors,
    )
    return result


def scaled_constellation(gamma_target: float, S: float) -> int:
    """Power of two nearest (in log scale) to pi * Gamma * sqrt(S)."""
    if gamma_target <= 0 or S <= 0:
        raise ValueError("gamma_target and S must be positive")
    exponent = round(math.log2(math.pi * gamma_target * math.sqrt(S)))
    return 2 ** max(1, exponent)


@dataclass
class ScalingRow:
    S: float
    M: int
    delta: float
    bob_ber: float
    bob_penalty: float
    log10_bob_penalty: float
    eve_gamma: float
    eve_gamma_stderr: float
    eve_coverage: float
    gamma_analytic: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ScalingTable:
    """Rows of the DSR scaling experiment and the trend checks on them."""

    gamma_target: float
    coupling: float
    rows: List[ScalingRow] = field(default_factory=list)

    def failures(self, factor: float = 2.0) -> List[str]:
        return check_scaling(self.rows, self.gamma_target, factor)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma_target": self.gamma_target,
            "coupling": self.coupling,
            "rows": [row.to_dict() for row in self.rows],
            "failures": self.failures(),
        }


def dsr_scaling_experiment(
    gamma_target: float,
    S_list: Sequence[float],
    n_trials: int,
    rng: np.random.Generator,
    coupling: float = DEFAULT_COUPLING,
    delta: Optional[float] = None,
    gamma_trials: Optional[int] = None,
    workers: Optional[int] = None,
) -> ScalingTable:
    """
    Grow S and M together at fixed M / sqrt(S) and trace Bob's penalty and Eve's Gamma.

    For each S the constellation is ``scaled_constellation(gamma_target, S)``,
    the DSR width is ``coupling / sqrt(S)`` (or the fixed ``delta``) and Eve's
    empirical Gamma uses the 2/sqrt(S) wedge on dithered states. Bob's trend
    is read from the analytic log penalty; the Monte Carlo penalty is zero at
    desk-scale trial counts once S is large.
    """
    table = ScalingTable(gamma_target=gamma_target, coupling=coupling)
    for S in S_list:
        params = SystemParams(scaled_constellation(gamma_target, S), S)
        policy = DsrPolicy(delta) if delta is not None else DsrPolicy.coupled(coupling, params)
        penalty = bob_penalty(params, policy, n_trials, rng, workers=workers)
        eve = gamma_empirical(
            params,
            WedgePolicy.paper_default(),
            gamma_trials or n_trials,
            rng,
            phase_dither=policy.delta,
            workers=workers,
        )
        row = ScalingRow(
            S=params.S,
            M=params.M,
            delta=policy.delta,
            bob_ber=penalty.with_dsr.ber,
            bob_penalty=penalty.penalty,
            log10_bob_penalty=penalty.analytic.log10_penalty,
            eve_gamma=eve.mean,
            eve_gamma_stderr=eve.stderr,
            eve_coverage=eve.coverage,
            gamma_analytic=gamma_analytic(params),
        )
        logger.info("DSR S=%g M=%d delta=%.4g: eve gamma %.3f", S, params.M, policy.delta, eve.mean)
        table.rows.append(row)
    return table


def check_scaling(rows: Sequence[ScalingRow], gamma_target: float, factor: float = 2.0) -> List[str]:
    """
    Trend checks of the scaling experiment.

    Returns:
        Human-readable failures; empty when Bob's log penalty strictly
        decreases along the rows and every Eve Gamma is within ``factor``
        of the target
    """
    problems = []
    for prev, row in zip(rows, rows[1:]):
        if not row.log10_bob_penalty < prev.log10_bob_penalty:
            problems.append(
                f"Bob's penalty does not decrease from S={prev.S:g} to S={row.S:g}"
            )
    for row in rows:
        if not gamma_target / factor <= row.eve_gamma <= gamma_target * factor:
            problems.append(
                f"Eve gamma {row.eve_gamma:.3f} at S={row.S:g} is outside "
                f"[{gamma_target / factor:g}, {gamma_target * factor:g}]"
            )
    return problems
