"""
Exact measurement statistics for coherent states.

Conventions (owned by this module):

- heterodyne outcome y = y1 + i*y2 has density (1/pi) exp(-|y - alpha e^{i theta}|^2),
  i.e. independent Gaussians with variance 1/2 per quadrature;
- homodyne at local-oscillator angle phi has mean alpha cos(theta - phi) and
  variance 1/4 (vacuum quadrature noise).
"""

import math
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import erfc

from .constellation import TWO_PI, SystemParams, wrap_angle

ArrayLike = Union[float, np.ndarray]

HETERODYNE_VARIANCE = 0.5
HOMODYNE_VARIANCE = 0.25


class QuadratureSample(NamedTuple):
    """Heterodyne outcome; fields are floats or equally shaped arrays."""

    y1: ArrayLike
    y2: ArrayLike

    def as_complex(self) -> ArrayLike:
        return np.asarray(self.y1) + 1j * np.asarray(self.y2)


def heterodyne_sample(
    theta: ArrayLike, params: SystemParams, rng: np.random.Generator
) -> QuadratureSample:
    """
    Sample heterodyne outcomes for coherent state(s) at angle ``theta``.

    Noise for y1 and y2 is drawn in a single call so a fixed generator state
    always yields the same sequence.
    """
    theta = np.asarray(theta, dtype=np.float64)
    noise = rng.normal(0.0, math.sqrt(HETERODYNE_VARIANCE), size=(2,) + theta.shape)
    y1 = params.alpha * np.cos(theta) + noise[0]
    y2 = params.alpha * np.sin(theta) + noise[1]
    if theta.ndim == 0:
        return QuadratureSample(float(y1), float(y2))
    return QuadratureSample(y1, y2)


def homodyne_sample(
    theta: ArrayLike,
    lo_angle: ArrayLike,
    params: SystemParams,
    rng: np.random.Generator,
) -> ArrayLike:
    """Sample homodyne outcome(s) at local-oscillator angle ``lo_angle``."""
    mean = homodyne_mean(theta, lo_angle, params)
    out = mean + rng.normal(0.0, math.sqrt(HOMODYNE_VARIANCE), size=np.shape(mean))
    return float(out) if np.ndim(out) == 0 else out


def homodyne_mean(theta: ArrayLike, lo_angle: ArrayLike, params: SystemParams) -> ArrayLike:
    """Noiseless homodyne outcome ``alpha cos(theta - lo_angle)``."""
    return params.alpha * np.cos(np.asarray(theta, dtype=np.float64) - lo_angle)


def phase_estimate(sample: QuadratureSample) -> ArrayLike:
    """
    Phase of a heterodyne outcome, wrapped into [0, 2*pi).

    Raises:
        ValueError: If any outcome is exactly the origin (phase undefined)
    """
    y1 = np.asarray(sample.y1, dtype=np.float64)
    y2 = np.asarray(sample.y2, dtype=np.float64)
    if np.any((y1 == 0.0) & (y2 == 0.0)):
        raise ValueError("phase of the zero vector is undefined")
    return wrap_angle(np.arctan2(y2, y1))


def coherent_overlap(theta1: ArrayLike, theta2: ArrayLike, params: SystemParams) -> complex:
    """Inner product <alpha e^{i theta1} | alpha e^{i theta2}>."""
    delta = np.asarray(theta2, dtype=np.float64) - np.asarray(theta1, dtype=np.float64)
    value = np.exp(-params.S + params.S * np.exp(1j * delta))
    return complex(value) if np.ndim(value) == 0 else value


def helstrom_binary_error(params: SystemParams) -> float:
    """Minimum error for discriminating |alpha> from |-alpha> with equal priors."""
    # 1 - e^{-4S} computed without cancellation for small S
    return 0.5 * (1.0 - math.sqrt(-math.expm1(-4.0 * params.S)))


def angular_distance(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """Shortest wrap-around distance between two angles, in [0, pi]."""
    d = np.mod(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64), TWO_PI)
    d = np.minimum(d, TWO_PI - d)
    return float(d) if np.ndim(d) == 0 else d


def phase_error_pdf(phi: ArrayLike, params: SystemParams) -> ArrayLike:
    """
    Density of the heterodyne phase error on (-pi, pi].

    With rho = S the error phi = estimate - theta has density
    ``e^{-rho} / (2 pi) + sqrt(rho) cos(phi) e^{-rho sin^2 phi}
    erfc(-sqrt(rho) cos(phi)) / (2 sqrt(pi))``; uniform at S = 0.
    """
    phi = np.asarray(phi, dtype=np.float64)
    root = math.sqrt(params.S)
    c = np.cos(phi)
    value = math.exp(-params.S) / TWO_PI + (
        root * c * np.exp(-params.S * np.sin(phi) ** 2) * erfc(-root * c) / (2.0 * math.sqrt(math.pi))
    )
    return float(value) if np.ndim(value) == 0 else value


def phase_error_tail(half_width: float, params: SystemParams) -> float:
    """P(|phase error| > half_width) from the exact density."""
    if not 0.0 <= half_width <= math.pi:
        raise ValueError(f"half_width must lie in [0, pi], got {half_width}")
    if half_width == math.pi:
        return 0.0
    # breakpoints on the scale of the phase-noise width
    scale = 1.0 / math.sqrt(2.0 * params.S) if params.S > 0 else math.pi
    points = [half_width + k * scale for k in (1, 3, 6, 12) if half_width + k * scale < math.pi]
    value, _ = quad(
        phase_error_pdf, half_width, math.pi, args=(params,),
        points=points or None, limit=200, epsabs=1e-14,
    )
    return min(1.0, max(0.0, 2.0 * value))


def phase_error_quantile(confidence: float, params: SystemParams) -> float:
    """
    Half-width h with P(|phase error| <= h) = confidence.

    Raises:
        ValueError: If confidence is outside (0, 1)
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    return _phase_error_quantile(float(confidence), params)


@lru_cache(maxsize=128)
def _phase_error_quantile(confidence: float, params: SystemParams) -> float:
    target = 1.0 - confidence
    return brentq(lambda h: phase_error_tail(h, params) - target, 0.0, math.pi, xtol=1e-12)
