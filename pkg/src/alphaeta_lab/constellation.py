"""
The mapper: (data bit, keystream symbol) <-> point on the 2M-phase circle.

Grid point ``l`` in [0, 2M) sits at angle ``l * pi / M``. Bit ``x`` under
basis ``z`` lands on ``l = z + M * (x XOR pol(z))``. All exact logic works on
integer indices; radians are produced only for the measurement layer.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, NamedTuple, Union

import numpy as np

from .keystream import bits_per_symbol

ArrayLike = Union[int, float, np.ndarray]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SystemParams:
    """
    Constellation half-size M and signal energy S (mean photon number).

    M must be even so every basis has antipodal end points. Operations that
    draw keystream symbols from a key expander additionally require M to be a
    power of two (see ``m``).
    """

    M: int
    S: float

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 2 or self.M % 2:
            raise ValueError(f"M must be an even integer >= 2, got {self.M}")
        if not self.S >= 0 or math.isinf(self.S):
            raise ValueError(f"S must be a finite value >= 0, got {self.S}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "S", float(self.S))

    @property
    def m(self) -> int:
        """Bits per keystream symbol, log2(M)."""
        return bits_per_symbol(self.M)

    @property
    def is_power_of_two(self) -> bool:
        return self.M & (self.M - 1) == 0

    @property
    def alpha(self) -> float:
        """Coherent amplitude sqrt(S)."""
        return math.sqrt(self.S)

    @property
    def grid_size(self) -> int:
        return 2 * self.M

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class MappedAngle(NamedTuple):
    """A mapper output in both representations."""

    radians: ArrayLike
    index: ArrayLike


def wrap_angle(theta: ArrayLike) -> ArrayLike:
    """Wrap radians into [0, 2*pi)."""
    wrapped = np.mod(theta, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    wrapped = np.where(wrapped >= TWO_PI, 0.0, wrapped)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


def index_to_radians(l: ArrayLike, params: SystemParams) -> ArrayLike:
    """Angle of grid point ``l``."""
    return wrap_angle(np.asarray(l, dtype=np.float64) * math.pi / params.M)


def pol(z: ArrayLike) -> ArrayLike:
    """Parity of the keystream symbol: 0 for even z, 1 for odd z."""
    return np.bitwise_and(z, 1)


def _check_symbols(z: ArrayLike, params: SystemParams) -> np.ndarray:
    zs = np.asarray(z, dtype=np.int64)
    if zs.size and (zs.min() < 0 or zs.max() >= params.M):
        raise ValueError(f"keystream symbol out of range [0, {params.M})")
    return zs


def _check_bits(x: ArrayLike) -> np.ndarray:
    xs = np.asarray(x, dtype=np.int64)
    if xs.size and (xs.min() < 0 or xs.max() > 1):
        raise ValueError("plaintext bits must be 0 or 1")
    return xs


def map_index(x: ArrayLike, z: ArrayLike, params: SystemParams) -> ArrayLike:
    """Integer grid index ``z + M * (x XOR pol(z))``."""
    xs = _check_bits(x)
    zs = _check_symbols(z, params)
    l = zs + params.M * (xs ^ (zs & 1))
    return int(l) if l.ndim == 0 else l


def map_angle(x: ArrayLike, z: ArrayLike, params: SystemParams) -> MappedAngle:
    """
    Map data bit(s) ``x`` under keystream symbol(s) ``z`` to the phase circle.

    Returns:
        MappedAngle(radians, index)

    Raises:
        ValueError: If z >= M or x is not a bit
    """
    l = map_index(x, z, params)
    return MappedAngle(index_to_radians(l, params), l)


def demap_bit(z: ArrayLike, l: ArrayLike, params: SystemParams) -> ArrayLike:
    """
    Recover the data bit from a grid index known to lie on basis ``z``.

    Raises:
        ValueError: If ``l mod M != z``
    """
    zs = _check_symbols(z, params)
    ls = np.asarray(l, dtype=np.int64)
    if ls.size and (ls.min() < 0 or ls.max() >= params.grid_size):
        raise ValueError(f"grid index out of range [0, {params.grid_size})")
    if np.any(ls % params.M != zs):
        raise ValueError(f"grid index {l} does not lie on basis {z} (M={params.M})")
    x = (ls // params.M) ^ (zs & 1)
    return int(x) if x.ndim == 0 else x


def bit_at_index(l: ArrayLike, params: SystemParams) -> ArrayLike:
    """Data bit represented at grid point ``l``: ``floor(l / M) XOR (l mod 2)``."""
    ls = np.asarray(l, dtype=np.int64)
    if ls.size and (ls.min() < 0 or ls.max() >= params.grid_size):
        raise ValueError(f"grid index out of range [0, {params.grid_size})")
    x = (ls // params.M) ^ (ls & 1)
    return int(x) if x.ndim == 0 else x


def constellation_table(params: SystemParams) -> List[Dict[str, Any]]:
    """One row per grid point: index, angle_radians, bit, basis z."""
    l = np.arange(params.grid_size)
    angles = index_to_radians(l, params)
    bits = bit_at_index(l, params)
    return [
        {
            "index": int(i),
            "angle_radians": float(a),
            "bit": int(b),
            "basis": int(i % params.M),
        }
        for i, a, b in zip(l, angles, bits)
    ]
