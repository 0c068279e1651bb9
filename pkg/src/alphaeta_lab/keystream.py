"""
Key expansion: LFSR running keys, symbol chunking and GF(2) linear forms.

Register convention (used everywhere in the package):

- output bit ``t`` is register cell 0 before the ``t``-th shift;
- the feedback bit is the XOR of the tapped cells;
- the register shifts toward index 0 (cell j <- cell j+1, top cell <- feedback).

Equivalently the output sequence is the seed followed by the recurrence
``a[t + L] = XOR_{j in taps} a[t + j]``.

Chunking reads the first generated bit of each m-bit block as the most
significant bit of the keystream symbol.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

BitsLike = Union[str, Sequence[int], np.ndarray]

# Taps giving a primitive characteristic polynomial x^L + sum(x^j for j in taps).
PRIMITIVE_TAPS: Dict[int, Tuple[int, ...]] = {
    2: (0, 1),
    3: (0, 1),
    4: (0, 1),
    5: (0, 2),
    6: (0, 1),
    7: (0, 1),
    8: (0, 2, 3, 4),
    9: (0, 4),
    10: (0, 3),
    11: (0, 2),
    12: (0, 1, 4, 6),
    15: (0, 1),
    16: (0, 2, 3, 5),
    17: (0, 3),
    18: (0, 7),
    20: (0, 3),
    22: (0, 1),
    23: (0, 5),
    24: (0, 1, 2, 7),
    28: (0, 3),
}


def parse_bits(bits: BitsLike) -> np.ndarray:
    """Convert an ASCII 0/1 string or integer sequence to a uint8 bit array."""
    if isinstance(bits, str):
        text = bits.strip()
        if any(ch not in "01" for ch in text):
            raise ValueError(f"bit string may only contain 0 and 1, got {bits!r}")
        return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
    arr = np.asarray(bits)
    if arr.dtype not in (np.uint8, np.bool_):
        arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bit sequence may only contain 0 and 1")
    return arr.astype(np.uint8, copy=False)


def format_bits(bits: Sequence[int]) -> str:
    """Render bits as an ASCII 0/1 string, first bit first."""
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


def bits_per_symbol(M: int) -> int:
    """
    Return m = log2(M) for a power-of-two constellation size.

    Raises:
        ValueError: If M is not a power of two >= 2
    """
    if isinstance(M, bool) or int(M) != M or M < 2 or (int(M) & (int(M) - 1)):
        raise ValueError(f"M must be a power of two >= 2, got {M}")
    return int(M).bit_length() - 1


@dataclass(frozen=True)
class SeedKey:
    """Shared secret K as an ordered bit sequence s_0 ... s_{|K|-1}."""

    bits: Tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in parse_bits(self.bits))
        if len(bits) < 2:
            raise ValueError(f"seed key needs at least 2 bits, got {len(bits)}")
        object.__setattr__(self, "bits", bits)

    @property
    def length(self) -> int:
        return len(self.bits)

    @classmethod
    def from_string(cls, text: str) -> "SeedKey":
        """Build from an ASCII 0/1 string; the first character is s_0."""
        return cls(tuple(parse_bits(text)))

    @classmethod
    def from_int(cls, value: int, length: int) -> "SeedKey":
        """Build from an integer whose bit j is s_j."""
        if value < 0 or value >= 2**length:
            raise ValueError(f"seed value {value} does not fit in {length} bits")
        return cls(tuple((value >> j) & 1 for j in range(length)))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "SeedKey":
        """Draw a uniformly random key."""
        return cls(tuple(rng.integers(0, 2, size=length)))

    def to_int(self) -> int:
        return sum(b << j for j, b in enumerate(self.bits))

    def to_string(self) -> str:
        return format_bits(self.bits)

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)


@dataclass(frozen=True)
class LfsrSpec:
    """Register length and tap positions of the ENC expander."""

    length: int
    taps: Tuple[int, ...]

    def __post_init__(self):
        taps = tuple(sorted({int(t) for t in self.taps}))
        if self.length < 2:
            raise ValueError(f"LFSR length must be >= 2, got {self.length}")
        if not taps:
            raise ValueError("LFSR taps must be nonempty")
        if taps[0] < 0 or taps[-1] >= self.length:
            raise ValueError(f"LFSR taps {taps} must lie in [0, {self.length})")
        object.__setattr__(self, "taps", taps)

    @property
    def block(self) -> int:
        """Number of output bits computable in one vectorised step."""
        return self.length - self.taps[-1]

    @classmethod
    def primitive(cls, length: int) -> "LfsrSpec":
        """Maximal-length register of the given size."""
        if length not in PRIMITIVE_TAPS:
            known = ", ".join(str(k) for k in sorted(PRIMITIVE_TAPS))
            raise ValueError(f"No primitive taps tabulated for length {length}. Known: {known}")
        return cls(length, PRIMITIVE_TAPS[length])

    def to_dict(self) -> dict:
        return {"length": self.length, "taps": list(self.taps)}


@dataclass(frozen=True)
class Gf2LinearForm:
    """Affine GF(2) function of the seed: constant XOR <coefficients, seed>."""

    coefficients: Tuple[int, ...]
    constant: int = 0

    def evaluate(self, seed: SeedKey) -> int:
        if seed.length != len(self.coefficients):
            raise ValueError(
                f"form has {len(self.coefficients)} coefficients, seed has {seed.length} bits"
            )
        acc = self.constant
        for c, s in zip(self.coefficients, seed.bits):
            acc ^= c & s
        return acc


def seed_matrix(start: int, count: int, length: int) -> np.ndarray:
    """
    Bit matrix of consecutive integer seeds.

    Row r holds the bits of seed ``start + r``; column j is s_j.
    """
    values = np.arange(start, start + count, dtype=np.int64)
    return ((values[:, None] >> np.arange(length, dtype=np.int64)) & 1).astype(np.uint8)


def lfsr_expand_many(seeds: np.ndarray, spec: LfsrSpec, nbits: int) -> np.ndarray:
    """
    Expand a batch of seeds at once.

    Args:
        seeds: (B, L) uint8 array, one seed per row
        spec: Register spec with length L
        nbits: Output bits per seed

    Returns:
        (B, nbits) uint8 array of running-key bits
    """
    seeds = np.asarray(seeds, dtype=np.uint8)
    if seeds.ndim != 2 or seeds.shape[1] != spec.length:
        raise ValueError(
            f"seed batch must have shape (B, {spec.length}), got {seeds.shape}"
        )
    if nbits < 0:
        raise ValueError(f"nbits must be >= 0, got {nbits}")

    L = spec.length
    out = np.empty((seeds.shape[0], max(nbits, L)), dtype=np.uint8)
    out[:, :L] = seeds
    t = L
    while t < nbits:
        stop = min(t + spec.block, nbits)
        span = stop - t
        first = t - L + spec.taps[0]
        acc = out[:, first:first + span].copy()
        for j in spec.taps[1:]:
            acc ^= out[:, t - L + j:t - L + j + span]
        out[:, t:stop] = acc
        t = stop
    return out[:, :nbits]


def lfsr_expand(seed: SeedKey, spec: LfsrSpec, nbits: int) -> np.ndarray:
    """
    Expand a seed key into ``nbits`` running-key bits.

    Raises:
        ValueError: If the seed length differs from the register length
    """
    if seed.length != spec.length:
        raise ValueError(
            f"seed has {seed.length} bits but the LFSR has length {spec.length}"
        )
    return lfsr_expand_many(seed.as_array()[None, :], spec, nbits)[0]


def advance_state(seed: SeedKey, spec: LfsrSpec, clocks: int) -> SeedKey:
    """Register contents after ``clocks`` shifts: output bits clocks ... clocks+L-1."""
    if clocks < 0:
        raise ValueError(f"clocks must be >= 0, got {clocks}")
    return SeedKey(tuple(lfsr_expand(seed, spec, clocks + spec.length)[clocks:]))


def rewind_state(state: SeedKey, spec: LfsrSpec, clocks: int) -> SeedKey:
    """
    Inverse of ``advance_state``: the seed that reaches ``state`` after ``clocks`` shifts.

    Each step solves the recurrence for its lowest term,
    ``a[t] = a[t + L] XOR (XOR of a[t + j] for the other taps j)``.

    Raises:
        ValueError: If tap 0 is missing, so the register is not invertible
    """
    if clocks < 0:
        raise ValueError(f"clocks must be >= 0, got {clocks}")
    if spec.taps[0] != 0:
        raise ValueError(f"taps {spec.taps} lack tap 0; the register cannot be rewound")
    if state.length != spec.length:
        raise ValueError(
            f"state has {state.length} bits but the LFSR has length {spec.length}"
        )
    window = list(state.bits)
    for _ in range(clocks):
        # window holds a[t+1 .. t+L]; recover a[t]
        bit = window[-1]
        for j in spec.taps[1:]:
            bit ^= window[j - 1]
        window = [bit] + window[:-1]
    return SeedKey(tuple(window))


def chunk_symbols(bits: BitsLike, M: int) -> np.ndarray:
    """
    Chop running-key bits into m-bit keystream symbols Z_i.

    Works along the last axis, so a (B, n*m) batch yields (B, n) symbols.

    Raises:
        ValueError: If M is not a power of two or the length is not a multiple of m
    """
    m = bits_per_symbol(M)
    arr = parse_bits(bits)
    if arr.shape[-1] % m:
        raise ValueError(
            f"{arr.shape[-1]} running-key bits are not divisible into {m}-bit symbols"
        )
    weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
    blocks = arr.reshape(arr.shape[:-1] + (arr.shape[-1] // m, m)).astype(np.int64)
    return blocks @ weights


def linear_form_matrix(spec: LfsrSpec, nbits: int) -> np.ndarray:
    """
    Coefficient rows of the first ``nbits`` output bits as functions of the seed.

    Propagates the unit seeds e_0 ... e_{L-1} through the register; by
    linearity entry [t, j] is the coefficient of s_j in output bit t.

    Returns:
        (nbits, L) uint8 matrix
    """
    return lfsr_expand_many(np.eye(spec.length, dtype=np.uint8), spec, nbits).T.copy()


def symbol_linear_forms(spec: LfsrSpec, i: int, M: int) -> List[Gf2LinearForm]:
    """
    Express each bit of keystream symbol Z_i (1-based) as a GF(2) form of the seed.

    Form j corresponds to bit j of the symbol, j = 0 being the MSB.
    """
    if i < 1:
        raise ValueError(f"slot index is 1-based, got {i}")
    m = bits_per_symbol(M)
    rows = linear_form_matrix(spec, i * m)[(i - 1) * m:]
    return [Gf2LinearForm(tuple(int(c) for c in row), 0) for row in rows]


def nonlinear_filter(bits: BitsLike, window: int = 3) -> np.ndarray:
    """
    Nonlinear output filter over a sliding window of running-key bits.

    ``out[t] = in[t] XOR (in[t+1] AND ... AND in[t+window-1])``; with the
    default window of 3 this is ``in[t] XOR (in[t+1] AND in[t+2])``. Windows
    overlap, so the output is ``window - 1`` bits shorter than the input.
    Operates along the last axis.
    """
    if window < 2:
        raise ValueError(f"filter window must be >= 2, got {window}")
    arr = parse_bits(bits) if isinstance(bits, str) else np.asarray(bits, dtype=np.uint8)
    n = arr.shape[-1]
    if n < window:
        raise ValueError(f"nonlinear filter needs at least {window} bits, got {n}")
    out_len = n - window + 1
    product = arr[..., 1:1 + out_len].copy()
    for k in range(2, window):
        product &= arr[..., k:k + out_len]
    return (arr[..., :out_len] ^ product).astype(np.uint8)


class LfsrExpander:
    """ENC box backed by a plain LFSR."""

    linear = True

    def __init__(self, spec: LfsrSpec):
        self.spec = spec

    @property
    def key_bits(self) -> int:
        return self.spec.length

    def expand(self, seed: SeedKey, nbits: int) -> np.ndarray:
        if seed.length != self.spec.length:
            raise ValueError(
                f"seed has {seed.length} bits but the LFSR has length {self.spec.length}"
            )
        return self.expand_many(seed.as_array()[None, :], nbits)[0]

    def expand_many(self, seeds: np.ndarray, nbits: int) -> np.ndarray:
        return lfsr_expand_many(seeds, self.spec, nbits)

    def describe(self) -> dict:
        return {"kind": "lfsr", **self.spec.to_dict()}


class FilteredLfsrExpander(LfsrExpander):
    """
    LFSR followed by ``nonlinear_filter``.

    The first ``warmup`` register outputs are discarded before filtering
    (defaults to the register length). The linear term of output bit t is
    register output ``t + warmup``, a linear form of the state after
    ``warmup`` clocks, and that state determines the seed.
    """

    linear = False

    def __init__(self, spec: LfsrSpec, window: int = 3, warmup: Optional[int] = None):
        super().__init__(spec)
        if window < 2:
            raise ValueError(f"filter window must be >= 2, got {window}")
        self.window = window
        self.warmup = spec.length if warmup is None else int(warmup)
        if self.warmup < 0:
            raise ValueError(f"warmup must be >= 0, got {self.warmup}")

    def expand_many(self, seeds: np.ndarray, nbits: int) -> np.ndarray:
        raw = lfsr_expand_many(seeds, self.spec, nbits + self.warmup + self.window - 1)
        return nonlinear_filter(raw[:, self.warmup:], self.window)

    def describe(self) -> dict:
        return {
            "kind": "filtered_lfsr",
            "window": self.window,
            "warmup": self.warmup,
            **self.spec.to_dict(),
        }


def make_expander(
    spec: LfsrSpec,
    nonlinear: bool = False,
    window: int = 3,
    warmup: Optional[int] = None,
) -> LfsrExpander:
    """Build the expander selected by configuration."""
    if nonlinear:
        return FilteredLfsrExpander(spec, window=window, warmup=warmup)
    return LfsrExpander(spec)


def keystream_symbols(expander: LfsrExpander, seed: SeedKey, n: int, M: int) -> np.ndarray:
    """First ``n`` keystream symbols produced by ``expander`` from ``seed``."""
    m = bits_per_symbol(M)
    return chunk_symbols(expander.expand(seed, n * m), M)
