"""Piecewise-constant functions on dyadic cells of G and G x G.

Cell convention: at resolution ``bits`` the cell index ``j`` encodes the
first ``bits`` coordinates with x_0 as the most significant bit, so
``x_k = (j >> (bits - 1 - k)) & 1``.  The interval I_n(0) is the leading
block of ``2**(bits - n)`` cells, and refining a function replicates each
value ``2**extra`` times.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from walsh_lab.config import CAPS


class ResolutionError(ValueError):
    """A resolution is negative, exceeds its cap, or is too coarse."""


def check_bits(bits: int, dim: int = 1) -> int:
    cap = CAPS.bits_1d if dim == 1 else CAPS.bits_2d
    if int(bits) != bits or bits < 0:
        raise ResolutionError(f"resolution must be a nonnegative integer, got {bits!r}")
    if bits > cap:
        raise ResolutionError(f"resolution {bits} exceeds the {dim}D cap of {cap} bits")
    return int(bits)


def _frozen(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DyadicPoint:
    """First ``len(coords)`` coordinates of a point of G."""

    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if any(c not in (0, 1) for c in coords):
            raise ValueError("coordinates must be 0 or 1")
        object.__setattr__(self, "coords", coords)

    @property
    def bits(self) -> int:
        return len(self.coords)

    def cell(self, bits: int | None = None) -> int:
        """Index of the cell I_bits(x) at resolution ``bits``."""
        bits = self.bits if bits is None else bits
        if bits > self.bits:
            raise ResolutionError(f"point resolved to {self.bits} bits, {bits} requested")
        j = 0
        for c in self.coords[:bits]:
            j = (j << 1) | c
        return j

    @classmethod
    def from_cell(cls, j: int, bits: int) -> "DyadicPoint":
        if not 0 <= j < (1 << bits):
            raise ValueError(f"cell {j} out of range for {bits} bits")
        return cls(tuple((j >> (bits - 1 - k)) & 1 for k in range(bits)))

    @classmethod
    def zero(cls, bits: int) -> "DyadicPoint":
        return cls((0,) * bits)

    @classmethod
    def generator(cls, n: int, bits: int) -> "DyadicPoint":
        """e_n: n-th coordinate 1, all others 0."""
        if not 0 <= n < bits:
            raise ValueError(f"generator e_{n} needs more than {bits} bits")
        return cls(tuple(int(k == n) for k in range(bits)))

    @classmethod
    def random(cls, bits: int, rng: random.Random | np.random.Generator) -> "DyadicPoint":
        if isinstance(rng, np.random.Generator):
            coords = rng.integers(0, 2, size=bits).tolist()
        else:
            coords = [rng.getrandbits(1) for _ in range(bits)]
        return cls(tuple(coords))


@dataclass(frozen=True, eq=False)
class StepFn1:
    """Function on G constant on the cells of resolution ``bits``."""

    bits: int
    values: np.ndarray

    def __post_init__(self):
        bits = check_bits(self.bits, 1)
        values = _frozen(self.values)
        if values.shape != (1 << bits,):
            raise ValueError(f"expected {1 << bits} values, got shape {values.shape}")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, c: float, bits: int = 0) -> "StepFn1":
        return cls(bits, np.full(1 << bits, float(c)))

    def refine(self, bits: int) -> "StepFn1":
        if bits < self.bits:
            raise ResolutionError(f"cannot refine {self.bits} bits down to {bits}")
        if bits == self.bits:
            return self
        check_bits(bits, 1)
        return StepFn1(bits, np.repeat(self.values, 1 << (bits - self.bits)))

    def __call__(self, x: DyadicPoint) -> float:
        return float(self.values[x.cell(self.bits)])

    def _binary(self, other, op):
        if isinstance(other, StepFn1):
            bits = max(self.bits, other.bits)
            return StepFn1(bits, op(self.refine(bits).values, other.refine(bits).values))
        return StepFn1(self.bits, op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self)._binary(other, np.add)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return StepFn1(self.bits, -self.values)


@dataclass(frozen=True, eq=False)
class StepFn2:
    """Function on G x G constant on cells of shape 2^-bits_x by 2^-bits_y.

    ``values[i, j]`` is the value on (x-cell i) x (y-cell j).
    """

    bits_x: int
    bits_y: int
    values: np.ndarray

    def __post_init__(self):
        bx = check_bits(self.bits_x, 2)
        by = check_bits(self.bits_y, 2)
        values = _frozen(self.values)
        if values.shape != (1 << bx, 1 << by):
            raise ValueError(f"expected shape {(1 << bx, 1 << by)}, got {values.shape}")
        object.__setattr__(self, "bits_x", bx)
        object.__setattr__(self, "bits_y", by)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, c: float, bits_x: int = 0, bits_y: int = 0) -> "StepFn2":
        return cls(bits_x, bits_y, np.full((1 << bits_x, 1 << bits_y), float(c)))

    @classmethod
    def zeros(cls, bits_x: int, bits_y: int) -> "StepFn2":
        return cls.constant(0.0, bits_x, bits_y)

    def refine(self, bits_x: int, bits_y: int) -> "StepFn2":
        if bits_x < self.bits_x or bits_y < self.bits_y:
            raise ResolutionError(
                f"cannot refine ({self.bits_x}, {self.bits_y}) down to ({bits_x}, {bits_y})"
            )
        if (bits_x, bits_y) == (self.bits_x, self.bits_y):
            return self
        check_bits(bits_x, 2)
        check_bits(bits_y, 2)
        v = np.repeat(self.values, 1 << (bits_x - self.bits_x), axis=0)
        v = np.repeat(v, 1 << (bits_y - self.bits_y), axis=1)
        return StepFn2(bits_x, bits_y, v)

    def __call__(self, x: DyadicPoint, y: DyadicPoint) -> float:
        return float(self.values[x.cell(self.bits_x), y.cell(self.bits_y)])

    def _binary(self, other, op):
        if isinstance(other, StepFn2):
            bx = max(self.bits_x, other.bits_x)
            by = max(self.bits_y, other.bits_y)
            a = self.refine(bx, by).values
            b = other.refine(bx, by).values
            return StepFn2(bx, by, op(a, b))
        return StepFn2(self.bits_x, self.bits_y, op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self)._binary(other, np.add)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return StepFn2(self.bits_x, self.bits_y, -self.values)


StepFn = Union[StepFn1, StepFn2]


def _cell_measure(f: StepFn) -> float:
    if isinstance(f, StepFn1):
        return 2.0 ** -f.bits
    return 2.0 ** -(f.bits_x + f.bits_y)


def integrate(f: StepFn) -> float:
    """Haar integral; mu(G) = 1."""
    return float(np.sum(f.values) * _cell_measure(f))


def _check_p(p: float) -> float:
    if not p > 0:
        raise ValueError(f"p must be positive, got {p!r}")
    return float(p)


def lp_quasinorm(f: StepFn, p: float) -> float:
    p = _check_p(p)
    a = np.abs(f.values)
    if p == 1.0:
        return float(np.mean(a))
    return float(np.mean(a**p) ** (1.0 / p))


def weak_lp_batch(values: np.ndarray, p: float) -> np.ndarray:
    """weak-L_p quasi-norms of equally weighted cell arrays along the last axis.

    With |f| sorted in decreasing order s_0 >= s_1 >= ..., the cells with
    |f| >= s_i number at least i + 1, and exactly i + 1 at the last index
    of each tie run.  Hence max_i s_i ((i + 1) / m)^(1/p) equals the
    maximum of v mu(|f| >= v)^(1/p) over the distinct levels v.
    """
    p = _check_p(p)
    a = np.abs(np.asarray(values, dtype=np.float64))
    m = a.shape[-1]
    s = -np.sort(-a, axis=-1)
    mass = (np.arange(1, m + 1) / m) ** (1.0 / p)
    return np.max(s * mass, axis=-1)


def weak_lp_quasinorm(f: StepFn, p: float) -> float:
    """sup over lambda > 0 of lambda * mu(|f| > lambda)^(1/p), exact for step functions."""
    return float(weak_lp_batch(f.values.ravel(), p))


def tensor_product(g: StepFn1, h: StepFn1) -> StepFn2:
    return StepFn2(g.bits, h.bits, np.outer(g.values, h.values))


def interval_indicator(n: int, bits: int) -> StepFn1:
    """Indicator of I_n = I_n(0)."""
    if not 0 <= n <= bits:
        raise ResolutionError(f"I_{n} is not resolved at {bits} bits")
    v = np.zeros(1 << bits)
    v[: 1 << (bits - n)] = 1.0
    return StepFn1(bits, v)


def complement_indicator(n: int, bits: int) -> StepFn1:
    """Indicator of G minus I_n: points whose first n coordinates are not all zero."""
    if not 0 <= n <= bits:
        raise ResolutionError(f"G \\ I_{n} is not resolved at {bits} bits")
    return 1.0 - interval_indicator(n, bits)


@dataclass(frozen=True, eq=False)
class SeparableSum2:
    """(x, y) -> sum_i c_i g_i(x) h_i(y), stored by its 1D factors."""

    terms: tuple[tuple[float, StepFn1, StepFn1], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((float(c), g, h) for c, g, h in self.terms)
        )

    @property
    def bits_x(self) -> int:
        return max((g.bits for _, g, _ in self.terms), default=0)

    @property
    def bits_y(self) -> int:
        return max((h.bits for _, _, h in self.terms), default=0)

    def __add__(self, other: "SeparableSum2") -> "SeparableSum2":
        return SeparableSum2(self.terms + other.terms)


def materialize(s: SeparableSum2, bits_x: int | None = None, bits_y: int | None = None) -> StepFn2:
    bits_x = s.bits_x if bits_x is None else bits_x
    bits_y = s.bits_y if bits_y is None else bits_y
    if bits_x < s.bits_x or bits_y < s.bits_y:
        raise ResolutionError("target resolution is coarser than a factor")
    check_bits(bits_x, 2)
    check_bits(bits_y, 2)
    out = np.zeros((1 << bits_x, 1 << bits_y))
    for c, g, h in s.terms:
        out += c * np.outer(g.refine(bits_x).values, h.refine(bits_y).values)
    return StepFn2(bits_x, bits_y, out)


def evaluate_at(s: SeparableSum2, x: DyadicPoint, y: DyadicPoint) -> float:
    """Pointwise value by one cell lookup per factor; no grid is built."""
    if x.bits < s.bits_x or y.bits < s.bits_y:
        raise ResolutionError(
            f"point resolved to ({x.bits}, {y.bits}) bits, sum needs ({s.bits_x}, {s.bits_y})"
        )
    total = 0.0
    for c, g, h in s.terms:
        total += c * g.values[x.cell(g.bits)] * h.values[y.cell(h.bits)]
    return total


def cells_of(points: Sequence[DyadicPoint], bits: int) -> np.ndarray:
    return np.array([pt.cell(bits) for pt in points], dtype=np.int64)
