"""Dyadic martingales on G x G, maximal function and p-atoms.

A martingale is stored by its finest stabilized level.  Level n is the
conditional expectation on the dyadic squares I_n(x) x I_n(y), which for
the leading-bit cell convention is a block average over contiguous
``2**(N-n)``-sized blocks along both axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from walsh_lab.dyadic import (
    DyadicPoint,
    ResolutionError,
    StepFn2,
    integrate,
    lp_quasinorm,
)


def block_average(values: np.ndarray, n: int) -> np.ndarray:
    """Average of a square 2^N x 2^N grid over its 2^n x 2^n dyadic squares."""
    size = values.shape[0]
    block = size >> n
    return values.reshape(1 << n, block, 1 << n, block).mean(axis=(1, 3))


def _expand(coarse: np.ndarray, factor: int) -> np.ndarray:
    return np.repeat(np.repeat(coarse, factor, axis=0), factor, axis=1)


@dataclass(frozen=True, eq=False)
class Martingale2:
    """One-parameter dyadic martingale f_n = E[finest | F_n].

    ``stabilization_level`` is the first n with f_n equal to ``finest``;
    it is detected from the data when not given.
    """

    finest: StepFn2
    stabilization_level: int | None = None

    def __post_init__(self):
        if self.finest.bits_x != self.finest.bits_y:
            raise ResolutionError("a martingale needs a square resolution")
        level = self.stabilization_level
        if level is None:
            level = _detect_stabilization(self.finest.values)
        if not 0 <= level <= self.bits:
            raise ValueError(f"stabilization level {level} outside [0, {self.bits}]")
        object.__setattr__(self, "stabilization_level", int(level))

    @property
    def bits(self) -> int:
        return self.finest.bits_x

    @classmethod
    def from_function(cls, f: StepFn2) -> "Martingale2":
        bits = max(f.bits_x, f.bits_y)
        return cls(f.refine(bits, bits))


def _detect_stabilization(values: np.ndarray) -> int:
    bits = values.shape[0].bit_length() - 1
    for n in range(bits + 1):
        coarse = block_average(values, n)
        if np.array_equal(_expand(coarse, 1 << (bits - n)), values):
            return n
    return bits


def level(f: Martingale2, n: int) -> StepFn2:
    """f_n; for n past the stored resolution the finest level is refined."""
    if n < 0:
        raise ValueError(f"level index must be nonnegative, got {n}")
    if n >= f.bits:
        return f.finest.refine(n, n)
    return StepFn2(n, n, block_average(f.finest.values, n))


def maximal_function(f: Martingale2) -> StepFn2:
    """f* = max over n <= stabilization level of |f_n|, on the finest grid."""
    bits = f.bits
    out = np.zeros_like(f.finest.values)
    for n in range(f.stabilization_level + 1):
        coarse = np.abs(block_average(f.finest.values, n))
        np.maximum(out, _expand(coarse, 1 << (bits - n)), out=out)
    return StepFn2(bits, bits, out)


def hardy_quasinorm(f: Martingale2, p: float) -> float:
    if not p > 0:
        raise ValueError(f"p must be positive, got {p!r}")
    return lp_quasinorm(maximal_function(f), p)


@dataclass(frozen=True, eq=False)
class Atom:
    """Candidate p-atom on the dyadic cube I x I.

    The cube has side I = I_{cube_level}(corner) in each axis, so
    mu(I x I) = 2^(-2 cube_level).
    """

    fn: StepFn2
    cube_level: int
    cube_corner: tuple[DyadicPoint, DyadicPoint]
    p: float

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError(f"atoms need 0 < p <= 1, got {self.p!r}")
        if self.cube_level < 0:
            raise ValueError("cube level must be nonnegative")
        if self.cube_level > min(self.fn.bits_x, self.fn.bits_y):
            raise ResolutionError("cube is finer than the atom's resolution")
        cx, cy = self.cube_corner
        if cx.bits < self.cube_level or cy.bits < self.cube_level:
            raise ResolutionError("cube corner is not resolved to the cube level")

    @property
    def sup_bound(self) -> float:
        return 2.0 ** (2 * self.cube_level / self.p)

    def cube_mask(self) -> np.ndarray:
        bx, by = self.fn.bits_x, self.fn.bits_y
        n = self.cube_level
        cx, cy = self.cube_corner
        mask = np.zeros((1 << bx, 1 << by), dtype=bool)
        x0 = cx.cell(n) << (bx - n)
        y0 = cy.cell(n) << (by - n)
        mask[x0 : x0 + (1 << (bx - n)), y0 : y0 + (1 << (by - n))] = True
        return mask


@dataclass(frozen=True)
class ValidationReport:
    support_ok: bool
    zero_integral_ok: bool
    sup_bound_ok: bool
    integral: float
    sup_norm: float
    sup_bound: float
    outside_support_max: float

    @property
    def ok(self) -> bool:
        return self.support_ok and self.zero_integral_ok and self.sup_bound_ok


def validate_atom(a: Atom) -> ValidationReport:
    v = a.fn.values
    mask = a.cube_mask()
    outside = float(np.max(np.abs(v[~mask]), initial=0.0))
    sup_norm = float(np.max(np.abs(v), initial=0.0))
    integral = integrate(a.fn)
    cube_measure = 2.0 ** (-2 * a.cube_level)
    return ValidationReport(
        support_ok=outside == 0.0,
        zero_integral_ok=abs(integral) <= 1e-12 * sup_norm * cube_measure,
        sup_bound_ok=sup_norm <= a.sup_bound + 1e-9,
        integral=integral,
        sup_norm=sup_norm,
        sup_bound=a.sup_bound,
        outside_support_max=outside,
    )


@dataclass(frozen=True)
class AtomicDecomposition:
    entries: tuple[tuple[float, Atom], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((float(m), a) for m, a in self.entries))


def assemble(d: AtomicDecomposition) -> tuple[Martingale2, float]:
    """Synthesize sum_k mu_k a_k and return it with (sum |mu_k|^p)^(1/p).

    The bound dominates the H_p quasi-norm up to the (unstated) constant of
    the atomic characterization; no infimum over decompositions is taken.
    """
    if not d.entries:
        raise ValueError("empty decomposition")
    ps = {a.p for _, a in d.entries}
    if len(ps) != 1:
        raise ValueError(f"atoms mix p values {sorted(ps)}")
    p = ps.pop()
    bits = max(max(a.fn.bits_x, a.fn.bits_y) for _, a in d.entries)
    total = StepFn2.zeros(bits, bits)
    for mu, a in d.entries:
        total = total + mu * a.fn.refine(bits, bits)
    bound = math.fsum(abs(mu) ** p for mu, _ in d.entries) ** (1.0 / p)
    return Martingale2(total), bound
