"""Cone-restricted strong summability functionals of 2D Walsh-Fourier series.

All functionals are weighted sums of ||S_{k,l} f|| over index pairs.  A
martingale stored at resolution N has no coefficients past 2^N, so
S_{k,l} f = S_{min(k,2^N), min(l,2^N)} f; norms are computed once on the
saturated table and looked up for arbitrarily large (n, m).

Logarithms are base 2.  Sums start at k, l = 1 (S_{0,l} = S_{k,0} = 0);
the log^2-weighted diagonal variant starts at n = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Literal

import numpy as np

from walsh_lab.config import parallel_map
from walsh_lab.dyadic import weak_lp_batch
from walsh_lab.hardy import Martingale2
from walsh_lab.walsh import forward_transform, walsh_matrix

NormKind = Literal["strong", "weak"]


def _is_integer(alpha: float) -> bool:
    return float(alpha).is_integer()


def in_cone(k: int, l: int, alpha: float) -> bool:
    """2^-alpha <= k/l <= 2^alpha, exact for integer alpha."""
    if _is_integer(alpha):
        a = int(alpha)
        return (k << a) >= l and (l << a) >= k
    scale = 2.0**alpha
    return k * scale >= l and l * scale >= k


def cone_mask(k: np.ndarray, l: np.ndarray, alpha: float) -> np.ndarray:
    k = np.asarray(k, dtype=np.int64)
    l = np.asarray(l, dtype=np.int64)
    if _is_integer(alpha):
        a = int(alpha)
        return ((k << a) >= l) & ((l << a) >= k)
    scale = 2.0**alpha
    return (k * scale >= l) & (l * scale >= k)


def cone_indices(alpha: float, n: int, m: int) -> list[tuple[int, int]]:
    """Pairs (k, l) <= (n, m) in the cone, row-major, starting at 1."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    return [(k, l) for k in range(1, n + 1) for l in range(1, m + 1) if in_cone(k, l, alpha)]


def int_part(p: float) -> int:
    return math.floor(p)


# ---------------------------------------------------------------- weights


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Weight Phi(m, n) >= 1.

    ``min_profile``, when set, declares Phi(m, n) = profile(min(m, n)) and
    enables prefix-sum evaluation of block sums.
    """

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    min_profile: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, m, n):
        out = self.fn(np.asarray(m, dtype=np.float64), np.asarray(n, dtype=np.float64))
        return float(out) if np.ndim(out) == 0 else out

    @property
    def descriptor(self) -> str:
        if not self.params:
            return self.name
        args = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({args})"


def _from_min(profile: Callable[[np.ndarray], np.ndarray], name: str, **params) -> WeightFunction:
    return WeightFunction(
        name=name,
        fn=lambda m, n: profile(np.minimum(m, n)),
        params=params,
        min_profile=profile,
    )


def log4_weight() -> WeightFunction:
    """(1 + log2(1 + min(m, n)))^4."""
    return _from_min(lambda t: (1.0 + np.log2(1.0 + t)) ** 4, "log4")


def loglog_weight() -> WeightFunction:
    """(1 + log2(1 + log2(1 + min(m, n))))^4."""
    return _from_min(lambda t: (1.0 + np.log2(1.0 + np.log2(1.0 + t))) ** 4, "loglog")


def constant_weight(c: float = 1.0) -> WeightFunction:
    c = float(c)
    return _from_min(lambda t: np.full(np.shape(t), c), "constant", c=c)


WEIGHTS = {"log4": log4_weight, "loglog": loglog_weight}


def weight_by_name(name: str) -> WeightFunction:
    try:
        return WEIGHTS[name]()
    except KeyError:
        raise ValueError(f"unknown weight {name!r}; choose from {sorted(WEIGHTS)}") from None


@dataclass(frozen=True)
class WeightReport:
    at_least_one: bool
    monotone: bool
    diverges: bool
    min_value: float
    diagonal_max: float
    monotonicity_violations: int

    @property
    def ok(self) -> bool:
        return self.at_least_one and self.monotone and self.diverges


def validate_weight(phi: WeightFunction, grid_max: int) -> WeightReport:
    """Sample Phi on the log-spaced grid {1, 2, 4, ..., grid_max}.

    Monotonicity along grid lines implies it for every comparable pair of
    grid points.  Divergence is judged by strict growth of the diagonal
    over the upper half of the grid.
    """
    if grid_max < 2:
        raise ValueError("grid_max must be at least 2")
    grid = sorted({1 << i for i in range(grid_max.bit_length()) if (1 << i) <= grid_max} | {grid_max})
    g = np.array(grid, dtype=np.float64)
    values = np.asarray(phi(g[:, None], g[None, :]), dtype=np.float64)
    values = np.broadcast_to(values, (len(g), len(g)))
    bad = int(np.sum(np.diff(values, axis=0) < 0) + np.sum(np.diff(values, axis=1) < 0))
    diag = np.diagonal(values)
    upper = diag[len(diag) // 2 :]
    return WeightReport(
        at_least_one=bool(np.all(values >= 1.0)),
        monotone=bad == 0,
        diverges=bool(len(upper) > 1 and np.all(np.diff(upper) > 0)),
        min_value=float(values.min()),
        diagonal_max=float(diag.max()),
        monotonicity_violations=bad,
    )


# ---------------------------------------------------------------- variants

VARIANT_TAGS = ("W1", "W2", "TH", "TH1")


@dataclass(frozen=True)
class SummabilityVariant:
    tag: str
    p: float

    def __post_init__(self):
        if self.tag not in VARIANT_TAGS:
            raise ValueError(f"unknown variant {self.tag!r}")
        if self.tag in ("W1", "TH") and self.p != 1:
            raise ValueError(f"{self.tag} requires p = 1")
        if self.tag in ("W2", "TH1") and not 0 < self.p < 1:
            raise ValueError(f"{self.tag} requires 0 < p < 1")


# ---------------------------------------------------------------- partial sum norms


def _norms(flat: np.ndarray, p: float, kind: NormKind) -> np.ndarray:
    if kind == "weak":
        return weak_lp_batch(flat, p)
    if kind != "strong":
        raise ValueError(f"norm kind must be 'strong' or 'weak', got {kind!r}")
    a = np.abs(flat)
    if p == 1.0:
        return a.mean(axis=-1)
    return np.mean(a**p, axis=-1) ** (1.0 / p)


@lru_cache(maxsize=32)
def _norm_table(f: Martingale2, p: float, kind: NormKind, size: int) -> np.ndarray:
    """table[k, l] = ||S_{k,l} f|| for 0 <= k, l <= size <= 2^N."""
    bits = f.bits
    coeffs = forward_transform(f.finest).coeffs
    w = walsh_matrix(size, bits)
    table = np.zeros((size + 1, size + 1))

    def row(k: int) -> np.ndarray:
        # partial[x, j] = sum_{i<k} c_ij w_i(x), then cumulative synthesis in y
        partial = w[:k].T @ coeffs[:k, :size]
        sums = np.cumsum(partial.T[:, :, None] * w[:, None, :], axis=0)
        return _norms(sums.reshape(size, -1), p, kind)

    for k, values in zip(range(1, size + 1), parallel_map(row, range(1, size + 1))):
        table[k, 1:] = values
    return table


def partial_sum_norms(f: Martingale2, n: int, m: int, p: float, kind: NormKind = "strong") -> np.ndarray:
    """Array whose [k, l] entry is ||S_{k,l} f|| (L_p or weak-L_p) for k <= n, l <= m."""
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    top = 1 << f.bits
    size = min(max(n, m), top)
    table = _norm_table(f, float(p), kind, size)
    k = np.minimum(np.arange(n + 1), size)
    l = np.minimum(np.arange(m + 1), size)
    return table[np.ix_(k, l)]


def partial_sum_norm_at(f: Martingale2, pairs: Iterable[tuple[int, int]], p: float, kind: NormKind) -> np.ndarray:
    """Norms of S_{k,l} f for an explicit list of pairs, one synthesis each."""
    top = 1 << f.bits
    coeffs = forward_transform(f.finest).coeffs
    w = walsh_matrix(top, f.bits)
    pairs = list(pairs)

    def one(pair: tuple[int, int]) -> float:
        k, l = min(pair[0], top), min(pair[1], top)
        s = w[:k].T @ coeffs[:k, :l] @ w[:l]
        return float(_norms(s.ravel(), p, kind))

    return np.array(parallel_map(one, pairs), dtype=np.float64)


# ---------------------------------------------------------------- functionals


def _check_p_range(p: float, upper_open: bool = False) -> None:
    if not (0 < p < 1 if upper_open else 0 < p <= 1):
        raise ValueError(f"p out of range: {p!r}")


def _cone_grid(alpha: float, n: int, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = np.arange(1, n + 1)[:, None]
    l = np.arange(1, m + 1)[None, :]
    return k, l, cone_mask(k, l, alpha)


def weisz_inner_sum(f: Martingale2, p: float, alpha: float, n: int, m: int, norm_kind: NormKind = "strong") -> float:
    """Sum over the cone of ||S_{k,l} f||^p / (kl)^(2-p), without prefactor."""
    _check_p_range(p)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    norms = partial_sum_norms(f, n, m, p, norm_kind)[1:, 1:]
    k, l, mask = _cone_grid(alpha, n, m)
    terms = np.where(mask, norms**p / (k * l).astype(np.float64) ** (2.0 - p), 0.0)
    return float(np.sum(terms))


def weisz_functional(f: Martingale2, p: float, alpha: float, n: int, m: int, norm_kind: NormKind = "strong") -> float:
    """(1/(log n log m))^[p] * sum over the cone of ||S_{k,l} f||^p / (kl)^(2-p)."""
    _check_p_range(p)
    if n < 2 or m < 2:
        raise ValueError("n and m must be at least 2")
    prefactor = (1.0 / (math.log2(n) * math.log2(m))) ** int_part(p)
    return prefactor * weisz_inner_sum(f, p, alpha, n, m, norm_kind)


def diagonal_variant_sum(f: Martingale2, variant: SummabilityVariant, N: int, norm_kind: NormKind = "strong") -> float:
    """Diagonal partial sums ||S_{k,k} f|| with the variant's weight.

    W1:  (1/log^2 N) sum_{k=1}^N ||S_kk f||_1 / k^2
    W2:  sum_{k=1}^N ||S_kk f||_p^p / k^(4-2p)
    TH:  sum_{n=2}^N ||S_nn f||_1 / (n log^2 n)
    TH1: sum_{n=1}^N ||S_nn f||_p^p / n^(3-2p)
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    p = variant.p
    diag = np.diagonal(partial_sum_norms(f, N, N, p, norm_kind))[1:] ** p
    k = np.arange(1, N + 1, dtype=np.float64)
    if variant.tag == "W1":
        return float(np.sum(diag / k**2)) / math.log2(N) ** 2
    if variant.tag == "W2":
        return float(np.sum(diag / k ** (4 - 2 * p)))
    if variant.tag == "TH":
        return float(np.sum(diag[1:] / (k[1:] * np.log2(k[1:]) ** 2)))
    return float(np.sum(diag / k ** (3 - 2 * p)))


def phi_cone_sum(
    f: Martingale2,
    p: float,
    alpha: float,
    phi: WeightFunction,
    n: int,
    m: int,
    norm_kind: NormKind = "strong",
    pairs: Iterable[tuple[int, int]] | None = None,
) -> float:
    """Sum over the cone of ||S_{k,l} f||^p Phi(k, l) / (kl)^(2-p).

    ``pairs`` restricts the sum to a subset of the cone (still clipped to
    the cone and to (k, l) <= (n, m)); each listed pair is synthesized on
    its own rather than through the full norm table.
    """
    _check_p_range(p, upper_open=True)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if pairs is None:
        norms = partial_sum_norms(f, n, m, p, norm_kind)[1:, 1:]
        k, l, mask = _cone_grid(alpha, n, m)
        weight = np.asarray(phi(k, l), dtype=np.float64)
        terms = np.where(mask, norms**p * weight / (k * l).astype(np.float64) ** (2.0 - p), 0.0)
        return float(np.sum(terms))
    kept = [(k, l) for k, l in pairs if 1 <= k <= n and 1 <= l <= m and in_cone(k, l, alpha)]
    if not kept:
        return 0.0
    ks = np.array([k for k, _ in kept], dtype=np.float64)
    ls = np.array([l for _, l in kept], dtype=np.float64)
    norms = partial_sum_norm_at(f, kept, p, norm_kind)
    return float(np.sum(norms**p * np.asarray(phi(ks, ls)) / (ks * ls) ** (2.0 - p)))
