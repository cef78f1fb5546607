"""Sharpness construction for cone-restricted strong summability.

For 0 < p < 1, alpha > 0 and a weight Phi growing to infinity, the
martingale

    f = sum_k lambda_k a_k,
    lambda_k = 2^(2[alpha]+2) Phi^(-1/4)(2^a_k, 2^a_k),
    a_k = 2^(a_k(2/p-2) - 2[alpha] - 2) u_k(x) u_k(y),
    u_k = D_{2^(a_k+[alpha]+1)} - D_{2^a_k},

lies in H_p, yet the Phi-weighted cone sums of its partial sums are
unbounded.  Every term is rank one, so the construction is carried as a
separable sum and only materialized on grids that fit the 2D cap.

Block k is the frequency square [2^a_k, 2^(a_k+[alpha]+1))^2, on which
every coefficient equals v_k = 2^(a_k(2/p-2)) / Phi^(1/4)(2^a_k, 2^a_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from walsh_lab.config import CAPS
from walsh_lab.dyadic import (
    DyadicPoint,
    ResolutionError,
    SeparableSum2,
    StepFn1,
    StepFn2,
    materialize,
    weak_lp_batch,
)
from walsh_lab.hardy import Atom, Martingale2
from walsh_lab.summability import WeightFunction, cone_mask, in_cone, int_part
from walsh_lab.walsh import dirichlet_closed

SEARCH_CAP = 60


@dataclass(frozen=True)
class AlphaSequence:
    entries: tuple[int, ...]
    alpha: float
    p: float
    tail_bound: float

    def __post_init__(self):
        entries = tuple(int(a) for a in self.entries)
        if not entries or entries[0] < 2:
            raise ValueError("the sequence must start at 2 or later")
        gap = int_part(self.alpha) + 1
        for a, b in zip(entries, entries[1:]):
            if not a + gap < b:
                raise ValueError(f"entries {a}, {b} violate the gap a_k + [alpha] + 1 < a_(k+1)")
        object.__setattr__(self, "entries", entries)


def select_alpha_sequence(phi: WeightFunction, p: float, alpha: float, K: int) -> AlphaSequence:
    """Greedy a_0 < ... < a_K with Phi^(-p/4)(2^a_k, 2^a_k) <= 2^-k.

    a_0 is the least a >= 2 meeting the k = 0 threshold; each later entry
    is the least a >= a_(k-1) + [alpha] + 2 meeting its threshold.  The
    thresholds sum to less than 2, which bounds the tail series.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if K < 0:
        raise ValueError("K must be nonnegative")
    entries: list[int] = []
    start = 2
    for k in range(K + 1):
        threshold = 2.0**-k
        a = start
        while phi(2.0**a, 2.0**a) ** (-p / 4) > threshold:
            a += 1
            if a > SEARCH_CAP:
                raise ValueError(
                    f"Phi never drops below the threshold 2^-{k} up to 2^{SEARCH_CAP}; "
                    "it grows too slowly for this search cap"
                )
        entries.append(a)
        start = a + int_part(alpha) + 2
    return AlphaSequence(tuple(entries), float(alpha), float(p), sum(2.0**-k for k in range(K + 1)))


def _top(alpha_k: int, alpha: float) -> int:
    return alpha_k + int_part(alpha) + 1


def atom_factor(alpha: float, alpha_k: int) -> StepFn1:
    """u_k = D_{2^(a_k+[alpha]+1)} - D_{2^a_k} at its natural resolution."""
    bits = _top(alpha_k, alpha)
    return dirichlet_closed(1 << bits, bits) - dirichlet_closed(1 << alpha_k, bits)


def atom_scale(p: float, alpha: float, alpha_k: int) -> float:
    return 2.0 ** (alpha_k * (2.0 / p - 2.0) - 2 * int_part(alpha) - 2)


def build_atom(p: float, alpha: float, alpha_k: int) -> Atom:
    """Materialized a_k on its cube I_(a_k) x I_(a_k).

    Raises ResolutionError when the grid exceeds the 2D cap; the separable
    form is available through :func:`atom_factor` and :func:`atom_scale`.
    """
    if alpha_k < 2:
        raise ValueError("alpha_k must be at least 2")
    bits = _top(alpha_k, alpha)
    if bits > CAPS.bits_2d:
        raise ResolutionError(f"atom needs {bits} bits per axis, cap is {CAPS.bits_2d}")
    u = atom_factor(alpha, alpha_k).values
    fn = StepFn2(bits, bits, atom_scale(p, alpha, alpha_k) * np.outer(u, u))
    corner = DyadicPoint.zero(alpha_k)
    return Atom(fn, alpha_k, (corner, corner), p)


@dataclass(frozen=True, eq=False)
class Counterexample:
    seq: AlphaSequence
    phi: WeightFunction
    lambdas: tuple[float, ...]
    atoms: tuple[Atom | None, ...]
    factors: tuple[StepFn1, ...]
    scales: tuple[float, ...]

    @property
    def p(self) -> float:
        return self.seq.p

    @property
    def alpha(self) -> float:
        return self.seq.alpha

    @property
    def K(self) -> int:
        return len(self.seq.entries) - 1

    def block(self, k: int) -> tuple[int, int]:
        """Half-open frequency range [2^a_k, 2^(a_k+[alpha]+1)) of block k."""
        a = self.seq.entries[k]
        return 1 << a, 1 << _top(a, self.alpha)

    def height(self, k: int) -> float:
        """v_k, the common coefficient value on block k."""
        a = self.seq.entries[k]
        return 2.0 ** (a * (2.0 / self.p - 2.0)) / self.phi(2.0**a, 2.0**a) ** 0.25

    def resolution(self, upto: int | None = None) -> int:
        upto = self.K if upto is None else upto
        return _top(self.seq.entries[upto], self.alpha)

    def separable(self, upto: int | None = None) -> SeparableSum2:
        """sum_{k <= upto} lambda_k a_k as rank-one terms."""
        upto = self.K if upto is None else upto
        return SeparableSum2(
            tuple(
                (self.lambdas[k] * self.scales[k], self.factors[k], self.factors[k])
                for k in range(upto + 1)
            )
        )

    def martingale(self, upto: int | None = None) -> Martingale2:
        """Materialized sum of the first blocks; equals S_{2^r,2^r} f at r = resolution(upto)."""
        bits = self.resolution(upto)
        return Martingale2(materialize(self.separable(upto), bits, bits))

    @property
    def hp_upper_bound(self) -> float:
        p = self.p
        return math.fsum(lam**p for lam in self.lambdas) ** (1.0 / p)


def build_counterexample(
    p: float,
    alpha: float,
    phi: WeightFunction,
    K: int,
    seq: AlphaSequence | None = None,
) -> Counterexample:
    """Assemble lambda_k, a_k and the separable terms for k = 0..K.

    ``seq`` overrides the greedy sequence (used to re-run the construction
    with weights that never meet the thresholds).
    """
    if seq is None:
        seq = select_alpha_sequence(phi, p, alpha, K)
    elif len(seq.entries) != K + 1:
        raise ValueError(f"sequence has {len(seq.entries)} entries, expected {K + 1}")
    lambdas, atoms, factors, scales = [], [], [], []
    for a in seq.entries:
        lambdas.append(2.0 ** (2 * int_part(alpha) + 2) * phi(2.0**a, 2.0**a) ** -0.25)
        factors.append(atom_factor(alpha, a))
        scales.append(atom_scale(p, alpha, a))
        atoms.append(build_atom(p, alpha, a) if _top(a, alpha) <= CAPS.bits_2d else None)
    return Counterexample(
        AlphaSequence(seq.entries, float(alpha), float(p), seq.tail_bound),
        phi,
        tuple(lambdas),
        tuple(atoms),
        tuple(factors),
        tuple(scales),
    )


def predicted_coefficient(ce: Counterexample, i: int, j: int) -> float:
    for k in range(ce.K + 1):
        lo, hi = ce.block(k)
        if lo <= i < hi and lo <= j < hi:
            return ce.height(k)
    return 0.0


def predicted_spectrum(ce: Counterexample, bits: int) -> np.ndarray:
    """Coefficient pattern on [0, 2^bits)^2."""
    size = 1 << bits
    out = np.zeros((size, size))
    for k in range(ce.K + 1):
        lo, hi = ce.block(k)
        if lo < size:
            out[lo : min(hi, size), lo : min(hi, size)] = ce.height(k)
    return out


def block_of(ce: Counterexample, m: int, n: int) -> int:
    """Index k with 2^a_k < m, n < 2^(a_k+[alpha]+1)."""
    for k in range(ce.K + 1):
        lo, hi = ce.block(k)
        if lo < m < hi and lo < n < hi:
            return k
    raise ValueError(f"({m}, {n}) is not strictly inside a single block")


def block_partial_sum(ce: Counterexample, m: int, n: int) -> SeparableSum2:
    """S_{m,n} f for (m, n) inside block k, as k + 1 rank-one terms.

    The full blocks eta < k contribute v_eta u_eta(x) u_eta(y); block k
    contributes v_k (D_m - D_{2^a_k})(x) (D_n - D_{2^a_k})(y).
    """
    k = block_of(ce, m, n)
    bits = ce.resolution(k)
    lo, _ = ce.block(k)
    terms = [(ce.height(eta), ce.factors[eta], ce.factors[eta]) for eta in range(k)]
    base = dirichlet_closed(lo, bits)
    terms.append((ce.height(k), dirichlet_closed(m, bits) - base, dirichlet_closed(n, bits) - base))
    return SeparableSum2(tuple(terms))


def closed_form_value(ce: Counterexample, k: int, m: int, n: int) -> float:
    """|S_{m,n} f| on (G minus I_1)^2 for odd m, n inside block k."""
    if m % 2 == 0 or n % 2 == 0:
        raise ValueError("m and n must be odd")
    lo, hi = ce.block(k)
    if not (lo < m < hi and lo < n < hi):
        raise ValueError(f"({m}, {n}) is not inside block {k}")
    return ce.height(k)


def weak_lp_lower_bound(ce: Counterexample, k: int, p: float | None = None) -> float:
    """(1/2) (1/4)^(1/p) v_k: level v_k/2 is exceeded on a set of measure 1/4."""
    if not 0 <= k <= ce.K:
        raise ValueError(f"block {k} not in 0..{ce.K}")
    p = ce.p if p is None else p
    return 0.5 * 0.25 ** (1.0 / p) * ce.height(k)


# ---------------------------------------------------------------- divergence accounting


@dataclass(frozen=True)
class DivergenceRow:
    k: int
    alpha_k: int
    lambda_k: float
    v_k: float
    lower_bound: float
    T_k: float
    G_k: float
    ratio: float
    regime: str
    measured: float | None
    pairs: int
    subset_sum: float
    subset_pairs: int
    chain_count: float


def odd_block_indices(ce: Counterexample, k: int) -> np.ndarray:
    lo, hi = ce.block(k)
    return np.arange(lo + 1, hi, 2, dtype=np.int64)


def _block_weight_sum(odd: np.ndarray, alpha: float, phi: WeightFunction, s: float) -> float:
    """sum over cone pairs of odd x odd of Phi(m, n) / (mn)^s.

    With a min-profile weight, the off-diagonal part is
    2 sum_i profile(o_i) o_i^-s sum_{j > i, o_j <= 2^alpha o_i} o_j^-s,
    evaluated with prefix sums; otherwise by dense chunks.
    """
    if phi.min_profile is not None:
        o = odd.astype(np.float64)
        a = o**-s
        g = np.asarray(phi.min_profile(o), dtype=np.float64) * np.ones_like(o)
        prefix = np.concatenate(([0.0], np.cumsum(a)))
        if float(alpha).is_integer():
            upper = np.searchsorted(odd, odd << int(alpha), side="right")
        else:
            upper = np.searchsorted(o, o * 2.0**alpha, side="right")
        idx = np.arange(len(o))
        off = prefix[upper] - prefix[idx + 1]
        return float(np.sum(g * a * a) + 2.0 * np.sum(g * a * off))
    return _block_weight_sum_dense(odd, alpha, phi, s)


def _block_weight_sum_dense(odd: np.ndarray, alpha: float, phi: WeightFunction, s: float) -> float:
    total = 0.0
    chunk = max(1, (1 << 22) // max(1, len(odd)))
    n = odd[None, :]
    for start in range(0, len(odd), chunk):
        m = odd[start : start + chunk, None]
        mask = cone_mask(m, n, alpha)
        weight = np.asarray(phi(m, n), dtype=np.float64)
        terms = np.where(mask, weight / (m.astype(np.float64) * n) ** s, 0.0)
        total += float(np.sum(terms))
    return total


def _cone_pair_count(odd: np.ndarray, alpha: float) -> int:
    if float(alpha).is_integer():
        upper = np.searchsorted(odd, odd << int(alpha), side="right")
    else:
        upper = np.searchsorted(odd, odd * 2.0**alpha, side="right")
    idx = np.arange(len(odd))
    return int(len(odd) + 2 * np.sum(upper - idx - 1))


def measured_block_sum(ce: Counterexample, k: int, p: float, phi: WeightFunction) -> float:
    """Exact sum of ||S_{m,n} f||_weak^p Phi / (mn)^(2-p) over odd cone pairs of block k.

    Each S_{m,n} f is materialized from its separable form; requires the
    block resolution to fit the 2D cap.
    """
    bits = ce.resolution(k)
    if bits > CAPS.bits_2d:
        raise ResolutionError(f"block {k} needs {bits} bits per axis")
    lo, _ = ce.block(k)
    odd = odd_block_indices(ce, k)
    base = dirichlet_closed(lo, bits).values
    head = materialize(ce.separable(k - 1), bits, bits).values if k > 0 else np.zeros((1 << bits,) * 2)
    diffs = {int(m): dirichlet_closed(int(m), bits).values - base for m in odd}
    v = ce.height(k)
    total = 0.0
    for m in odd:
        ns = [int(n) for n in odd if in_cone(int(m), int(n), ce.alpha)]
        grids = np.stack([head + v * np.outer(diffs[int(m)], diffs[n]) for n in ns])
        norms = weak_lp_batch(grids.reshape(len(ns), -1), p)
        weight = np.asarray(phi(np.full(len(ns), float(m)), np.array(ns, dtype=np.float64)))
        total += float(np.sum(norms**p * weight / (float(m) * np.array(ns, dtype=np.float64)) ** (2.0 - p)))
    return total


def divergence_table(
    ce: Counterexample,
    p: float | None = None,
    alpha: float | None = None,
    phi: WeightFunction | None = None,
    k_max: int | None = None,
    measure: bool = True,
) -> list[DivergenceRow]:
    """Per-block witnesses of divergence.

    T_k is the weighted sum over odd cone pairs of block k of
    lower_bound^p Phi(m, n) / (mn)^(2-p), a lower bound for the same sum
    with the true weak-L_p norms.  G_k = c_p Phi^(3/4)(2^a_k, 2^a_k) with
    c_p = (1/2)^p (1/4) (2^(alpha-1) - 1/2 - 2^-a_k)^2.  Blocks whose grid
    fits the 2D cap also get the measured exact sum.
    """
    p = ce.p if p is None else p
    alpha = ce.alpha if alpha is None else alpha
    phi = ce.phi if phi is None else phi
    k_max = ce.K if k_max is None else k_max
    if not 0 <= k_max <= ce.K:
        raise ValueError(f"k_max must lie in 0..{ce.K}")
    s = 2.0 - p
    rows = []
    for k in range(k_max + 1):
        a = ce.seq.entries[k]
        odd = odd_block_indices(ce, k)
        lower = weak_lp_lower_bound(ce, k, p)
        T = lower**p * _block_weight_sum(odd, alpha, phi, s)
        c_p = 0.5**p * 0.25 * (2.0 ** (alpha - 1) - 0.5 - 2.0**-a) ** 2
        G = c_p * phi(2.0**a, 2.0**a) ** 0.75
        # the chain's re-indexed subset: m = 2m'+1 with 2^(a-1) < m' <= 2^(a-1+alpha)
        sub_hi = math.floor(2.0 ** (a - 1 + alpha))
        sub = np.array(
            [2 * q + 1 for q in range((1 << (a - 1)) + 1, sub_hi + 1) if 2 * q + 1 < ce.block(k)[1]],
            dtype=np.int64,
        )
        subset_sum = lower**p * _block_weight_sum(sub, alpha, phi, s) if len(sub) else 0.0
        regime = "exact" if ce.resolution(k) <= CAPS.bits_2d else "closed-form"
        measured = measured_block_sum(ce, k, p, phi) if measure and regime == "exact" else None
        rows.append(
            DivergenceRow(
                k=k,
                alpha_k=a,
                lambda_k=ce.lambdas[k],
                v_k=ce.height(k),
                lower_bound=lower,
                T_k=T,
                G_k=G,
                ratio=T / G if G > 0 else math.inf,
                regime=regime,
                measured=measured,
                pairs=_cone_pair_count(odd, alpha),
                subset_sum=subset_sum,
                subset_pairs=len(sub) ** 2,
                chain_count=(2.0 ** (a - 1 + alpha) - 2.0 ** (a - 1) - 1) ** 2,
            )
        )
    return rows


def sample_complement_points(bits: int, count: int, rng: np.random.Generator) -> list[tuple[DyadicPoint, DyadicPoint]]:
    """Random points of (G minus I_1)^2, i.e. with x_0 = y_0 = 1."""
    out = []
    for _ in range(count):
        xs = [1] + rng.integers(0, 2, size=bits - 1).tolist()
        ys = [1] + rng.integers(0, 2, size=bits - 1).tolist()
        out.append((DyadicPoint(tuple(xs)), DyadicPoint(tuple(ys))))
    return out


def odd_pairs(ce: Counterexample, k: int) -> Sequence[tuple[int, int]]:
    odd = odd_block_indices(ce, k)
    return [(int(m), int(n)) for m in odd for n in odd]
