"""Verification suites behind ``walsh-lab verify``.

Each check returns a :class:`Check`.  ``ACCEPTANCE`` lists the exit
criteria of the package in order; the remaining suites are the per-module
property checks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from walsh_lab.counterexample import (
    block_partial_sum,
    build_atom,
    build_counterexample,
    divergence_table,
    odd_block_indices,
    predicted_spectrum,
    sample_complement_points,
    weak_lp_lower_bound,
)
from walsh_lab.dyadic import (
    DyadicPoint,
    StepFn1,
    StepFn2,
    evaluate_at,
    materialize,
    weak_lp_quasinorm,
)
from walsh_lab.hardy import Martingale2, block_average, hardy_quasinorm, level, validate_atom
from walsh_lab.summability import (
    SummabilityVariant,
    constant_weight,
    cone_indices,
    diagonal_variant_sum,
    log4_weight,
    weisz_functional,
    weisz_inner_sum,
)
from walsh_lab.walsh import (
    coefficient_oracle,
    dirichlet_closed,
    dirichlet_kernel,
    forward_transform,
    inverse_transform,
    rectangular_partial_sum,
    walsh_matrix,
    Spectrum2,
)

SEED = 20240601


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def timed(fn: Callable[[], Check]) -> Check:
    start = time.perf_counter()
    res = fn()
    return Check(res.name, res.passed, f"{res.detail} [{time.perf_counter() - start:.2f} s]")


# ---------------------------------------------------------------- kernels


def kernel_identities(bits: int = 10) -> Check:
    """D_n from the closed forms equals the literal Walsh sum for n = 1..2^bits."""
    w = walsh_matrix(1 << bits, bits)
    literal = np.cumsum(w, axis=0)
    exact = sum(
        np.array_equal(dirichlet_closed(n, bits).values, literal[n - 1]) for n in range(1, (1 << bits) + 1)
    )
    total = 1 << bits
    return Check("kernels", exact == total, f"dirichlet identities: {exact}/{total} exact")


def dyadic_kernel_indicator(bits: int = 12) -> Check:
    cells = np.arange(1 << bits)
    bad = []
    for m in range(bits + 1):
        expected = np.where((cells >> (bits - m)) == 0, float(1 << m), 0.0)
        if not np.array_equal(dirichlet_closed(1 << m, bits).values, expected):
            bad.append(m)
    return Check("D_{2^m} indicator form", not bad, f"m = 0..{bits}, mismatches {bad}")


# ---------------------------------------------------------------- transform


def _direct_1d(values: np.ndarray, bits: int) -> np.ndarray:
    return walsh_matrix(1 << bits, bits) @ values * 2.0**-bits


def transform_oracle(max_bits_1d: int = 8, max_bits_2d: int = 5) -> Check:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for bits in range(max_bits_1d + 1):
        f = StepFn1(bits, rng.standard_normal(1 << bits))
        worst = max(worst, float(np.abs(forward_transform(f).coeffs - _direct_1d(f.values, bits)).max()))
    for bits in range(max_bits_2d + 1):
        f = StepFn2(bits, bits, rng.standard_normal((1 << bits, 1 << bits)))
        fast = forward_transform(f).coeffs
        size = 1 << bits
        oracle = np.array([[coefficient_oracle(f, i, j) for j in range(size)] for i in range(size)])
        worst = max(worst, float(np.abs(fast - oracle).max()))
    return Check("transform vs direct oracle", worst <= 1e-10, f"max abs diff {worst:.3e} (tol 1e-10)")


def transform_round_trip(bits: int = 10, trials: int = 100) -> Check:
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(trials):
        f = StepFn1(bits, rng.standard_normal(1 << bits))
        worst = max(worst, float(np.abs(inverse_transform(forward_transform(f)).values - f.values).max()))
    return Check("round trip", worst <= 1e-10, f"{trials} trips at {bits} bits, max abs err {worst:.3e}")


def transform_speed(bits: int = 20, budget_ms: float = 100.0, repeats: int = 5) -> Check:
    f = StepFn1(bits, np.random.default_rng(SEED + 2).standard_normal(1 << bits))
    forward_transform(f)
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        forward_transform(f)
        best = min(best, (time.perf_counter() - start) * 1e3)
    return Check(
        f"2^{bits}-point transform time", best < budget_ms, f"best of {repeats}: {best:.1f} ms (< {budget_ms:.0f} ms)"
    )


def parseval(bits: int = 10) -> Check:
    rng = np.random.default_rng(SEED + 3)
    f = StepFn1(bits, rng.standard_normal(1 << bits))
    lhs = float(np.mean(f.values**2))
    rhs = float(np.sum(forward_transform(f).coeffs ** 2))
    rel = abs(lhs - rhs) / lhs
    return Check("Parseval", rel <= 1e-10, f"relative gap {rel:.2e}")


# ---------------------------------------------------------------- hardy


def martingale_properties(bits: int = 6) -> Check:
    rng = np.random.default_rng(SEED + 4)
    f = Martingale2(StepFn2(bits, bits, rng.standard_normal((1 << bits, 1 << bits))))
    spec = forward_transform(f.finest)
    worst_level = 0.0
    worst_mart = 0.0
    for n in range(bits + 1):
        fn = level(f, n).refine(bits, bits).values
        ps = rectangular_partial_sum(spec, 1 << n, 1 << n).values
        worst_level = max(worst_level, float(np.abs(fn - ps).max()))
        if n < bits:
            up = level(f, n + 1).values
            worst_mart = max(worst_mart, float(np.abs(block_average(up, n) - level(f, n).values).max()))
    ok = worst_level <= 1e-10 and worst_mart <= 1e-12
    return Check("martingale levels", ok, f"level vs S_2^n {worst_level:.1e}, tower {worst_mart:.1e}")


# ---------------------------------------------------------------- summability


def summability_properties() -> Check:
    sym = all(
        sorted((l, k) for k, l in cone_indices(a, n, m)) == sorted(cone_indices(a, m, n))
        for a in (0, 1, 1.5)
        for n, m in ((5, 9), (8, 8), (3, 17))
    )
    f = Martingale2(StepFn2(3, 3, np.random.default_rng(SEED + 5).standard_normal((8, 8))))
    inner = weisz_inner_sum(f, 1.0, 0, 16, 16)
    w1 = diagonal_variant_sum(f, SummabilityVariant("W1", 1.0), 16) * np.log2(16) ** 2
    gap = abs(inner - w1)
    return Check("cone symmetry and W1 consistency", sym and gap <= 1e-12 * max(1.0, inner), f"gap {gap:.1e}")


# ---------------------------------------------------------------- acceptance


def criterion_1() -> Check:
    res = dyadic_kernel_indicator(12)
    return Check("C1 Dirichlet closed forms D_{2^m}", res.passed, res.detail)


def criterion_2() -> Check:
    bits = 10
    literal = np.cumsum(walsh_matrix(1 << bits, bits), axis=0)
    worst = 0.0
    for n in range(0, (1 << bits) + 1):
        ref = literal[n - 1] if n else np.zeros(1 << bits)
        worst = max(worst, float(np.abs(dirichlet_closed(n, bits).values - ref).max()))
    spot = max(
        float(np.abs(dirichlet_kernel(n, bits).values - literal[n - 1]).max()) for n in (1, 3, 77, 513, 1024)
    )
    ok = worst <= 1e-9 and spot == 0.0
    return Check("C2 Paley identity for D_n", ok, f"n = 0..1024 at 10 bits, max abs diff {worst:.1e}")


def criterion_3() -> Check:
    parts = [transform_oracle(8, 5), transform_round_trip(10, 100), transform_speed(20, 100.0)]
    return Check("C3 transform correctness", all(c.passed for c in parts), "; ".join(c.detail for c in parts))


def criterion_4() -> Check:
    failures = []
    for p in (0.25, 0.5, 0.75):
        for ak in (2, 3, 4, 5):
            atom = build_atom(p, 1, ak)
            rep = validate_atom(atom)
            exact_bound = rep.sup_norm <= 2.0 ** (2 * ak / p)
            if not (rep.ok and exact_bound):
                failures.append((p, ak))
    return Check("C4 atom validity", not failures, f"12 atoms checked, failures {failures}")


def criterion_5() -> Check:
    ce = build_counterexample(0.5, 1, log4_weight(), 1)
    f = ce.martingale()
    full = float(np.abs(forward_transform(f.finest).coeffs - predicted_spectrum(ce, f.bits)).max())
    coarse = float(np.abs(forward_transform(level(f, 4)).coeffs - predicted_spectrum(ce, 4)).max())
    worst = max(full, coarse)
    return Check(
        "C5 coefficient pattern",
        worst <= 1e-9,
        f"bits=4 truncation {coarse:.1e}, full grid ({f.bits} bits) {full:.1e} (tol 1e-9)",
    )


def criterion_6(samples: int = 200) -> Check:
    ce = build_counterexample(0.5, 1, log4_weight(), 2)
    v0 = ce.height(0)
    bits = ce.resolution(0)
    spec = forward_transform(ce.martingale(0).finest)
    rng = np.random.default_rng(SEED + 6)
    points = sample_complement_points(ce.resolution(), samples, rng)
    odd = odd_block_indices(ce, 0)
    worst = 0.0
    for m in odd:
        for n in odd:
            grid = rectangular_partial_sum(spec, int(m), int(n))
            sep = block_partial_sum(ce, int(m), int(n))
            half = 1 << (bits - 1)
            worst = max(worst, float(np.abs(np.abs(grid.values[half:, half:]) - v0).max()))
            for x, y in points:
                worst = max(worst, abs(abs(grid(x, y)) - v0), abs(abs(evaluate_at(sep, x, y)) - v0))
    return Check(
        "C6 closed form on (G\\I_1)^2",
        worst <= 1e-9,
        f"{len(odd) ** 2} odd pairs x {samples} points, grid and separable, max dev {worst:.1e}",
    )


def criterion_7() -> Check:
    violations = 0
    checked = 0
    for p in (0.5, 0.75):
        ce = build_counterexample(p, 1, log4_weight(), 1)
        spec = forward_transform(ce.martingale(0).finest)
        bound = weak_lp_lower_bound(ce, 0, p)
        for m in odd_block_indices(ce, 0):
            for n in odd_block_indices(ce, 0):
                checked += 1
                if weak_lp_quasinorm(rectangular_partial_sum(spec, int(m), int(n)), p) < bound:
                    violations += 1
    return Check("C7 weak-L_p lower bound", violations == 0, f"{checked} pairs, {violations} violations")


def criterion_8() -> Check:
    start = time.perf_counter()
    phi = log4_weight()
    ce = build_counterexample(0.5, 1, phi, 2)
    rows = divergence_table(ce, 0.5, 1, phi, 2)
    elapsed = time.perf_counter() - start
    T = [r.T_k for r in rows]
    scaled = [r.T_k / phi(2.0**r.alpha_k, 2.0**r.alpha_k) ** 0.75 for r in rows]
    increasing = all(a < b for a, b in zip(T, T[1:]))
    floor_ok = all(s >= 0.5 * scaled[0] for s in scaled)
    ok = increasing and T[-1] > 10 * T[0] and floor_ok and elapsed < 60
    detail = (
        f"T = {', '.join(f'{t:.4g}' for t in T)}; T_2/T_0 = {T[-1] / T[0]:.1f}; "
        f"T_k/Phi^(3/4) = {', '.join(f'{s:.4f}' for s in scaled)} (floor {0.5 * scaled[0]:.4f}); {elapsed:.1f} s"
    )
    return Check("C8 divergence", ok, detail)


def weisz_test_set(bits: int = 5) -> list[Martingale2]:
    """Five random p-atoms (p = 1/2) and three band-limited functions."""
    rng = np.random.default_rng(SEED + 9)
    out = []
    for _ in range(5):
        n = int(rng.integers(0, 3))
        cx = DyadicPoint(tuple(rng.integers(0, 2, n)))
        cy = DyadicPoint(tuple(rng.integers(0, 2, n)))
        side = 1 << (bits - n)
        blk = rng.standard_normal((side, side))
        blk -= blk.mean()
        blk *= 2.0 ** (2 * n / 0.5) * rng.uniform(0.5, 1.0) / np.abs(blk).max()
        v = np.zeros((1 << bits, 1 << bits))
        x0, y0 = cx.cell(n) << (bits - n), cy.cell(n) << (bits - n)
        v[x0 : x0 + side, y0 : y0 + side] = blk
        out.append(Martingale2(StepFn2(bits, bits, v)))
    for _ in range(3):
        c = np.zeros((1 << bits, 1 << bits))
        c[:8, :8] = rng.standard_normal((8, 8))
        out.append(Martingale2(inverse_transform(Spectrum2(bits, bits, c))))
    return out


def criterion_9() -> Check:
    worst = 0.0
    for f in weisz_test_set():
        for p in (0.5, 1.0):
            h = hardy_quasinorm(f, p) ** p
            for alpha in (0, 1):
                lo = weisz_functional(f, p, alpha, 128, 128) / h
                hi = weisz_functional(f, p, alpha, 256, 256) / h
                worst = max(worst, hi / lo)
    return Check(
        "C9 cone functional boundedness",
        worst <= 1.05,
        f"max growth (256,256)/(128,128) = {worst:.4f} (limit 1.05)",
    )


def criterion_10() -> Check:
    seq = build_counterexample(0.5, 1, log4_weight(), 2).seq
    flat = constant_weight(1.0)
    ce = build_counterexample(0.5, 1, flat, 2, seq=seq)
    T = [r.T_k for r in divergence_table(ce, 0.5, 1, flat, 2, measure=False)]
    return Check(
        "C10 negative control (constant Phi)",
        T[2] < 2 * T[0],
        f"T = {', '.join(f'{t:.4g}' for t in T)}; T_2/T_0 = {T[2] / T[0]:.3f} (< 2)",
    )


ACCEPTANCE: list[Callable[[], Check]] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
]


def suite(name: str, bits: int = 10) -> list[Callable[[], Check]]:
    suites: dict[str, list[Callable[[], Check]]] = {
        "kernels": [lambda: kernel_identities(bits), lambda: dyadic_kernel_indicator(min(bits, 12))],
        "transform": [
            lambda: transform_oracle(min(bits, 8), min(bits, 5)),
            lambda: transform_round_trip(bits),
            lambda: parseval(bits),
        ],
        "hardy": [lambda: martingale_properties(min(bits, 6)), criterion_4],
        "summability": [summability_properties, criterion_9],
        "counterexample": [criterion_5, criterion_6, criterion_7, criterion_8, criterion_10],
        "acceptance": ACCEPTANCE,
    }
    if name == "all":
        seen: list[Callable[[], Check]] = []
        for key in ("kernels", "transform", "hardy", "summability", "counterexample"):
            seen.extend(suites[key])
        return seen + [criterion_1, criterion_2, criterion_3]
    if name not in suites:
        raise ValueError(f"unknown suite {name!r}")
    return suites[name]


SUITES = ("kernels", "transform", "hardy", "summability", "counterexample", "acceptance", "all")


def run_suite(name: str, bits: int = 10) -> list[Check]:
    return [timed(check) for check in suite(name, bits)]
