import math

import numpy as np
import pytest

from walsh_lab.config import CAPS
from walsh_lab.counterexample import (
    AlphaSequence,
    block_partial_sum,
    build_atom,
    build_counterexample,
    closed_form_value,
    divergence_table,
    odd_pairs,
    predicted_coefficient,
    predicted_spectrum,
    sample_complement_points,
    select_alpha_sequence,
    weak_lp_lower_bound,
)
from walsh_lab.dyadic import ResolutionError, evaluate_at, materialize, weak_lp_quasinorm
from walsh_lab.hardy import level, validate_atom
from walsh_lab.summability import constant_weight, int_part, log4_weight, loglog_weight, phi_cone_sum
from walsh_lab.walsh import dirichlet_closed, forward_transform, rectangular_partial_sum, walsh_paley

PHI = log4_weight()


@pytest.fixture(scope="module")
def ce1():
    return build_counterexample(0.5, 1.0, PHI, 1)


@pytest.fixture(scope="module")
def ce2():
    return build_counterexample(0.5, 1.0, PHI, 2)


def rule_oracle(phi, p, alpha, K):
    out, a = [], 2
    for k in range(K + 1):
        while phi(2.0**a, 2.0**a) ** (-p / 4) > 2.0**-k:
            a += 1
        out.append(a)
        a += int_part(alpha) + 2
    return tuple(out)


def test_alpha_sequence_default():
    seq = select_alpha_sequence(PHI, 0.5, 1.0, 2)
    assert seq.entries == (2, 5, 15) == rule_oracle(PHI, 0.5, 1.0, 2)


@pytest.mark.parametrize("phi", [log4_weight(), loglog_weight()])
@pytest.mark.parametrize("p,alpha", [(0.25, 0.5), (0.5, 1.0), (0.75, 2.0)])
def test_alpha_sequence_rule_and_gap(phi, p, alpha):
    # slow weights reach only the first few thresholds below the search cap
    K = {("log4", 0.25): 1, ("loglog", 0.25): 0}.get((phi.name, p), 2 if phi.name == "log4" else 1)
    seq = select_alpha_sequence(phi, p, alpha, K)
    assert seq.entries == rule_oracle(phi, p, alpha, K)
    assert all(b - a >= int_part(alpha) + 2 for a, b in zip(seq.entries, seq.entries[1:]))
    assert sum(phi(2.0**a, 2.0**a) ** (-p / 4) for a in seq.entries) <= 2


def test_alpha_sequence_search_cap():
    # p = 1/4, k = 2 needs log4 >= 2^32, far past 2^60
    with pytest.raises(ValueError, match="search cap"):
        select_alpha_sequence(PHI, 0.25, 1.0, 2)


def test_alpha_sequence_rejects_bad_input():
    with pytest.raises(ValueError):
        AlphaSequence((2, 3), 1.0, 0.5, 2.0)
    with pytest.raises(ValueError):
        select_alpha_sequence(constant_weight(1.0), 0.5, 1.0, 1)
    with pytest.raises(ValueError):
        select_alpha_sequence(PHI, 1.0, 1.0, 1)


@pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("alpha_k", [2, 3, 4, 5])
def test_atoms_valid(p, alpha_k):
    a = build_atom(p, 1.0, alpha_k)
    r = validate_atom(a)
    assert r.ok, r
    assert r.sup_norm <= 2.0 ** (2 * alpha_k / p)


def test_atom_over_cap():
    with pytest.raises(ResolutionError):
        build_atom(0.5, 1.0, CAPS.bits_2d)


def test_single_atom_case():
    ce = build_counterexample(0.5, 1.0, PHI, 0)
    assert math.isclose(ce.hp_upper_bound, ce.lambdas[0])
    assert np.allclose(ce.martingale().finest.values, ce.lambdas[0] * ce.atoms[0].fn.values)


def test_heights_cancel(ce2):
    for k, a in enumerate(ce2.seq.entries):
        expect = 2.0 ** (a * (2 / 0.5 - 2)) * PHI(2.0**a, 2.0**a) ** -0.25
        assert math.isclose(ce2.lambdas[k] * ce2.scales[k], expect, rel_tol=1e-12)
        assert math.isclose(ce2.height(k), expect, rel_tol=1e-12)


def test_dyadic_levels_of_martingale(ce1):
    f = ce1.martingale()
    bits = f.bits
    for n in range(bits + 1):
        expect = sum(
            (ce1.lambdas[k] * ce1.atoms[k].fn.refine(bits, bits).values for k, a in enumerate(ce1.seq.entries) if a + 2 <= n),
            np.zeros((1 << bits, 1 << bits)),
        )
        if any(a < n < a + 2 for a in ce1.seq.entries):
            continue
        assert np.allclose(level(f, n).refine(bits, bits).values, expect, atol=1e-9), n


def test_predicted_coefficient_examples(ce1):
    assert predicted_coefficient(ce1, 0, 0) == 0
    assert predicted_coefficient(ce1, 5, 9) == 16 / PHI(4, 4) ** 0.25
    assert predicted_coefficient(ce1, 5, 20) == 0


def test_coefficient_pattern(ce1):
    c = forward_transform(ce1.martingale().finest).coeffs
    assert np.max(np.abs(c - predicted_spectrum(ce1, ce1.resolution()))) <= 1e-9


def test_block_partial_sum_matches_spectrum(ce1):
    f = ce1.martingale().finest
    s = forward_transform(f)
    for k in (0, 1):
        lo, hi = ce1.block(k)
        for m in range(lo + 1, hi, 3 if k == 0 else 29):
            for n in range(lo + 1, hi, 3 if k == 0 else 31):
                got = materialize(block_partial_sum(ce1, m, n), f.bits_x, f.bits_y).values
                assert np.max(np.abs(got - rectangular_partial_sum(s, m, n).values)) <= 1e-9


def test_block_partial_sum_outside_block(ce1):
    with pytest.raises(ValueError):
        block_partial_sum(ce1, 3, 9)


def test_single_mode_boundary(ce1):
    lo, _ = ce1.block(0)
    s = block_partial_sum(ce1, lo + 1, lo + 1)
    c, g, h = s.terms[-1]
    assert np.array_equal(g.values, walsh_paley(lo, g.bits).values)


def test_eta_terms_vanish_off_cube(ce2):
    s = block_partial_sum(ce2, 33, 35)
    rng = np.random.default_rng(3)
    for x, y in sample_complement_points(s.bits_x, 50, rng):
        eta = s.terms[0]
        assert eta[1].values[x.cell(eta[1].bits)] * eta[2].values[y.cell(eta[2].bits)] == 0


def test_closed_form_sampled(ce2):
    rng = np.random.default_rng(11)
    for k in (0, 1, 2):
        lo, hi = ce2.block(k)
        ms = rng.choice(np.arange(lo + 1, hi, 2), size=3)
        for m, n in zip(ms, rng.permutation(ms)):
            s = block_partial_sum(ce2, int(m), int(n))
            v = closed_form_value(ce2, k, int(m), int(n))
            for x, y in sample_complement_points(max(s.bits_x, s.bits_y), 100, rng):
                assert abs(abs(evaluate_at(s, x, y)) - v) <= 1e-9 * max(1.0, v)


def test_closed_form_independent_of_pair(ce1):
    vals = {closed_form_value(ce1, 0, m, n) for m, n in odd_pairs(ce1, 0)}
    assert len(vals) == 1


def test_closed_form_rejects_even(ce1):
    with pytest.raises(ValueError):
        closed_form_value(ce1, 0, 6, 5)
    with pytest.raises(ValueError):
        closed_form_value(ce1, 0, 3, 5)


def test_lower_bound_formula(ce1):
    assert math.isclose(weak_lp_lower_bound(ce1, 0), ce1.height(0) / 32)


def test_lower_bound_sound(ce1):
    f = ce1.martingale().finest
    s = forward_transform(f)
    for m, n in odd_pairs(ce1, 0):
        assert weak_lp_quasinorm(rectangular_partial_sum(s, m, n), 0.5) >= weak_lp_lower_bound(ce1, 0)


def test_divergence_default(ce2):
    rows = divergence_table(ce2, 0.5, 1.0, PHI, 2, measure=False)
    T = [r.T_k for r in rows]
    assert T[0] < T[1] < T[2] and T[2] > 10 * T[0]
    ratios = [r.T_k / PHI(2.0**r.alpha_k, 2.0**r.alpha_k) ** 0.75 for r in rows]
    assert min(ratios) >= 0.5 * ratios[0]
    assert all(r.T_k >= r.G_k for r in rows)


def test_measured_matches_cone_sum(ce1):
    rows = divergence_table(ce1, 0.5, 1.0, PHI, 1)
    f = ce1.martingale()
    direct = phi_cone_sum(f, 0.5, 1.0, PHI, 16, 16, "weak", pairs=odd_pairs(ce1, 0))
    assert math.isclose(rows[0].measured, direct, rel_tol=1e-9)
    assert all(r.measured >= r.T_k for r in rows)


def test_negative_control_bounded(ce2):
    flat = build_counterexample(0.5, 1.0, constant_weight(1.0), 2, seq=ce2.seq)
    rows = divergence_table(flat, 0.5, 1.0, constant_weight(1.0), 2, measure=False)
    T = [r.T_k for r in rows]
    assert T[2] / T[0] < 1.1
