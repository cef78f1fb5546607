import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from walsh_lab.dyadic import StepFn1, StepFn2, integrate, interval_indicator, tensor_product
from walsh_lab.walsh import (
    Spectrum1,
    Spectrum2,
    coefficient_oracle,
    dirichlet_closed,
    dirichlet_kernel,
    forward_transform,
    hadamard_butterfly,
    inverse_transform,
    rademacher,
    rectangular_partial_sum,
    walsh_matrix,
    walsh_paley,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)


def grid2(max_bits=4):
    return st.tuples(st.integers(0, max_bits), st.integers(0, max_bits)).flatmap(
        lambda b: arrays(np.float64, (1 << b[0], 1 << b[1]), elements=finite).map(
            lambda v: StepFn2(b[0], b[1], v)
        )
    )


def test_rademacher_examples():
    assert np.array_equal(rademacher(0, 1).values, [1, -1])
    assert np.array_equal(rademacher(1, 2).values, [1, -1, 1, -1])
    for k in range(5):
        assert integrate(rademacher(k, 6)) == 0


def test_walsh_examples():
    assert np.array_equal(walsh_paley(0, 3).values, np.ones(8))
    assert np.array_equal(walsh_paley(3, 2).values, [1, -1, -1, 1])


def test_walsh_orthonormal():
    w = np.array([walsh_paley(n, 4).values for n in range(16)])
    assert np.array_equal(w @ w.T / 16, np.eye(16))
    assert np.array_equal(walsh_matrix(16, 4), w)


def test_dirichlet_examples():
    assert np.array_equal(dirichlet_kernel(1, 3).values, np.ones(8))
    assert np.array_equal(dirichlet_kernel(4, 2).values, [4, 0, 0, 0])
    assert np.array_equal(dirichlet_kernel(3, 2).values, [3, 1, 1, -1])
    assert np.array_equal(dirichlet_closed(3, 2).values, [3, 1, 1, -1])


@pytest.mark.parametrize("m", range(9))
def test_power_kernel_is_scaled_indicator(m):
    assert np.array_equal(dirichlet_closed(1 << m, 8).values, (1 << m) * interval_indicator(m, 8).values)


def test_closed_matches_literal():
    for n in range(257):
        assert np.array_equal(dirichlet_closed(n, 8).values, dirichlet_kernel(n, 8).values), n


def test_transform_examples():
    assert np.array_equal(forward_transform(StepFn1.constant(1.0, 3)).coeffs, [1, 0, 0, 0, 0, 0, 0, 0])
    assert np.array_equal(forward_transform(dirichlet_closed(4, 2)).coeffs, [1, 1, 1, 1])
    assert np.array_equal(inverse_transform(Spectrum1(3, np.eye(8)[0])).values, np.ones(8))
    assert np.array_equal(inverse_transform(Spectrum1(2, np.ones(4))).values, [4, 0, 0, 0])


@pytest.mark.parametrize("bits", range(7))
def test_transform_matches_integral_oracle(bits, rng):
    f = StepFn1(bits, rng.normal(size=1 << bits))
    w = walsh_matrix(1 << bits, bits)
    assert np.allclose(forward_transform(f).coeffs, w @ f.values / (1 << bits), atol=1e-12)


def test_2d_coefficient_oracle(rng):
    f = StepFn2(3, 2, rng.normal(size=(8, 4)))
    c = forward_transform(f).coeffs
    for i in range(8):
        for j in range(4):
            assert np.isclose(c[i, j], coefficient_oracle(f, i, j), atol=1e-12)


def test_coefficient_oracle_examples():
    one = StepFn2.constant(1.0, 3, 3)
    assert coefficient_oracle(one, 0, 0) == 1
    f = tensor_product(walsh_paley(2, 3), walsh_paley(3, 3))
    for i in range(8):
        for j in range(8):
            assert coefficient_oracle(f, i, j) == (1.0 if (i, j) == (2, 3) else 0.0)
            if (i, j) != (0, 0):
                assert coefficient_oracle(one, i, j) == 0


@given(grid2())
def test_round_trip(f):
    back = inverse_transform(forward_transform(f)).values
    assert np.allclose(back, f.values, atol=1e-9)


@given(grid2(), grid2(), finite)
def test_linearity(f, g, c):
    if (f.bits_x, f.bits_y) != (g.bits_x, g.bits_y):
        g = StepFn2(f.bits_x, f.bits_y, np.resize(g.values, f.values.shape))
    lhs = forward_transform(c * f + g).coeffs
    rhs = c * forward_transform(f).coeffs + forward_transform(g).coeffs
    assert np.allclose(lhs, rhs, atol=1e-6 * (1 + abs(c)) * 1e3)


@given(grid2())
def test_parseval(f):
    c = forward_transform(f).coeffs
    assert np.isclose(np.sum(c**2), np.mean(f.values**2), rtol=1e-9, atol=1e-9)


def test_butterfly_batched(rng):
    a = rng.normal(size=(3, 16))
    rows = np.array([hadamard_butterfly(r.copy()) for r in a])
    assert np.allclose(hadamard_butterfly(a.copy()), rows)


def test_partial_sum_full_range_and_truncation(rng):
    f = StepFn2(3, 3, rng.normal(size=(8, 8)))
    s = forward_transform(f)
    assert np.allclose(rectangular_partial_sum(s, 8, 8).values, f.values, atol=1e-12)
    w = walsh_matrix(8, 3)
    M, N = 5, 3
    direct = w[:M].T @ s.coeffs[:M, :N] @ w[:N]
    assert np.allclose(rectangular_partial_sum(s, M, N).values, direct, atol=1e-12)


def test_partial_sum_of_power_pairs_is_block_average(rng):
    f = StepFn2(4, 4, rng.normal(size=(16, 16)))
    avg = f.values.reshape(4, 4, 4, 4).mean(axis=(1, 3))
    got = rectangular_partial_sum(forward_transform(f), 4, 4).values
    assert np.allclose(got, np.repeat(np.repeat(avg, 4, 0), 4, 1), atol=1e-12)


def test_spectrum_shape_checked():
    with pytest.raises(ValueError):
        Spectrum2(1, 1, np.zeros((2, 3)))
