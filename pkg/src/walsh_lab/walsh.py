"""Walsh-Paley system, Dirichlet kernels and the fast Walsh transform.

Under the cell convention of :mod:`walsh_lab.dyadic` (x_0 is the most
significant bit of the cell index), w_n on cell j equals H[n, rev(j)],
where H is the natural-order Hadamard matrix and rev reverses ``bits``
bits.  The transform therefore permutes the samples by bit reversal and
then runs the unnormalized Hadamard butterfly.  The inverse runs the
butterfly and then un-permutes (bit reversal is an involution).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union, overload

import numpy as np

from walsh_lab.dyadic import (
    ResolutionError,
    StepFn1,
    StepFn2,
    _frozen,
    check_bits,
    interval_indicator,
)


@dataclass(frozen=True, eq=False)
class Spectrum1:
    """coeffs[i] is the integral of f * w_i."""

    bits: int
    coeffs: np.ndarray

    def __post_init__(self):
        bits = check_bits(self.bits, 1)
        coeffs = _frozen(self.coeffs)
        if coeffs.shape != (1 << bits,):
            raise ValueError(f"expected {1 << bits} coefficients, got shape {coeffs.shape}")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True, eq=False)
class Spectrum2:
    """coeffs[i, j] is the integral of f(x, y) w_i(x) w_j(y)."""

    bits_x: int
    bits_y: int
    coeffs: np.ndarray

    def __post_init__(self):
        bx = check_bits(self.bits_x, 2)
        by = check_bits(self.bits_y, 2)
        coeffs = _frozen(self.coeffs)
        if coeffs.shape != (1 << bx, 1 << by):
            raise ValueError(f"expected shape {(1 << bx, 1 << by)}, got {coeffs.shape}")
        object.__setattr__(self, "bits_x", bx)
        object.__setattr__(self, "bits_y", by)
        object.__setattr__(self, "coeffs", coeffs)


def _cells(bits: int) -> np.ndarray:
    return np.arange(1 << bits, dtype=np.int64)


def rademacher(k: int, bits: int) -> StepFn1:
    """r_k(x) = (-1)^{x_k}."""
    if not 0 <= k < bits:
        raise ResolutionError(f"r_{k} is not resolved at {bits} bits")
    xk = (_cells(bits) >> (bits - 1 - k)) & 1
    return StepFn1(bits, 1.0 - 2.0 * xk)


def walsh_paley(n: int, bits: int) -> StepFn1:
    """w_n as the product of r_k over the binary digits n_k = 1."""
    if not 0 <= n < (1 << bits):
        raise ResolutionError(f"w_{n} is not resolved at {bits} bits")
    values = np.ones(1 << bits)
    k = 0
    while n >> k:
        if (n >> k) & 1:
            values *= rademacher(k, bits).values
        k += 1
    return StepFn1(bits, values)


def walsh_matrix(count: int, bits: int, start: int = 0) -> np.ndarray:
    """Rows w_start, ..., w_{start+count-1} sampled on all cells.

    Built digit by digit from Rademacher functions, independently of the
    Hadamard butterfly, so it can serve as a test oracle.
    """
    if start < 0 or start + count > (1 << bits):
        raise ResolutionError(f"Walsh indices [{start}, {start + count}) exceed {bits} bits")
    n = np.arange(start, start + count, dtype=np.int64)[:, None]
    x = _cells(bits)[None, :]
    sign = np.zeros((count, 1 << bits), dtype=np.int64)
    for k in range(bits):
        sign ^= ((n >> k) & 1) & ((x >> (bits - 1 - k)) & 1)
    return 1.0 - 2.0 * sign


def _check_kernel_index(n: int, bits: int) -> None:
    if not 0 <= n <= (1 << bits):
        raise ResolutionError(f"D_{n} needs n <= 2^{bits}")


def dirichlet_kernel(n: int, bits: int) -> StepFn1:
    """D_n = w_0 + ... + w_{n-1}, summed literally."""
    _check_kernel_index(n, bits)
    total = np.zeros(1 << bits)
    chunk = max(1, (1 << 22) >> bits)
    for start in range(0, n, chunk):
        total += walsh_matrix(min(chunk, n - start), bits, start).sum(axis=0)
    return StepFn1(bits, total)


def dirichlet_closed(n: int, bits: int) -> StepFn1:
    """D_n from the dyadic closed forms.

    D_{2^m} = 2^m on I_m and 0 elsewhere; for other n,
    D_n = w_n * sum_j n_j w_{2^j} D_{2^j}.
    """
    _check_kernel_index(n, bits)
    if n == 0:
        return StepFn1.constant(0.0, bits)
    if n & (n - 1) == 0:
        m = n.bit_length() - 1
        return StepFn1(bits, float(n) * interval_indicator(m, bits).values)
    acc = np.zeros(1 << bits)
    for j in range(n.bit_length()):
        if (n >> j) & 1:
            acc += rademacher(j, bits).values * float(1 << j) * interval_indicator(j, bits).values
    return StepFn1(bits, walsh_paley(n, bits).values * acc)


@lru_cache(maxsize=64)
def bitrev_permutation(bits: int) -> np.ndarray:
    j = _cells(bits)
    r = np.zeros_like(j)
    for k in range(bits):
        r |= ((j >> k) & 1) << (bits - 1 - k)
    # left writeable: np.take is several times slower with a read-only index
    return r


def hadamard_butterfly(a: np.ndarray) -> np.ndarray:
    """Unnormalized natural-order Hadamard transform along the last axis.

    Each pass combines adjacent pairs and writes sums to the lower half
    and differences to the upper half of a second buffer.  After ``bits``
    passes the output index is back in natural order.
    """
    a = np.asarray(a, dtype=np.float64)
    size = a.shape[-1]
    bits = size.bit_length() - 1
    if size != 1 << bits:
        raise ValueError(f"length {size} is not a power of two")
    lead = a.shape[:-1]
    src = np.ascontiguousarray(a).reshape(-1, size)
    if bits == 0:
        return src.reshape(*lead, size).copy()
    buf = [np.empty_like(src), np.empty_like(src)]
    for step in range(bits):
        dst = buf[step & 1]
        pairs = src.reshape(src.shape[0], -1, 2)
        halves = dst.reshape(dst.shape[0], 2, -1)
        np.add(pairs[:, :, 0], pairs[:, :, 1], out=halves[:, 0])
        np.subtract(pairs[:, :, 0], pairs[:, :, 1], out=halves[:, 1])
        src = dst
    return src.reshape(*lead, size)


def _forward_axis(v: np.ndarray, bits: int, axis: int) -> np.ndarray:
    v = np.moveaxis(v, axis, -1)
    out = hadamard_butterfly(np.take(v, bitrev_permutation(bits), axis=-1))
    out *= 2.0 ** -bits
    return np.moveaxis(out, -1, axis)


def _inverse_axis(c: np.ndarray, bits: int, axis: int) -> np.ndarray:
    c = np.moveaxis(c, axis, -1)
    out = np.take(hadamard_butterfly(c), bitrev_permutation(bits), axis=-1)
    return np.moveaxis(out, -1, axis)


@overload
def forward_transform(f: StepFn1) -> Spectrum1: ...
@overload
def forward_transform(f: StepFn2) -> Spectrum2: ...


def forward_transform(f):
    """Walsh-Paley coefficients in O(m log m) per axis."""
    if isinstance(f, StepFn1):
        return Spectrum1(f.bits, _forward_axis(f.values, f.bits, 0))
    rows = _forward_axis(f.values, f.bits_y, 1)
    return Spectrum2(f.bits_x, f.bits_y, _forward_axis(rows, f.bits_x, 0))


@overload
def inverse_transform(s: Spectrum1) -> StepFn1: ...
@overload
def inverse_transform(s: Spectrum2) -> StepFn2: ...


def inverse_transform(s):
    """Synthesis sum_i coeffs[i] w_i (no scale factor)."""
    if isinstance(s, Spectrum1):
        return StepFn1(s.bits, _inverse_axis(s.coeffs, s.bits, 0))
    rows = _inverse_axis(s.coeffs, s.bits_y, 1)
    return StepFn2(s.bits_x, s.bits_y, _inverse_axis(rows, s.bits_x, 0))


def rectangular_partial_sum(s: Spectrum2, M: int, N: int) -> StepFn2:
    """S_{M,N}: keep coefficients with i < M and j < N, then synthesize."""
    if not (0 <= M <= (1 << s.bits_x) and 0 <= N <= (1 << s.bits_y)):
        raise ResolutionError(
            f"S_{{{M},{N}}} out of range for resolution ({s.bits_x}, {s.bits_y})"
        )
    c = np.zeros_like(s.coeffs)
    c[:M, :N] = s.coeffs[:M, :N]
    return inverse_transform(Spectrum2(s.bits_x, s.bits_y, c))


def coefficient_oracle(f: StepFn2, i: int, j: int) -> float:
    """Direct summation of the (i, j) coefficient integral."""
    if not (0 <= i < (1 << f.bits_x) and 0 <= j < (1 << f.bits_y)):
        raise ResolutionError(f"coefficient ({i}, {j}) out of range")
    wi = walsh_paley(i, f.bits_x).values
    wj = walsh_paley(j, f.bits_y).values
    return float(np.sum(f.values * np.outer(wi, wj)) * 2.0 ** -(f.bits_x + f.bits_y))


Spectrum = Union[Spectrum1, Spectrum2]
