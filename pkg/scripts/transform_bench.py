"""Timing of the fast Walsh-Paley transform in one and two dimensions."""

import argparse
import time

import numpy as np

from walsh_lab.dyadic import StepFn1, StepFn2
from walsh_lab.walsh import forward_transform, inverse_transform


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    for bits in (10, 14, 18, 20, 22):
        f = StepFn1(bits, rng.normal(size=1 << bits))
        s = forward_transform(f)
        fwd = best_of(lambda: forward_transform(f), args.repeats)
        inv = best_of(lambda: inverse_transform(s), args.repeats)
        print(f"1D 2^{bits:<2}  forward {fwd * 1e3:8.2f} ms  inverse {inv * 1e3:8.2f} ms")
    for bits in (6, 8, 10):
        g = StepFn2(bits, bits, rng.normal(size=(1 << bits, 1 << bits)))
        fwd = best_of(lambda: forward_transform(g), args.repeats)
        print(f"2D {1 << bits}x{1 << bits}  forward {fwd * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
