"""Ratio of the cone functional to the H_p quasi-norm over growing scales.

Uses the fixed test set of the acceptance suite (random atoms and
band-limited functions) and reports the ratio at n = m = 4, 8, ..., 256.
"""

import argparse

from walsh_lab.csvio import emit_csv
from walsh_lab.hardy import hardy_quasinorm
from walsh_lab.summability import weisz_functional
from walsh_lab.verify import weisz_test_set

COLUMNS = ("f", "p", "alpha", "n", "norm_kind", "ratio")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, nargs="+", default=[0.5, 1.0])
    ap.add_argument("--alpha", type=float, nargs="+", default=[0.0, 1.0])
    ap.add_argument("--norm", choices=("strong", "weak"), default="strong")
    ap.add_argument("--out")
    args = ap.parse_args()

    scales = [1 << i for i in range(2, 9)]
    rows = []
    for idx, f in enumerate(weisz_test_set()):
        for p in args.p:
            h = hardy_quasinorm(f, p) ** p
            for alpha in args.alpha:
                ratios = [weisz_functional(f, p, alpha, n, n, args.norm) / h for n in scales]
                rows += [(idx, p, alpha, n, args.norm, r) for n, r in zip(scales, ratios)]
                print(f"f{idx} p={p:<4} alpha={alpha:<4} " + " ".join(f"{r:8.4f}" for r in ratios))
    if args.out:
        emit_csv(rows, COLUMNS, args.out)


if __name__ == "__main__":
    main()
