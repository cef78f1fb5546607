"""Per-block divergence witnesses for a few weights and exponents.

Prints T_k, G_k and T_k / Phi^(3/4) for each configuration, and writes the
rows as CSV when --out is given.
"""

import argparse

from walsh_lab.counterexample import build_counterexample, divergence_table
from walsh_lab.csvio import emit_csv
from walsh_lab.summability import constant_weight, log4_weight

COLUMNS = ("phi", "p", "alpha", "k", "alpha_k", "T_k", "G_k", "T_over_phi34", "measured")


def rows_for(p, alpha, K, phi, seq_from=None, measure=False):
    ce = build_counterexample(p, alpha, phi, K, seq=seq_from)
    for r in divergence_table(ce, p, alpha, phi, K, measure=measure):
        scale = phi(2.0**r.alpha_k, 2.0**r.alpha_k) ** 0.75
        yield (phi.descriptor, p, alpha, r.k, r.alpha_k, r.T_k, r.G_k, r.T_k / scale, r.measured)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out")
    args = ap.parse_args()

    # exact weak-L_p sums only for the default configuration, whose blocks are small
    rows = list(rows_for(0.5, 1.0, 2, log4_weight(), measure=True))
    for p, alpha in [(0.5, 2.0), (0.75, 1.0)]:
        rows += rows_for(p, alpha, 2, log4_weight())
    # same blocks, bounded weight
    base = build_counterexample(0.5, 1.0, log4_weight(), 2).seq
    rows += rows_for(0.5, 1.0, 2, constant_weight(1.0), seq_from=base)

    print(f"{'phi':>14} {'p':>5} {'alpha':>5} {'k':>2} {'a_k':>4} {'T_k':>12} {'G_k':>12} {'T/Phi^.75':>10} {'measured':>10}")
    for phi, p, alpha, k, a, T, G, r, m in rows:
        shown = "" if m is None else f"{m:10.5g}"
        print(f"{phi:>14} {p:5.2f} {alpha:5.2f} {k:2d} {a:4d} {T:12.5g} {G:12.5g} {r:10.4f} {shown}")
    if args.out:
        emit_csv(rows, COLUMNS, args.out)


if __name__ == "__main__":
    main()
