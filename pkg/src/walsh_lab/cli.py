"""``walsh-lab`` command line.

Exit status: 0 on success, 1 when a verification check fails, 2 on a
usage error (bad flags or ranges, unreadable input).  Every parameter is
validated before any computation, and artifacts are written only after
the computation succeeded.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from walsh_lab import csvio
from walsh_lab.config import CAPS
from walsh_lab.counterexample import build_counterexample, divergence_table
from walsh_lab.dyadic import ResolutionError, StepFn2
from walsh_lab.hardy import Martingale2, assemble, hardy_quasinorm
from walsh_lab.summability import (
    SummabilityVariant,
    WEIGHTS,
    diagonal_variant_sum,
    phi_cone_sum,
    weight_by_name,
    weisz_functional,
)
from walsh_lab.verify import SUITES, run_suite
from walsh_lab.walsh import (
    Spectrum1,
    Spectrum2,
    dirichlet_closed,
    dirichlet_kernel,
    forward_transform,
    inverse_transform,
    rectangular_partial_sum,
)

SUMMABILITY_COLUMNS = ("variant", "p", "alpha", "n", "m", "norm_kind", "value", "hp_norm", "ratio")
COUNTEREXAMPLE_COLUMNS = ("k", "alpha_k", "lambda_k", "v_k", "lower_bound", "T_k", "G_k", "ratio", "regime")


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _threads(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("thread count must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output CSV path (stdout when omitted)")
    common.add_argument("--threads", type=_threads, default=None, help="cap on internal parallelism")

    parser = argparse.ArgumentParser(prog="walsh-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", parents=[common], help="Walsh-Dirichlet kernel D_n as a step function")
    k.add_argument("--n", type=_positive_int, required=True)
    k.add_argument("--bits", type=_positive_int, required=True)
    k.add_argument("--literal", action="store_true", help="sum Walsh functions instead of the closed form")

    t = sub.add_parser("transform", parents=[common], help="Walsh-Paley transform of a CSV grid")
    t.add_argument("--in", dest="inp", required=True)
    t.add_argument("--inverse", action="store_true")

    ps = sub.add_parser("partial-sum", parents=[common], help="rectangular partial sum S_{n,m}")
    ps.add_argument("--in", dest="inp", required=True, help="2D step function or spectrum")
    ps.add_argument("--n", type=_positive_int, required=True, help="x-frequency bound")
    ps.add_argument("--m", type=_positive_int, required=True, help="y-frequency bound")

    s = sub.add_parser("summability", parents=[common], help="strong summability functionals")
    s.add_argument("--in", dest="inp", required=True, help="2D step function or atom manifest")
    s.add_argument("--variant", choices=("W", "W1", "W2", "TH", "TH1", "PHI"), default="W")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--m", type=_positive_int, default=None)
    s.add_argument("--norm", choices=("strong", "weak"), default="strong")
    s.add_argument("--phi", choices=sorted(WEIGHTS), default="log4")

    c = sub.add_parser("counterexample", parents=[common], help="divergence report of the sharpness construction")
    c.add_argument("--p", type=float, default=0.5)
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--phi", choices=sorted(WEIGHTS), default="log4")
    c.add_argument("--levels", type=_positive_int, default=2)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", choices=SUITES, default="acceptance")
    v.add_argument("--bits", type=_positive_int, default=10)
    return parser


def _load_martingale(path: str) -> Martingale2:
    try:
        if csvio.is_manifest(path):
            f, _ = assemble(csvio.read_manifest(path))
            return f
        obj = csvio.read_grid(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if isinstance(obj, Spectrum2):
        obj = inverse_transform(obj)
    if not isinstance(obj, StepFn2):
        raise UsageError(f"{path} does not hold a 2D function")
    return Martingale2.from_function(obj)


def _read(path: str):
    try:
        return csvio.read_grid(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        csvio._write_atomic(out, text)


def cmd_kernel(args) -> int:
    if args.n > (1 << args.bits):
        raise UsageError(f"--n must not exceed 2^bits = {1 << args.bits}")
    fn = dirichlet_kernel if args.literal else dirichlet_closed
    _emit_text(csvio.render_grid(fn(args.n, args.bits)), args.out)
    return 0


def cmd_transform(args) -> int:
    obj = _read(args.inp)
    if args.inverse:
        if not isinstance(obj, (Spectrum1, Spectrum2)):
            raise UsageError("--inverse needs a spectrum file")
        result = inverse_transform(obj)
    else:
        if isinstance(obj, (Spectrum1, Spectrum2)):
            raise UsageError("forward transform needs a stepfn file")
        result = forward_transform(obj)
    _emit_text(csvio.render_grid(result), args.out)
    return 0


def cmd_partial_sum(args) -> int:
    obj = _read(args.inp)
    if isinstance(obj, StepFn2):
        obj = forward_transform(obj)
    if not isinstance(obj, Spectrum2):
        raise UsageError("partial sums need a 2D input")
    if args.n > (1 << obj.bits_x) or args.m > (1 << obj.bits_y):
        raise UsageError(f"bounds must satisfy n <= {1 << obj.bits_x}, m <= {1 << obj.bits_y}")
    _emit_text(csvio.render_grid(rectangular_partial_sum(obj, args.n, args.m)), args.out)
    return 0


def _scales(n: int, m: int) -> list[tuple[int, int]]:
    top = max(n, m)
    out = []
    s = 2
    while s < top:
        out.append((min(s, n), min(s, m)))
        s *= 2
    out.append((n, m))
    return sorted(set(out))


def cmd_summability(args) -> int:
    m = args.n if args.m is None else args.m
    p, alpha, variant = args.p, args.alpha, args.variant
    if variant == "W":
        if not 0 < p <= 1 or alpha < 0 or args.n < 2 or m < 2:
            raise UsageError("W needs 0 < p <= 1, alpha >= 0, n, m >= 2")
    elif variant == "PHI":
        if not 0 < p < 1 or not alpha > 0:
            raise UsageError("PHI needs 0 < p < 1 and alpha > 0")
    else:
        SummabilityVariant(variant, p)
        if args.n < 2:
            raise UsageError("diagonal variants need n >= 2")
    f = _load_martingale(args.inp)
    hp = hardy_quasinorm(f, p)
    rows = []
    for n_i, m_i in _scales(args.n, m):
        if variant == "W":
            value = weisz_functional(f, p, alpha, n_i, m_i, args.norm)
        elif variant == "PHI":
            value = phi_cone_sum(f, p, alpha, weight_by_name(args.phi), n_i, m_i, args.norm)
        else:
            if n_i < 2:
                continue
            value = diagonal_variant_sum(f, SummabilityVariant(variant, p), n_i, args.norm)
            m_i = n_i
        ratio = value / hp**p if hp > 0 else float("nan")
        rows.append((variant, p, alpha, n_i, m_i, args.norm, value, hp, ratio))
    _emit_text(csvio.render_csv(rows, SUMMABILITY_COLUMNS), args.out)
    return 0


def cmd_counterexample(args) -> int:
    if not 0 < args.p < 1 or not args.alpha > 0:
        raise UsageError("the construction needs 0 < p < 1 and alpha > 0")
    phi = weight_by_name(args.phi)
    ce = build_counterexample(args.p, args.alpha, phi, args.levels)
    table = divergence_table(ce, args.p, args.alpha, phi, args.levels)
    rows = [
        (r.k, r.alpha_k, r.lambda_k, r.v_k, r.lower_bound, r.T_k, r.G_k, r.ratio, r.regime) for r in table
    ]
    _emit_text(csvio.render_csv(rows, COUNTEREXAMPLE_COLUMNS), args.out)
    for r in table:
        if r.measured is not None:
            print(f"k={r.k}: measured weak-L_p block sum {r.measured:.6g} >= T_k {r.T_k:.6g}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.bits)
    lines = [c.line() for c in checks]
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        csvio.emit_csv([(c.name, c.passed, c.detail) for c in checks], ("check", "passed", "detail"), args.out)
    return 0 if passed == len(checks) else 1


COMMANDS = {
    "kernel": cmd_kernel,
    "transform": cmd_transform,
    "partial-sum": cmd_partial_sum,
    "summability": cmd_summability,
    "counterexample": cmd_counterexample,
    "verify": cmd_verify,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        CAPS.threads = args.threads
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ResolutionError, ValueError) as exc:
        print(f"walsh-lab: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
