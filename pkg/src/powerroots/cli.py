"""Command-line front end.

Machine-readable results go to stdout, a human summary to stderr.  Exit
status is 0 on success, 2 on usage or input errors and 3 on numerical
errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import formats
from .blackbox import NewtonOracle, matrix_oracle, oracle_from_coeffs, oracle_from_slp
from .errors import ParseError, PowerRootsError, UsageError
from .polycore import Disc, Poly
from .powersums import (CauchyParams, cauchy_sum_disc, choose_q, random_rotation,
                        root_count, zero_power_sums)
from .radii import (bisect_bounds, coeff_radii_bounds, dlg_sharpened_bounds,
                    newton_smallest_bound)
from .solver import (RootApproximation, SolverConfig, largest_root, lehmer_newton,
                     root_sequence, roots_near, smallest_root)
from .squaring import run_dlg

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _complex_pair(text: str) -> complex:
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 're im', got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're im', got {text!r}") from None


def _disc(text: str) -> Disc:
    parts = text.replace(",", " ").split()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected 'c_re c_im rho', got {text!r}")
    try:
        c = complex(float(parts[0]), float(parts[1]))
        return Disc(c, float(parts[2]))
    except (ValueError, PowerRootsError):
        raise argparse.ArgumentTypeError(f"bad disc {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("input", help="input file")
    common.add_argument("--format", choices=("poly", "slp", "matrix"), default=None,
                        help="input format (default: poly, or matrix for eigen)")
    common.add_argument("--degree", type=_positive, help="degree of an SLP input with division")
    common.add_argument("--eps-bits", type=_positive, default=20)
    common.add_argument("--b0", type=_positive, default=24)
    common.add_argument("--q-cap", type=_positive, default=2 ** 20)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=_positive, default=None)
    common.add_argument("--report", action="store_true",
                        help="per-result details on stderr")

    p = _Parser(prog="powerroots", description="Polynomial zeros from Newton-ratio evaluations.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("roots", parents=[common], help="n smallest zeros by implicit deflation")
    s.add_argument("--n", type=_nonneg, required=True)
    sub.add_parser("smallest", parents=[common], help="absolutely smallest zero")
    sub.add_parser("largest", parents=[common], help="absolutely largest zero")
    s = sub.add_parser("lehmer", parents=[common], help="zero nearest the origin by circle sampling")
    s.add_argument("--sample-q", type=_positive, default=None)
    s.add_argument("--max-rounds", type=_positive, default=64)
    s = sub.add_parser("near", parents=[common], help="zero nearest each center")
    s.add_argument("--centers", required=True, help="file of 're im' lines")
    s = sub.add_parser("radii", parents=[common], help="extremal root-radius bounds")
    s.add_argument("--method", choices=("coeff", "newton", "dlg", "bisect"), default="coeff")
    s.add_argument("--center", type=_complex_pair, default=0j)
    s.add_argument("--j", type=_positive, default=1)
    s.add_argument("--tol-bits", type=_positive, default=10)
    s.add_argument("--steps", type=_nonneg, default=3)
    s = sub.add_parser("powersums", parents=[common], help="power sum of zeros in a disc")
    s.add_argument("--h", type=_nonneg, default=1)
    s.add_argument("--q", type=_positive, default=None)
    s.add_argument("--theta", type=float, default=2.0)
    s.add_argument("--disc", type=_disc, default=Disc(0, 1))
    s.add_argument("--rotation", type=float, default=None)
    s.add_argument("--method", choices=("newton", "cauchy"), default="cauchy")
    s = sub.add_parser("dlg", parents=[common], help="root-squaring iterate")
    s.add_argument("--steps", type=_nonneg, required=True)
    s.add_argument("--normalize", action="store_true")
    s = sub.add_parser("count", parents=[common], help="number of zeros in a disc")
    s.add_argument("--disc", type=_disc, required=True)
    s.add_argument("--q", type=_positive, default=None)
    s = sub.add_parser("eigen", parents=[common], help="extremal eigenvalues of a matrix")
    s.add_argument("--which", choices=("smallest", "largest", "both"), default="both")
    return p


def _load(args) -> tuple[NewtonOracle, Poly | None]:
    fmt = args.format or ("matrix" if args.verb == "eigen" else "poly")
    text = formats.read_text(args.input)
    if fmt == "poly":
        p = formats.parse_poly(text)
        return oracle_from_coeffs(p), p
    if fmt == "slp":
        prog = formats.parse_slp(text)
        try:
            return oracle_from_slp(prog, args.degree), None
        except PowerRootsError as e:
            raise UsageError(str(e)) from None
    return matrix_oracle(formats.parse_matrix(text)), None


def _need_poly(p: Poly | None, what: str) -> Poly:
    if p is None:
        raise UsageError(f"{what} needs coefficients; use --format poly")
    return p


def _g(x: float) -> str:
    return f"{x:.17g}"


def root_line(a: RootApproximation) -> str:
    bound = "-" if a.error_bound is None else _g(a.error_bound)
    return f"{_g(a.z.real)} {_g(a.z.imag)} {_g(a.residual)} {bound} {a.eval_count}"


def _config(args) -> SolverConfig:
    kw = dict(eps_bits=args.eps_bits, b0=args.b0, q_cap=args.q_cap, seed=args.seed,
              threads=args.threads)
    if args.verb == "lehmer":
        kw.update(sample_q=args.sample_q, max_rounds=args.max_rounds)
    return SolverConfig(**kw)


def _run(args, out, err) -> int:
    oracle, p = _load(args)
    verb = args.verb
    report = args.report
    status = EXIT_OK
    roots: list[RootApproximation] = []

    if verb in ("smallest", "largest", "lehmer", "eigen"):
        cfg = _config(args)
        if verb == "eigen":
            which = ["smallest", "largest"] if args.which == "both" else [args.which]
            fns = [smallest_root if w == "smallest" else largest_root for w in which]
        else:
            fns = [{"smallest": smallest_root, "largest": largest_root,
                    "lehmer": lehmer_newton}[verb]]
        for fn in fns:
            roots.append(fn(oracle, cfg))
            print(root_line(roots[-1]), file=out)
    elif verb == "roots":
        try:
            roots = root_sequence(oracle, args.n, _config(args))
        except PowerRootsError as e:
            for a in getattr(e, "partial", []):
                print(root_line(a), file=out)
            raise
        for a in roots:
            print(root_line(a), file=out)
    elif verb == "near":
        centers = formats.parse_centers(formats.read_text(args.centers))
        for c, a in zip(centers, roots_near(oracle, centers, _config(args))):
            if isinstance(a, RootApproximation):
                roots.append(a)
                print(root_line(a), file=out)
            else:
                print(f"fail {type(a).__name__}", file=out)
                print(f"center {c}: {type(a).__name__}: {a}", file=err)
    elif verb == "radii":
        if args.method == "coeff":
            bounds = coeff_radii_bounds(_need_poly(p, "radii --method coeff"))
        elif args.method == "dlg":
            bounds = dlg_sharpened_bounds(_need_poly(p, "radii --method dlg"), args.steps)
        elif args.method == "newton":
            bounds = (newton_smallest_bound(oracle, args.center),)
        else:
            bounds = (bisect_bounds(oracle, args.center, args.j, args.tol_bits,
                                    threads=args.threads),)
        for b in bounds:
            print(f"{b.target.value} {_g(b.lower)} {_g(b.upper)} {b.method.value}", file=out)
    elif verb == "powersums":
        if args.method == "newton":
            poly = _need_poly(p, "powersums --method newton")
            if args.h < 1:
                raise UsageError("--h must be >= 1 for the Newton-identity method")
            est = zero_power_sums(poly, args.h - 1)[-1]
            print(f"{est.h} {_g(est.value.real)} {_g(est.value.imag)} -", file=out)
        else:
            rot = args.rotation
            if rot is None:
                rot = 0.0 if args.seed is None else random_rotation(args.seed)
            q = args.q or choose_q(oracle.degree, args.theta, args.h, args.b0,
                                   args.disc.radius, q_cap=args.q_cap)
            if q <= args.h:
                raise UsageError("--q must exceed --h")
            params = CauchyParams(q, args.theta, args.disc.radius, rot, args.b0)
            est = cauchy_sum_disc(oracle, args.disc, args.h, params, args.threads)
            print(f"{est.h} {_g(est.value.real)} {_g(est.value.imag)} {_g(est.bound)}", file=out)
    elif verb == "count":
        print(root_count(oracle, args.disc, args.q, threads=args.threads), file=out)
    elif verb == "dlg":
        poly = _need_poly(p, "dlg")
        st = run_dlg(poly, args.steps, normalize=args.normalize)[-1]
        res = st.p.to_poly() if args.normalize else st.p
        out.write(formats.format_poly(res))
        if args.normalize:
            print(f"scale 2^{st.log2_scale}", file=err)

    if report:
        for i, a in enumerate(roots, 1):
            bound = "n/a" if a.error_bound is None else f"{a.error_bound:.3g}"
            print(f"  root {i}: {a.pipeline.value}, z = {a.z:.12g}, residual {a.residual:.3g}, "
                  f"bound {bound}, {a.eval_count} evaluations", file=err)
    print(f"{verb}: {len(roots) if roots else 'done'}; oracle evaluations: {oracle.eval_count}",
          file=err)
    return status


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads is None and os.environ.get("ROOTS_THREADS"):
            args.threads = _positive(os.environ["ROOTS_THREADS"])
        return _run(args, out, err)
    except (UsageError, ParseError, argparse.ArgumentTypeError) as e:
        print(f"usage error: {e}", file=err)
        return EXIT_USAGE
    except PowerRootsError as e:
        print(f"error: {type(e).__name__}: {e}", file=err)
        return EXIT_NUMERIC
