"""Command-line front end.

Subcommands::

    betavol closed    --what affine-moment --dist ball --beta 1 --N 2 --q 1
    betavol estimate  --mode affine-square --dist ball --beta 1 --N 2 --q 1
    betavol verify    --check bp-linear --beta 1 --n 2 --N 1 --alpha 1 --json
    betavol lyapunov  --beta 1 --N 2 --t 10000 --reps 50
    betavol suite     --seed 42

Exit status: 0 on success, 1 if any verification failed, 2 on usage or
domain errors.  The default seed may come from ``BETAVOL_SEED``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import closedform as cf
from .mcverify import (
    SuiteConfig,
    estimate_moment,
    run_suite,
    summary,
    verify_bp_linear,
    verify_corollary3,
    verify_intrinsic_volume,
    verify_lyapunov,
    verify_moment,
    verify_pair_distance,
)
from .mcverify.harness import VerificationReport
from .query import Mode, MomentQuery
from .samplers import RngStream

CSV_HEADER = ["check", "beta", "n", "N", "dist", "exponent", "closed_form", "mc_mean",
              "mc_stderr", "samples", "z", "pass", "seed"]

CLOSED_FORMS = [
    "sphere-area", "ball-volume", "stiefel-volume", "grassmann-volume", "linear-moment",
    "linear-ratio", "affine-moment", "affine-ratio", "pair-distance", "kingman", "kingman-binomial",
    "efron", "intrinsic-volume", "mean-log-det",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_seed() -> int:
    raw = os.environ.get("BETAVOL_SEED")
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"BETAVOL_SEED must be an integer, got {raw!r}") from None


def _add_common(p: argparse.ArgumentParser, mc: bool = True) -> None:
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--format", choices=["plain", "json", "csv"], default="plain")
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.add_argument("--paper-form-36prime", action="store_true",
                   help="use the printed sphere Euler-beta argument")
    p.add_argument("--paper-form-cor310", action="store_true",
                   help="use the plain ratio for ball/sphere affine ratios")
    p.add_argument("--kingman-binomial-diagnostic", action="store_true")
    if mc:
        p.add_argument("--samples", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--streams", type=int, default=1, help="stream partition count")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--z-max", type=float, default=4.0)


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--n", type=int, default=None, help="ambient dimension")
    p.add_argument("--N", type=int, default=1, help="inner dimension")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--dist", choices=["ball", "sphere", "gauss"], default="gauss")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="betavol", allow_abbrev=False,
                     description="Determinant moments over R, C, H: closed forms and Monte Carlo checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("closed", allow_abbrev=False, help="evaluate a closed form")
    p.add_argument("--what", choices=CLOSED_FORMS, required=True)
    _add_params(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--l", type=float, default=None)
    _add_common(p, mc=False)

    p = sub.add_parser("estimate", allow_abbrev=False, help="Monte Carlo estimate of a moment")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.LINEAR_SQUARE.value)
    _add_params(p)
    _add_common(p)

    p = sub.add_parser("verify", allow_abbrev=False, help="compare an estimate with its closed form")
    p.add_argument("--check", required=True, choices=[
        "moment", "corollary3", "bp-linear", "intrinsic-volume", "pair-distance"])
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.LINEAR_SQUARE.value)
    _add_params(p)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--k", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("lyapunov", allow_abbrev=False, help="Lyapunov sum from a QR product chain")
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--t", type=int, default=10_000)
    p.add_argument("--reps", type=int, default=50)
    _add_common(p)

    p = sub.add_parser("suite", allow_abbrev=False, help="run the registered check grid")
    _add_common(p)
    return parser


def _need(value, name):
    if value is None:
        raise UsageError(f"--{name} is required here")
    return value


def _exponent(args):
    value = args.q if args.q is not None else args.h
    return _need(value, "q/--h")


def _query(args) -> MomentQuery:
    mode = Mode(args.mode)
    n = args.N if mode.square else _need(args.n, "n")
    return MomentQuery(args.dist, args.beta, n, args.N, _exponent(args), mode)


def _closed(args) -> float:
    w, b, N = args.what, args.beta, args.N
    if w == "sphere-area":
        return cf.sphere_area(_need(args.l, "l"))
    if w == "ball-volume":
        return cf.ball_volume(_need(args.k, "k"))
    if w == "stiefel-volume":
        return cf.stiefel_volume(b, _need(args.n, "n"), N)
    if w == "grassmann-volume":
        return cf.grassmann_volume(b, _need(args.n, "n"), N)
    if w == "linear-moment":
        return cf.linear_moment(args.dist, b, N, _exponent(args))
    if w == "linear-ratio":
        return cf.linear_ratio(args.dist, b, _need(args.n, "n"), N, _exponent(args))
    if w == "affine-moment":
        return cf.affine_moment(args.dist, b, N, _exponent(args),
                                printed_form=args.paper_form_36prime and args.dist == "sphere")
    if w == "affine-ratio":
        q = MomentQuery(args.dist, b, _need(args.n, "n"), N, _exponent(args), Mode.AFFINE_RECT)
        return cf.closed_form(q, printed_36prime=args.paper_form_36prime,
                              printed_cor310=args.paper_form_cor310)
    if w == "pair-distance":
        return cf.pair_distance_moment(b, _need(args.n, "n"), _exponent(args))
    if w == "kingman":
        return cf.kingman_q_beta(b, N)
    if w == "kingman-binomial":
        if not args.kingman_binomial_diagnostic:
            raise UsageError("kingman-binomial needs --kingman-binomial-diagnostic")
        return cf.kingman_binomial(N)
    if w == "efron":
        return cf.efron_value(b, N)
    if w == "intrinsic-volume":
        return cf.intrinsic_volume_mean(N, _need(args.k, "k"))
    return cf.mean_log_abs_det(args.dist, b, N)


def _csv_row(r: VerificationReport) -> list:
    p = r.params
    exponent = next((p[k] for k in ("exponent", "s", "alpha", "h") if k in p), "")
    return [r.check, p.get("beta", ""), p.get("n", ""), p.get("N", ""), p.get("dist", ""),
            exponent, repr(r.closed_form), repr(r.estimate.mean), repr(r.estimate.stderr),
            r.estimate.count, repr(r.z), str(r.passed).lower(), r.estimate.seed]


def _plain(r: VerificationReport) -> str:
    params = " ".join(f"{k}={v}" for k, v in r.params.items())
    return (f"{r.status.upper():8s} {r.check:18s} {params}  closed={r.closed_form:.10g} "
            f"mc={r.estimate.mean:.10g}+-{r.estimate.stderr:.3g} z={r.z:+.3f}")


def emit_reports(reports: list[VerificationReport], fmt: str, out, single: bool = False) -> None:
    if fmt == "json":
        payload = reports[0].to_dict() if single else [r.to_dict() for r in reports]
        out.write(json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerow(_csv_row(r))
        out.write(buf.getvalue())
    else:
        for r in reports:
            out.write(_plain(r) + "\n")
        if not single:
            s = summary(reports)
            out.write(f"{s['pass']} passed, {s['fail']} failed, {s['unstable']} unstable "
                      f"of {s['total']}\n")


def _run(args, out) -> int:
    if args.command == "closed":
        value = _closed(args)
        if args.format == "json":
            params = {k: v for k, v in vars(args).items()
                      if k not in ("command", "format") and v not in (None, False)}
            out.write(json.dumps({"what": args.what, "params": params, "value": value}) + "\n")
        elif args.format == "csv":
            out.write(f"what,value\n{args.what},{value!r}\n")
        else:
            out.write(f"{value:.15g}\n")
        return 0

    seed = args.seed if args.seed is not None else _default_seed()
    if args.streams < 1 or args.workers < 1:
        raise UsageError("--streams and --workers must be >= 1")
    mc = dict(streams=args.streams, workers=args.workers)
    rng = RngStream(seed)

    if args.command == "estimate":
        est = estimate_moment(_query(args), args.samples, rng, **mc)
        if args.format == "json":
            out.write(json.dumps({"mean": est.mean, "stderr": est.stderr, "count": est.count,
                                  "seed": est.seed, "streams": est.streams,
                                  "workers": args.workers}) + "\n")
        elif args.format == "csv":
            out.write(f"mean,stderr,count,seed,streams\n{est.mean!r},{est.stderr!r},"
                      f"{est.count},{est.seed},{est.streams}\n")
        else:
            out.write(f"{est.mean:.10g} +- {est.stderr:.3g} (n={est.count}, seed={est.seed})\n")
        return 0

    if args.command == "suite":
        cfg = SuiteConfig(seed=seed, z_max=args.z_max, samples=args.samples,
                          printed_36prime=args.paper_form_36prime,
                          printed_cor310=args.paper_form_cor310, **mc)
        reports = run_suite(cfg)
        emit_reports(reports, args.format, out)
        return 1 if summary(reports)["fail"] else 0

    kw = dict(z_max=args.z_max, **mc)
    if args.command == "lyapunov":
        rep = verify_lyapunov(args.beta, args.N, args.t, args.reps, rng, **kw)
    elif args.check == "moment":
        rep = verify_moment(_query(args), args.samples, rng, printed_36prime=args.paper_form_36prime,
                            printed_cor310=args.paper_form_cor310, **kw)
    elif args.check == "corollary3":
        rep = verify_corollary3(args.beta, _need(args.n, "n"), args.N, args.s, args.samples, rng, **kw)
    elif args.check == "bp-linear":
        rep = verify_bp_linear(args.beta, _need(args.n, "n"), args.N, args.alpha, args.samples, rng, **kw)
    elif args.check == "intrinsic-volume":
        rep = verify_intrinsic_volume(_need(args.n, "n"), _need(args.k, "k"), args.samples, rng, **kw)
    else:
        rep = verify_pair_distance(args.beta, _need(args.n, "n"), _exponent(args), args.samples, rng, **kw)
    emit_reports([rep], args.format, out, single=True)
    return 0 if rep.status == "pass" else 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _run(args, sys.stdout)
    except (UsageError, ValueError, ArithmeticError) as err:
        msg = str(err).splitlines()[0] if str(err) else type(err).__name__
        print(f"betavol: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
