"""Command-line surface: synthetic sampling, single-sample estimation,
Monte Carlo campaigns, roughness maps, and the special-function self-check.

Exit codes: 0 success, 1 domain/validation error, 2 I/O error. Estimation
failures on `estimate` are payload content, not process errors."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import harness, model, raster, specfun
from .estimators import EstimatorKind, estimate_alpha


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="g0lcum", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample",
                       help="draw a synthetic sample and write it as CSV")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--looks", type=float, required=True)
    p.add_argument("--model", required=True, choices=["intensity", "amplitude"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--gamma", type=float, default=None,
                   help="scale; defaults to the unit-mean convention")
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate",
                       help="estimate roughness/scale from a sample CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--looks", type=float, required=True)
    p.add_argument("--model", required=True, choices=["intensity", "amplitude"])
    p.add_argument("--estimator", required=True,
                   choices=[k.value for k in EstimatorKind])

    p = sub.add_parser("mc",
                       help="run a Monte Carlo campaign from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", required=True, choices=["csv", "json"])
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("map",
                       help="sliding-window roughness map over a raster")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", required=True, choices=["pgm", "rawf32", "csv"])
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--looks", type=float, required=True)
    p.add_argument("--model", required=True, choices=["intensity", "amplitude"])
    p.add_argument("--estimator", required=True,
                   choices=[k.value for k in EstimatorKind])
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    sub.add_parser("specfun-check",
                   help="run the special-function oracle suites")
    return parser


def _cmd_sample(args) -> int:
    gamma = args.gamma
    if gamma is None:
        gamma = model.unit_mean_gamma(args.alpha)
    params = model.G0Params(alpha=args.alpha, gamma=gamma, looks=args.looks)
    kind = model.ModelKind.parse(args.model)
    sample = model.sample_g0(params, kind, args.n, args.seed)
    model.write_sample_csv(sample, args.out)
    return 0


def _cmd_estimate(args) -> int:
    kind = model.ModelKind.parse(args.model)
    sample = model.read_sample_csv(args.infile, kind)
    res = estimate_alpha(sample, args.looks, kind, EstimatorKind.parse(args.estimator))
    payload = {
        "alpha_hat": res.alpha_hat,
        "gamma_hat": res.gamma_hat,
        "status": res.status.value,
        "failure": None if res.failure is None else res.failure.value,
        "elapsed_ns": res.elapsed_ns,
        "k1": res.cumulants.k1,
        "k2": res.cumulants.k2,
        "eta_hat": res.eta.eta_hat,
        "eta_m": res.eta.eta_m,
    }
    print(json.dumps(payload))
    return 0


def _cmd_mc(args) -> int:
    with open(args.config) as fh:
        text = fh.read()
    try:
        cfg = harness.MCConfig.from_json(text)
    except json.JSONDecodeError as exc:
        raise RuntimeError(f"{args.config}: invalid JSON ({exc})") from None
    report = harness.run_campaign(cfg, parallelism=args.threads)
    harness.write_report(report, args.out, args.format)
    return 0


def _cmd_map(args) -> int:
    kind = model.ModelKind.parse(args.model)
    rast = raster.read_raster(args.infile, args.format, kind, args.looks)
    est = EstimatorKind.parse(args.estimator)
    rmap = raster.roughness_map(rast, args.window, est, parallelism=args.threads)
    out_fmt = "pgm" if str(args.out).endswith(".pgm") else "csv"
    raster.write_map(rmap, args.out, out_fmt)
    print(f"wrote {out_fmt} map {rmap.width}x{rmap.height}, "
          f"{rmap.n_failures} failures, {rmap.elapsed_ns} ns", file=sys.stderr)
    return 0


def _cmd_specfun_check(args) -> int:
    xs = np.logspace(np.log10(0.5), 2.0, 200)
    tri = max(abs(specfun.trigamma(x) - specfun.trigamma_series_oracle(x))
              / specfun.trigamma_series_oracle(x) for x in xs)
    dig = max(abs(specfun.digamma(x) - specfun.digamma_series_oracle(x))
              / max(1e-9, abs(specfun.digamma_series_oracle(x))) for x in xs)
    us = (0.01, 0.1, 0.5, 0.9, 0.99)
    dof = ((2.0, 4.0), (1.0, 6.0), (16.0, 3.0))
    rt = max(abs(specfun.f_cdf(specfun.f_quantile(u, d1, d2), d1, d2) - u)
             for u in us for d1, d2 in dof)
    print(f"trigamma vs series oracle: max rel err {tri:.3e}")
    print(f"digamma vs series oracle:  max rel err {dig:.3e}")
    print(f"F quantile round trip:     max abs err {rt:.3e}")
    ok = tri <= 1e-12 and dig <= 1e-12 and rt <= 1e-9
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sample": _cmd_sample,
        "estimate": _cmd_estimate,
        "mc": _cmd_mc,
        "map": _cmd_map,
        "specfun-check": _cmd_specfun_check,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, model.MomentUndefinedError) as exc:
        print(f"g0lcum: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, RuntimeError, raster.RasterFormatError) as exc:
        print(f"g0lcum: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
