"""Command-line entry point: match, bound, experiment, fit, series."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import experiments as ex
from .fourier import prop2_bound
from .geometry import FrameError
from .lower_bounds import c_series, e_series
from .measures import read_points_csv
from .series import s_d_series, t1_series, t_d_series
from .transport import MAX_DENSE_N, w1_1d, w1_exact

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2))


def _load_pair(args):
    mu, nu = read_points_csv(args.x), read_points_csv(args.y)
    if mu.dim != nu.dim:
        raise ValueError(f"dimension mismatch ({mu.dim} vs {nu.dim})")
    return mu, nu


def cmd_match(args) -> int:
    mu, nu = _load_pair(args)
    if mu.n != nu.n:
        raise ValueError(f"point counts differ ({mu.n} vs {nu.n})")
    # values are computed in unit-cube units and rescaled for --frame half_torus
    to_frame = math.pi if args.frame == "half_torus" else 1.0
    out = {"n": mu.n, "d": mu.dim, "metric": args.metric, "frame": args.frame}
    if mu.dim == 1 and mu.n > MAX_DENSE_N:
        out["value"] = w1_1d(mu.points[:, 0], nu.points[:, 0]) * to_frame
    else:
        if args.metric == "torus":
            res = w1_exact(mu.to_half_torus(), nu.to_half_torus(), "torus")
            value = res.value / math.pi
        else:
            res = w1_exact(mu, nu, "euclidean")
            value = res.value
        out["value"] = value * to_frame
        if args.permutation:
            out["permutation"] = [int(i) for i in res.permutation]
    _dump(out)
    return EXIT_OK


def cmd_bound(args) -> int:
    mu, nu = _load_pair(args)
    t = 1.0 / (2 * max(mu.n, nu.n)) if args.t == "auto" else float(args.t)
    m_max = args.mmax if args.mmax == "auto" else int(args.mmax)
    rep = prop2_bound(mu.to_half_torus(), nu.to_half_torus(), t, m_max)
    out = rep.as_dict()
    out["frame"] = "half_torus"
    out["unit_cube_total"] = rep.total / math.pi
    _dump(out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    try:
        cfg = ex.ExperimentConfig.from_json_file(args.config)
    except ex.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        records, rows = ex.run_experiment(cfg, jobs=args.jobs)
    except ex.InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    fit = ex.fit_rate(rows, args.fit) if len(rows) >= 3 and args.fit != "none" else None
    for path in ex.emit_results(records, rows, fit, args.format, args.out, cfg):
        logging.info("wrote %s", path)
    for r in rows:
        print(f"n={r.n:<7d} mean={r.mean:.6g} se={r.stderr:.3g} paper_bound={r.paper_bound:.6g} "
              f"{'ok' if r.passed else 'EXCEEDED'}")
    return EXIT_OK


def cmd_fit(args) -> int:
    pts = ex.read_aggregates_csv(args.inp)
    fit = ex.fit_rate(pts, args.model, beta=args.beta)
    _dump({k: ex._json_val(v) for k, v in fit.__dict__.items()})
    return EXIT_OK


def cmd_series(args) -> int:
    fn = args.fn
    if fn in ("c", "e") and args.n is None:
        raise ValueError(f"series {fn} needs --n")
    if fn == "t1":
        sv = t1_series(args.t)
    elif fn == "td":
        sv = t_d_series(args.t, args.d)
    elif fn == "sd":
        sv = s_d_series(args.t, args.d)
    elif fn == "c":
        sv = c_series(args.n, args.t, args.d)
    else:
        sv = e_series(args.n, args.t, args.d)
    _dump({"fn": fn, "d": args.d, "t": args.t, "n": args.n, "value": sv.value, "error": sv.error,
           "reference_bound": sv.reference_bound})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aktfourier", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("match", help="exact W1 between two point CSVs")
    m.add_argument("--x", required=True)
    m.add_argument("--y", required=True)
    m.add_argument("--metric", choices=["euclidean", "torus"], default="euclidean")
    m.add_argument("--frame", choices=["unit", "half_torus"], default="unit",
                   help="frame the value is reported in (inputs are always unit-cube)")
    m.add_argument("--permutation", action="store_true", help="also print the optimal permutation")
    m.set_defaults(func=cmd_match)

    b = sub.add_parser("bound", help="smoothed Fourier upper bound on W1")
    b.add_argument("--x", required=True)
    b.add_argument("--y", required=True)
    b.add_argument("--t", default="auto", help="smoothing time, or 'auto' for 1/(2n)")
    b.add_argument("--mmax", default="auto", help="truncation radius, or 'auto'")
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("experiment", help="run a Monte Carlo experiment from a JSON config")
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--format", choices=["csv", "json"], default="csv")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--fit", choices=["power", "sqrtlog", "none"], default="power")
    e.set_defaults(func=cmd_experiment)

    f = sub.add_parser("fit", help="fit a rate model to an aggregate (or trials) CSV")
    f.add_argument("--in", dest="inp", required=True)
    f.add_argument("--model", choices=["power", "sqrtlog"], default="power")
    f.add_argument("--beta", type=float, default=None, help="fix the power-law exponent")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("series", help="evaluate a lattice series with its error bound")
    s.add_argument("--fn", choices=["t1", "td", "sd", "c", "e"], required=True)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--n", type=int, default=None)
    s.set_defaults(func=cmd_series)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, FrameError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
