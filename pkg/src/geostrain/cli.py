"""Command-line interface.

Every command prints one JSON object (CSV for ``geodesic sample`` and
``rigid-field``) that echoes its inputs, seed, tolerances and the library
version. Exit codes: 0 success, 1 usage error, 2 domain error, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from . import tolerances as tol
from .errors import ConvergenceError, DimensionError, DomainError
from .field import FIELD_MODELS, parse_field, rigid_field, total_energy, write_field
from .geodesics import GeodesicSpec, geodesic_distance_estimate, geodesic_point, geodesic_velocity
from .linalg import mat_exp, mat_log_principal, polar_decompose, random_glp
from .metric import MetricParams, riemannian_metric_at
from .strain import (
    dist_euclid_sq_to_SO,
    geodesic_dist_sq_to_SO,
    lower_bound_scan,
    upper_bound_via_polar_geodesic,
    verify_theorem1,
)

SCHEMA = 1
EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_matrix(text):
    """Parse ``"a,b;c,d"`` into a square 2x2 or 3x3 array."""
    rows = [[float(v) for v in r.split(",")] for r in text.strip().split(";")]
    if len(rows) not in (2, 3) or any(len(r) != len(rows) for r in rows):
        raise ValueError(f"matrix literal {text!r} is not 2x2 or 3x3")
    return np.array(rows, dtype=float)


def _matrix_arg(text):
    try:
        return parse_matrix(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad matrix literal {text!r}: {exc}") from None


def _load_matrix(args, name):
    literal, path = getattr(args, name), getattr(args, f"{name}_file")
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return np.array(json.load(fh), dtype=float)
    if literal is None:
        raise DomainError(f"--{name.replace('_', '-')} or --{name.replace('_', '-')}-file is required")
    return literal


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _record(command, inputs, result, seed=None):
    return {
        "schema": SCHEMA,
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "seed": seed,
        "tolerances": tol.as_dict(),
        "result": result,
    }


def _emit(out, obj):
    out.write(json.dumps(_jsonable(obj), indent=2) + "\n")


def _metric(args):
    return MetricParams(args.mu, args.mu_c, args.kappa)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_polar(args, out):
    F = _load_matrix(args, "f")
    pf = polar_decompose(F)
    _emit(out, _record("polar", {"f": F}, {
        "R": pf.R, "U": pf.U, "iterations": pf.iterations, "method": pf.method,
        "cond": pf.cond, "ill_conditioned": pf.ill_conditioned,
    }))


def cmd_expm(args, out):
    F = _load_matrix(args, "f")
    _emit(out, _record("expm", {"f": F}, {"exp": mat_exp(F)}))


def cmd_logm(args, out):
    F = _load_matrix(args, "f")
    _emit(out, _record("logm", {"f": F}, {"log": mat_log_principal(F)}))


def cmd_dist(args, out):
    F = _load_matrix(args, "f")
    if args.kind == "euclid":
        pf = polar_decompose(F)
        result = {"dist_sq": dist_euclid_sq_to_SO(F), "nearest_rotation": pf.R}
        inputs = {"f": F}
    else:
        p = _metric(args)
        d = geodesic_dist_sq_to_SO(p, F)
        result = {"dist_sq": d.value, "nearest_rotation": d.rotation,
                  "pseudometric": d.pseudometric, "mu_c_used": d.mu_c_used}
        inputs = {"f": F, **p.as_dict()}
    _emit(out, _record(f"dist {args.kind}", inputs, result))


def cmd_geodesic(args, out):
    F = _load_matrix(args, "f")
    xi = _load_matrix(args, "xi")
    p = _metric(args)
    spec = GeodesicSpec(F, xi, p)
    if args.steps < 1:
        raise DomainError("--steps must be >= 1")
    n = spec.F.shape[0]
    echo = _record("geodesic sample", {"f": F, "xi": xi, **p.as_dict(), "steps": args.steps}, None)
    del echo["result"]
    out.write("# " + json.dumps(_jsonable(echo)) + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t"] + [f"g{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)] + ["speed"])
    for k in range(args.steps + 1):
        t = k / args.steps
        G = geodesic_point(spec, t)
        speed = math.sqrt(max(0.0, riemannian_metric_at(p, G, geodesic_velocity(spec, t), geodesic_velocity(spec, t))))
        w.writerow([repr(t)] + [repr(float(v)) for v in G.ravel()] + [repr(speed)])


def cmd_bounds(args, out):
    F = _load_matrix(args, "f")
    p = _metric(args)
    closed = geodesic_dist_sq_to_SO(p, F)
    lower = lower_bound_scan(p, F, args.samples, args.seed)
    upper = upper_bound_via_polar_geodesic(p, F)
    est = geodesic_distance_estimate(p, F, closed.rotation, args.starts, args.seed)
    _emit(out, _record("bounds", {"f": F, **p.as_dict(), "samples": args.samples, "starts": args.starts}, {
        "closed_form": closed.value,
        "lower_bound": lower.value,
        "lower_bound_rotation": lower.rotation,
        "skipped": lower.skipped,
        "upper_bound": upper.value,
        "polar_rotation": upper.rotation,
        "geodesic_estimate": est.value,
        "geodesic_estimate_sq": est.value**2,
        "geodesic_xi": est.xi,
        "converged_starts": len(est.candidates),
        "pseudometric": p.pseudometric,
    }, seed=args.seed))


def cmd_verify(args, out):
    rng = np.random.default_rng(args.seed)
    trials = []
    for t in range(args.trials):
        F = random_glp(args.n, rng, args.cond_max)
        rep = verify_theorem1(F, args.samples, seed=[args.seed, t])
        trials.append({
            "f": F, "q_best": rep.q_best, "min_value": rep.min_value,
            "closed_form": rep.closed_form, "gap": rep.gap, "angle_error": rep.angle_error,
            "skipped": rep.skipped,
        })
    gap_ok = all(tr["gap"] >= -1e-8 for tr in trials)
    _emit(out, _record("verify theorem1", {
        "n": args.n, "trials": args.trials, "samples": args.samples, "cond_max": args.cond_max,
    }, {
        "trials": trials,
        "max_gap": max((tr["gap"] for tr in trials), default=None),
        "min_gap": min((tr["gap"] for tr in trials), default=None),
        "max_angle_error": max((tr["angle_error"] for tr in trials), default=None),
        "gap_nonnegative": gap_ok,
    }, seed=args.seed))


def cmd_energy(args, out):
    with open(args.field, encoding="utf-8", newline="") as fh:
        data = parse_field(fh, linearized=args.model == "linearized")
    rep = total_energy(args.model, args.mu, args.kappa, data)
    _emit(out, _record("energy", {"field": args.field, "model": args.model, "mu": args.mu, "kappa": args.kappa}, {
        "total": rep.total,
        "cells": rep.cells,
        "skipped": rep.skipped + len(data.errors),
        "parse_errors": [{"line": ln, "message": msg} for ln, msg in data.errors],
        "per_cell": rep.per_cell,
    }))


def cmd_rigid_field(args, out):
    n = args.n
    M = args.matrix if args.matrix is not None else None
    b = np.array([float(v) for v in args.offset.split(",")]) if args.offset else None
    records = rigid_field(n, args.kind, M, b, args.cells)
    buf = io.StringIO()
    write_field(records, buf)
    out.write(buf.getvalue())


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_matrix(p, name, required=True, help="matrix literal 'a,b;c,d'"):
    flag = name.replace("_", "-")
    p.add_argument(f"--{flag}", dest=name, type=_matrix_arg, help=help)
    p.add_argument(f"--{flag}-file", dest=f"{name}_file", help="JSON file with nested arrays")


def _add_metric(p):
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--mu-c", dest="mu_c", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)


def build_parser():
    parser = _Parser(prog="geostrain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (("polar", cmd_polar), ("expm", cmd_expm), ("logm", cmd_logm)):
        sp = sub.add_parser(name)
        _add_matrix(sp, "f")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("dist")
    sp.add_argument("kind", choices=("euclid", "geod"))
    _add_matrix(sp, "f")
    _add_metric(sp)
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("geodesic")
    gsub = sp.add_subparsers(dest="action", required=True)
    sample = gsub.add_parser("sample")
    _add_matrix(sample, "f")
    _add_matrix(sample, "xi")
    _add_metric(sample)
    sample.add_argument("--steps", type=int, default=10)
    sample.set_defaults(func=cmd_geodesic)

    sp = sub.add_parser("bounds")
    _add_matrix(sp, "f")
    _add_metric(sp)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--starts", type=int, default=8)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("verify")
    vsub = sp.add_subparsers(dest="claim", required=True)
    th = vsub.add_parser("theorem1")
    th.add_argument("--n", type=int, choices=(2, 3), default=2)
    th.add_argument("--trials", type=int, default=10)
    th.add_argument("--samples", type=int, default=10_000)
    th.add_argument("--seed", type=int, default=0)
    th.add_argument("--cond-max", dest="cond_max", type=float, default=100.0)
    th.set_defaults(func=cmd_verify)

    sp = sub.add_parser("energy")
    sp.add_argument("--model", choices=FIELD_MODELS, required=True)
    sp.add_argument("--mu", type=float, default=1.0)
    sp.add_argument("--kappa", type=float, default=1.0)
    sp.add_argument("field", help="CSV field file")
    sp.set_defaults(func=cmd_energy)

    sp = sub.add_parser("rigid-field")
    sp.add_argument("--n", type=int, choices=(2, 3), default=2)
    sp.add_argument("--kind", choices=("rotation", "linearized"), default="rotation")
    sp.add_argument("--matrix", type=parse_matrix, help="rotation Q or skew W")
    sp.add_argument("--offset", help="translation 'b1,b2[,b3]'")
    sp.add_argument("--cells", type=int, default=4)
    sp.set_defaults(func=cmd_rigid_field)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except ConvergenceError as exc:
        print(f"geostrain: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DomainError, DimensionError, ValueError, OverflowError, OSError) as exc:
        print(f"geostrain: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
