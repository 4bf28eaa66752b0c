"""Command-line front door.

Subcommands evaluate densities, distribution functions, moments, transforms
and tail reports, simulate subordinator / hitting-time / subordinated paths,
run PDE residual checks, and emit the formula-verification report.  Every
command is deterministic given its flags and seed; outputs are written
atomically with fixed float formatting.

Exit codes: 0 success, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import BudgetExceeded, DomainError, NonConvergence, NumericalInstability
from .numerics import DEFAULT_SPEC, NumericSpec
from .hitting import (
    HittingDensityEval,
    hit_cdf,
    hit_lt_space,
    hit_lt_time,
    hit_llt,
    hit_mean,
    hit_moment,
    hit_pdf_table,
    hit_second_moment,
    hit_variance,
    invert_path,
    stable_hit_pdf,
    stable_hit_tail_report,
    tail_report,
)
from .subordinated import SubordinatedEval, sub_pdf_table, sub_sample_path
from .subordinators import (
    IGParams,
    IGSubordinator,
    StableSubordinator,
    TemperedStableSubordinator,
    simulate_path,
)
from .residuals import (
    GridBox,
    residual_frac_hitting,
    residual_frac_ig,
    residual_hitting_pde,
    residual_ig_pde,
    residual_pseudo_lt,
    residual_subordinated,
    residual_subordinated_frac,
    residual_ts_pde,
)
from .tables import write_csv, write_json, write_svg_lines
from .verification import run_verification

SPEC_PROFILES = {
    "default": DEFAULT_SPEC,
    "fast": NumericSpec(abs_tol=1e-8, rel_tol=1e-6, max_subdivisions=1000),
    "strict": NumericSpec(abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=16000),
}


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from exc
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text!r}")
    return value


def nonneg_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from exc
    if value < 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be nonnegative and finite, got {text!r}")
    return value


def grid_spec(text: str) -> np.ndarray:
    """Parse 'start:stop:step' into an inclusive uniform grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"non-numeric grid entry in {text!r}") from exc
    if step <= 0 or stop <= start:
        raise argparse.ArgumentTypeError("grid needs stop > start and step > 0")
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def float_list(text: str) -> list:
    try:
        return [float(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad numeric list {text!r}") from exc


def _spec_from(args) -> NumericSpec:
    profile = os.environ.get("IGHIT_PROFILE", "default")
    if profile not in SPEC_PROFILES:
        raise DomainError(f"IGHIT_PROFILE must be one of {sorted(SPEC_PROFILES)}")
    spec = SPEC_PROFILES[profile]
    overrides = {}
    for flag, name in (("abs_tol", "abs_tol"), ("rel_tol", "rel_tol"),
                       ("ilt_terms", "ilt_terms"), ("ilt_method", "ilt_method")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[name] = value
    return spec.with_(**overrides) if overrides else spec


def _params_from(args) -> IGParams:
    return IGParams(args.delta, args.gamma)


def _emit_table(args, columns: dict, meta: dict, default_name: str) -> str:
    out = args.out or default_name
    names = list(columns)
    if args.format == "csv":
        rows = zip(*columns.values())
        write_csv(out, names, rows)
    else:
        payload = {name: [float(v) for v in vals] for name, vals in columns.items()}
        payload["meta"] = meta
        write_json(out, payload)
    print(out)
    return out


def _add_common(p, with_params=True):
    if with_params:
        p.add_argument("--delta", type=positive_float, default=1.0,
                       help="barrier slope of the subordinator (> 0)")
        p.add_argument("--gamma", type=nonneg_float, default=1.0,
                       help="drift of the underlying Brownian motion (>= 0)")
    p.add_argument("--out", help="output path (command-specific default)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--abs-tol", dest="abs_tol", type=positive_float, default=None)
    p.add_argument("--rel-tol", dest="rel_tol", type=positive_float, default=None)
    p.add_argument("--ilt-terms", dest="ilt_terms", type=int, default=None)
    p.add_argument("--ilt-method", dest="ilt_method",
                   choices=("gaver_stehfest", "fixed_talbot"), default=None)


def cmd_density(args) -> int:
    params = _params_from(args)
    ev = HittingDensityEval(params, _spec_from(args), prefactor_mode=args.mode)
    xs = args.x
    dens = hit_pdf_table(xs, args.t, ev)
    meta = {"command": "density", "delta": params.delta, "gamma": params.gamma,
            "t": args.t, "mode": args.mode, "version": __version__}
    _emit_table(args, {"x": xs, "hitting_density": dens}, meta, "density." + args.format)
    return 0


def cmd_cdf(args) -> int:
    params = _params_from(args)
    xs = args.x
    vals = hit_cdf(xs, args.t, params)
    meta = {"command": "cdf", "delta": params.delta, "gamma": params.gamma,
            "t": args.t, "version": __version__}
    _emit_table(args, {"x": xs, "hitting_cdf": vals}, meta, "cdf." + args.format)
    return 0


def cmd_moments(args) -> int:
    params = _params_from(args)
    spec = _spec_from(args)
    rows_t, rows_q, rows_v, rows_m = [], [], [], []
    for t in args.t:
        for q in args.q:
            if q == 1.0:
                value, method = hit_mean(t, params), "closed_form"
            elif q == 2.0:
                value, method = hit_second_moment(t, params), "closed_form"
            else:
                value, method = hit_moment(q, t, params, spec), "laplace_inversion"
            rows_t.append(t)
            rows_q.append(q)
            rows_v.append(value)
            rows_m.append(method)
        if args.variance:
            rows_t.append(t)
            rows_q.append(-1.0)
            rows_v.append(hit_variance(t, params))
            rows_m.append("variance")
    meta = {"command": "moments", "delta": params.delta, "gamma": params.gamma,
            "version": __version__}
    _emit_table(args, {"t": rows_t, "q": rows_q, "moment": rows_v,
                       "method": rows_m}, meta, "moments." + args.format)
    return 0


def cmd_tail(args) -> int:
    params = _params_from(args)
    rep = tail_report(args.t, params, args.x)
    out = args.out or ("tail." + args.format)
    if args.format == "csv":
        rep.to_csv(out)
    else:
        rep.to_json(out)
    print(out)
    return 0


def cmd_lt(args) -> int:
    params = _params_from(args)
    spec = _spec_from(args)
    if args.which == "time":
        ss = args.s
        vals = [hit_lt_time(args.x, float(s), params) for s in ss]
        cols = {"s": ss, "lt_time": vals}
    elif args.which == "space":
        mus = args.mu
        vals = [hit_lt_space(float(m), args.t, params, spec) for m in mus]
        cols = {"mu": mus, "lt_space": vals}
    else:
        ss = args.s
        vals = [hit_llt(args.u, float(s), params) for s in ss]
        cols = {"s": ss, "llt": vals}
    meta = {"command": "lt", "which": args.which, "delta": params.delta,
            "gamma": params.gamma, "version": __version__}
    _emit_table(args, cols, meta, "lt." + args.format)
    return 0


def _model_from(args):
    if args.model == "ig":
        return IGSubordinator(_params_from(args))
    if args.model == "stable":
        return StableSubordinator(args.beta)
    return TemperedStableSubordinator(args.beta, args.mu)


def cmd_paths(args) -> int:
    model = _model_from(args)
    rng = np.random.default_rng(args.seed)
    horizon = args.T * max(args.gamma / args.delta, 1.0) * 2.0 if args.model == "ig" \
        else 2.0 * args.T
    horizon = max(horizon, 4.0 * args.dt)
    g_path = simulate_path(model, horizon, args.dt, rng)
    while g_path.values[-1] <= args.T:
        ext = simulate_path(model, horizon, args.dt, rng)
        g_path = type(g_path)(
            np.concatenate([g_path.times, g_path.times[-1] + ext.times[1:]]),
            np.concatenate([g_path.values, g_path.values[-1] + ext.values[1:]]))
    t_grid = args.dt * np.arange(int(round(args.T / args.dt)) + 1)
    h_path = invert_path(g_path, t_grid)
    base = args.out or "paths"
    g_file, h_file = base + "_g.csv", base + "_h.csv"
    g_path.to_csv(g_file)
    h_path.to_csv(h_file)
    print(g_file)
    print(h_file)
    if args.svg:
        svg_file = base + ".svg"
        keep = g_path.values <= 1.05 * float(h_path.times[-1]) + 4.0 * args.dt
        write_svg_lines(svg_file, [
            ("subordinator", g_path.times[keep], g_path.values[keep], "steps"),
            ("hitting time", h_path.times, h_path.values, "line"),
        ], title=f"delta={args.delta} gamma={args.gamma} seed={args.seed}")
        print(svg_file)
    return 0


def cmd_subordinated(args) -> int:
    params = _params_from(args)
    ev = SubordinatedEval(params, _spec_from(args))
    xs = args.x
    dens = sub_pdf_table(xs, args.t, ev)
    meta = {"command": "subordinated", "delta": params.delta,
            "gamma": params.gamma, "t": args.t, "version": __version__}
    _emit_table(args, {"x": xs, "subordinated_density": dens}, meta,
                "subordinated." + args.format)
    if args.with_path:
        rng = np.random.default_rng(args.seed)
        path = sub_sample_path(params, args.T, args.dt, rng)
        out = (args.out or "subordinated") + "_path.csv"
        path.to_csv(out)
        print(out)
    return 0


def cmd_stable(args) -> int:
    xs = args.x
    dens = stable_hit_pdf(xs, args.t, args.beta, _spec_from(args))
    meta = {"command": "stable", "beta": args.beta, "t": args.t,
            "version": __version__}
    _emit_table(args, {"x": xs, "stable_hitting_density": dens}, meta,
                "stable." + args.format)
    if args.tail is not None:
        rep = stable_hit_tail_report(args.t, args.beta, args.tail)
        out = (args.out or "stable") + "_tail.json"
        rep.to_json(out)
        print(out)
    return 0


_PDE_DEFAULTS = {
    "hitting": GridBox(0.4, 1.6, 0.5, 1.5, 1 / 32, 1 / 32),
    "ig": GridBox(0.5, 2.5, 0.5, 1.5, 1 / 32, 1 / 32),
    "ts2": GridBox(0.4, 1.0, 0.7, 1.1, 1 / 16, 1 / 16),
    "ts3": GridBox(0.5, 1.0, 0.6, 1.0, 1 / 8, 1 / 8),
    "subordinated": GridBox(0.3, 1.5, 0.5, 1.0, 1 / 24, 1 / 24),
    "frac-hitting": GridBox(0.25, 1.5, 0.3, 1.0, 1 / 256, 1 / 64),
    "frac-ig": GridBox(0.3, 1.5, 0.5, 1.0, 1 / 64, 1 / 256),
    "frac-subordinated": GridBox(0.25, 1.25, 0.3, 0.75, 1 / 128, 1 / 64),
}


def cmd_pde_check(args) -> int:
    params = _params_from(args)
    spec = _spec_from(args)
    box = _PDE_DEFAULTS.get(args.pde)
    if box is not None and args.dx is not None:
        box = GridBox(box.x0, box.x1, box.t0, box.t1, args.dx, args.dt or args.dx)
    refine = args.refine
    if args.pde == "hitting":
        rep = residual_hitting_pde(params, box, spec, mode=args.mode, refine=refine)
    elif args.pde == "ig":
        rep = residual_ig_pde(params, box, spec, refine=refine)
    elif args.pde == "ts2":
        rep = residual_ts_pde(2, args.mu, box, spec, refine=refine)
    elif args.pde == "ts3":
        rep = residual_ts_pde(3, args.mu, box, spec, sign=args.sign, refine=refine)
    elif args.pde == "subordinated":
        rep = residual_subordinated(params, box, spec, refine=refine)
    elif args.pde == "frac-hitting":
        rep = residual_frac_hitting(box, spec, refine=refine)
    elif args.pde == "frac-ig":
        rep = residual_frac_ig(box, spec, refine=refine)
    elif args.pde == "frac-subordinated":
        rep = residual_subordinated_frac(box, spec, refine=refine)
    else:
        rep = residual_pseudo_lt(params, [0.5, 1.0, 2.0], [0.3, 0.7, 1.1],
                                 spec, source=args.source)
    out = args.out or f"pde_{args.pde.replace('-', '_')}.json"
    rep.to_json(out)
    if args.residual_csv:
        rep.to_csv(args.residual_csv)
    print(out)
    print(f"max_rel={rep.norms['max_rel']:.6e} ratio={rep.refinement_ratio:.4f}")
    return 0


def cmd_verify(args) -> int:
    report = run_verification(only=args.only, seed=args.seed)
    out = args.out or "verification.json"
    report.to_json(out)
    for line in report.summary_lines():
        print(line)
    print(out)
    if any("error" in r.values for r in report.records):
        return 3
    return 0 if report.ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ighit",
        description="Inverse Gaussian subordinator hitting times: densities, "
                    "transforms, moments, paths, PDE residual checks, and a "
                    "formula verification report.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("density", help="hitting-time density on an x grid")
    _add_common(p)
    p.add_argument("--t", type=positive_float, required=True)
    p.add_argument("--x", type=grid_spec, default=grid_spec("0:3:0.1"))
    p.add_argument("--mode", choices=("corrected", "literal"), default="corrected")
    p.set_defaults(func=cmd_density)

    p = subs.add_parser("cdf", help="hitting-time distribution function")
    _add_common(p)
    p.add_argument("--t", type=positive_float, required=True)
    p.add_argument("--x", type=grid_spec, default=grid_spec("0:3:0.1"))
    p.set_defaults(func=cmd_cdf)

    p = subs.add_parser("moments", help="moments of the hitting time")
    _add_common(p)
    p.add_argument("--t", type=float_list, default=[1.0])
    p.add_argument("--q", type=float_list, default=[1.0, 2.0])
    p.add_argument("--variance", action="store_true")
    p.set_defaults(func=cmd_moments)

    p = subs.add_parser("tail", help="survival values against the tail envelope")
    _add_common(p)
    p.add_argument("--t", type=positive_float, required=True)
    p.add_argument("--x", type=grid_spec, default=grid_spec("2:8:0.25"))
    p.set_defaults(func=cmd_tail)

    p = subs.add_parser("lt", help="Laplace transforms of the density")
    _add_common(p)
    p.add_argument("--which", choices=("time", "space", "llt"), default="time")
    p.add_argument("--x", type=nonneg_float, default=0.7)
    p.add_argument("--t", type=positive_float, default=1.0)
    p.add_argument("--u", type=positive_float, default=1.0)
    p.add_argument("--s", type=float_list, default=[0.5, 1.0, 2.0])
    p.add_argument("--mu", type=float_list, default=[1.0, 2.0])
    p.set_defaults(func=cmd_lt)

    p = subs.add_parser("paths", help="simulate a subordinator path and its inverse")
    _add_common(p)
    p.add_argument("--T", type=positive_float, default=5.0,
                   help="time horizon of the inverse process")
    p.add_argument("--dt", type=positive_float, default=0.001)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=("ig", "stable", "ts"), default="ig")
    p.add_argument("--beta", type=positive_float, default=0.5)
    p.add_argument("--mu", type=nonneg_float, default=1.0)
    p.add_argument("--svg", action="store_true", help="also write an SVG plot")
    p.set_defaults(func=cmd_paths)

    p = subs.add_parser("subordinated", help="density (and path) of Brownian "
                                             "motion on the hitting-time clock")
    _add_common(p)
    p.add_argument("--t", type=positive_float, default=1.0)
    p.add_argument("--x", type=grid_spec, default=grid_spec("-4:4:0.1"))
    p.add_argument("--with-path", dest="with_path", action="store_true")
    p.add_argument("--T", type=positive_float, default=1.0)
    p.add_argument("--dt", type=positive_float, default=1 / 256)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_subordinated)

    p = subs.add_parser("stable", help="stable hitting-time density and tail")
    _add_common(p, with_params=False)
    p.add_argument("--beta", type=positive_float, default=0.5)
    p.add_argument("--t", type=positive_float, default=1.0)
    p.add_argument("--x", type=grid_spec, default=grid_spec("0.05:4:0.05"))
    p.add_argument("--tail", type=grid_spec, default=None,
                   help="x grid for a tail report (e.g. 8:16:0.5)")
    p.set_defaults(func=cmd_stable)

    p = subs.add_parser("pde-check", help="finite-difference residual of a "
                                          "differential identity")
    _add_common(p)
    p.add_argument("--pde", choices=sorted(list(_PDE_DEFAULTS) + ["pseudo-lt"]),
                   required=True)
    p.add_argument("--refine", type=int, default=2)
    p.add_argument("--mu", type=nonneg_float, default=1.0)
    p.add_argument("--mode", choices=("corrected", "literal"), default="corrected")
    p.add_argument("--sign", choices=("as_printed", "flipped"), default="as_printed")
    p.add_argument("--source", choices=("closed", "numeric"), default="closed")
    p.add_argument("--dx", type=positive_float, default=None)
    p.add_argument("--dt", type=positive_float, default=None)
    p.add_argument("--residual-csv", dest="residual_csv", default=None)
    p.set_defaults(func=cmd_pde_check)

    p = subs.add_parser("verify", help="run the formula verification battery")
    _add_common(p, with_params=False)
    p.add_argument("--only", default=None,
                   help="run only records whose id contains this substring")
    p.add_argument("--seed", type=int, default=20260808)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"ighit: invalid arguments: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, NumericalInstability, BudgetExceeded) as exc:
        print(f"ighit: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
