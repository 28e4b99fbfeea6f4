"""Command-line front end: ``siegel-lab <command> [--flags]``.

Exit status: 0 on success, 1 when a computation or check fails, 2 for bad input.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import blaschke as bl
from . import cfrac, hypgeo as hg, linearize as lz, siegel as sg
from .circlegeo import ArcSegment, QuadArcConfig, cross_ratio_config
from .config import COMMANDS, RunConfig, load_config, parse_product
from .errors import ConfigError, DegenerateArc, NotIrrationalAtPrecision, NotProperlyContained, SiegelLabError
from .report import write_csv
from .verify import run_suite


def _floats(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="siegel-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_, *flags):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="flat JSON file with run settings; flags override it")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        for flag in flags:
            flag(p)
        return p

    theta = lambda p: p.add_argument("--theta", help="golden, silver, cf:1,2,3, periodic:1,2, or a number/expression")
    product = lambda p: p.add_argument("--product", help="douady-ghys, a JSON object, or a JSON file")
    n_iter = lambda p: p.add_argument("--n-iter", dest="n_iter", type=int)
    tol = lambda p: p.add_argument("--tol", type=float)
    big_n = lambda p: p.add_argument("--N", dest="N", type=int, help="orbit atoms / table size")
    levels = lambda p: p.add_argument("--n-levels", dest="n_levels", type=_ints)
    seed = lambda p: p.add_argument("--seed", type=int)
    terms = lambda p: p.add_argument("--terms", type=int, help="series truncation")

    add("cfrac", "convergents and closest returns", theta, lambda p: p.add_argument("--depth", type=int))
    add("rotnum", "rotation number estimate", product, n_iter,
        lambda p: p.add_argument("--t", type=float, help="extra rotation e^{2 pi i t}"),
        lambda p: p.add_argument("--x0", type=float))
    add("tune", "tune e^{2 pi i t} B to a rotation number", product, theta, tol, n_iter)
    add("center", "conjugate to the centered product", product, theta, tol, n_iter, big_n)
    add("qs-estimate", "quasisymmetry constant of the linearizing map", product, theta, tol, n_iter, big_n)
    add("swiatek-scan", "pullback cross-ratio and core-length scan", product, theta, tol, n_iter, levels)
    add("df-ratios", "neighbouring closest-return arc ratios", product, theta, tol, n_iter, levels,
        lambda p: p.add_argument("--grid", type=int))
    add("geodesic", "core geodesic of nested arcs", lambda p: p.add_argument("--I", dest="I", type=_floats),
        lambda p: p.add_argument("--J", dest="J", type=_floats))
    add("siegel-render", "invariant curve of the quadratic Siegel disk", theta, terms,
        lambda p: p.add_argument("--r", type=float, help="radius as a fraction of the conformal radius"),
        lambda p: p.add_argument("--samples", type=int),
        lambda p: p.add_argument("--ppm", help="PPM raster path"))
    add("siegel-qc", "cross-ratio quasicircle diagnostic", theta, terms, seed,
        lambda p: p.add_argument("--r-grid", dest="r_grid", type=_floats),
        lambda p: p.add_argument("--tuples", type=int))
    add("verify", "run the invariant suite", seed, lambda p: p.add_argument("--suite"))
    return ap


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data = load_config(args.config) if getattr(args, "config", None) else {}
    data = dict(data)
    data["command"] = args.command
    for k, v in vars(args).items():
        if k in ("config", "command") or v is None:
            continue
        data[k] = v
    return RunConfig.from_dict(data)


def _tuned(cfg: RunConfig):
    theta = cfrac.parse_theta(cfg.theta)
    res = bl.tune_to_rotation(parse_product(cfg.product), theta, cfg.tol, cfg.n_iter)
    return theta, res


def cmd_cfrac(cfg):
    rot = cfrac.parse_theta(cfg.theta)
    rows = cfrac.convergents_and_returns(rot, cfg.depth - 1)
    write_csv(cfg.out, ["n", "p_n", "q_n", "closest_return"], rows)


def cmd_rotnum(cfg):
    L = bl.CircleLift(parse_product(cfg.product)).shifted(cfg.t)
    rho = bl.rotation_number(L, cfg.n_iter, cfg.x0)
    write_csv(cfg.out, ["rho_hat", "n_iter", "error_bound"], [(rho, cfg.n_iter, 1.0 / cfg.n_iter)])


def cmd_tune(cfg):
    theta, res = _tuned(cfg)
    write_csv(cfg.out, ["t", "rho_hat", "error_bound", "steps", "product"],
              [(res.t, res.rho_hat, res.error_bound, res.iterations, res.B.to_json())])


def cmd_center(cfg):
    theta, res = _tuned(cfg)
    c = lz.center(res.B, cfg.N)
    write_csv(cfg.out, ["z_B_re", "z_B_im", "moment_abs", "product"],
              [(c.z_B.real, c.z_B.imag, abs(c.moment), c.B.to_json())])


def cmd_qs(cfg):
    theta, res = _tuned(cfg)
    tab = lz.linearization_table(bl.CircleLift(res.B), theta.value, cfg.N)
    write_csv(cfg.out, ["N", "M_hat", "max_target_gap"], [(cfg.N, lz.qs_constant(tab), tab.max_gap)])


def cmd_swiatek(cfg):
    theta, res = _tuned(cfg)
    L = bl.CircleLift(res.B)
    rows = []
    for n in cfg.n_levels:
        scan = lz.swiatek_scan(L, theta, n)
        for rec in scan.records:
            rows.append((n,) + rec + (scan.max_length_ratio, scan.max_cross_ratio, scan.shadow_steps, scan.shadow_bound))
    header = ["n", "k", "I_start", "I_end", "J_start", "J_end", "C", "T", "length",
              "max_length_ratio", "max_cross_ratio", "shadow_steps", "shadow_bound"]
    write_csv(cfg.out, header, rows)


def cmd_df(cfg):
    theta, res = _tuned(cfg)
    xs = np.arange(cfg.grid) / cfg.grid
    rows = [(d.n, d.cp1_min, d.cp1_max, d.cp2_min, d.cp2_max, d.J)
            for d in lz.df_ratios(bl.CircleLift(res.B), theta, cfg.n_levels, xs)]
    write_csv(cfg.out, ["n", "cp1_min", "cp1_max", "cp2_min", "cp2_max", "J_hat"], rows)


def cmd_geodesic(cfg):
    if len(cfg.I) != 2 or len(cfg.J) != 2:
        raise ConfigError("--I and --J each take two angles a,b")
    try:
        qc = QuadArcConfig(ArcSegment(*cfg.I), ArcSegment(*cfg.J))
    except (DegenerateArc, NotProperlyContained) as exc:
        raise ConfigError(f"--I/--J: {exc}") from exc
    geo = hg.core_geodesic_length(qc)
    lo, mid, hi = hg.length_bracket(qc)
    write_csv(cfg.out, ["T", "log_T", "Lambda", "length", "C", "bracket_lower", "exp_half_length", "bracket_upper"],
              [(geo.T, geo.log_T, geo.modulus, geo.length, cross_ratio_config(qc), lo, mid, hi)])


def cmd_render(cfg):
    theta = cfrac.parse_theta(cfg.theta)
    ser = sg.linearization_coeffs(theta, cfg.terms)
    r_hat = sg.conformal_radius(ser, max_drift=1.0).r_hat
    if cfg.r > 0.99:
        raise ConfigError("--r is a fraction of the conformal radius and must be <= 0.99")
    pts = sg.curve_points(ser, cfg.r * r_hat, cfg.samples)
    t = np.arange(cfg.samples) / cfg.samples
    write_csv(cfg.out, ["t", "re", "im"], [(a, z.real, z.imag) for a, z in zip(t, pts)],
              note=f"r={cfg.r!r} r_hat={r_hat!r}")
    if cfg.ppm:
        sg.write_ppm(cfg.ppm, sg.rasterize(pts))


def cmd_qc(cfg):
    theta = cfrac.parse_theta(cfg.theta)
    ser = sg.linearization_coeffs(theta, cfg.terms)
    rep = sg.cross_ratio_report(ser, cfg.r_grid, cfg.tuples, cfg.seed)
    write_csv(cfg.out, ["r_fraction", "r", "min_V", "tuples", "seed"], rep.rows(),
              note=f"nonincreasing={rep.nonincreasing}")
    return 0 if rep.all_positive else 1


def cmd_verify(cfg):
    rows = run_suite(cfg.suite, cfg.seed)
    write_csv(cfg.out, ["suite", "check", "value", "threshold", "pass"], rows)
    failed = [r for r in rows if not r[4]]
    for r in failed:
        print(f"FAILED {r[0]}.{r[1]}: value {r[2]!r}", file=sys.stderr)
    return 1 if failed else 0


HANDLERS = {
    "cfrac": cmd_cfrac,
    "rotnum": cmd_rotnum,
    "tune": cmd_tune,
    "center": cmd_center,
    "qs-estimate": cmd_qs,
    "swiatek-scan": cmd_swiatek,
    "df-ratios": cmd_df,
    "geodesic": cmd_geodesic,
    "siegel-render": cmd_render,
    "siegel-qc": cmd_qc,
    "verify": cmd_verify,
}
assert set(HANDLERS) == set(COMMANDS)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return int(HANDLERS[cfg.command](cfg) or 0)
    except (ConfigError, NotIrrationalAtPrecision) as exc:
        print(f"siegel-lab: configuration error: {exc}", file=sys.stderr)
        return 2
    except SiegelLabError as exc:
        print(f"siegel-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
