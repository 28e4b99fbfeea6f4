"""Invariant suites run by ``siegel-lab verify``.

Each check yields (suite, name, value, threshold, ok). Values are
deterministic for a given seed, so two runs produce identical CSV bodies.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import blaschke as bl
from . import cfrac, circlegeo as cg, hypgeo as hg, linearize as lz, siegel as sg

SUITES = ("cfrac", "circlegeo", "hypgeo", "blaschke", "linearize", "siegel")


def _row(suite, name, value, threshold, ok):
    return (suite, name, float(value), float(threshold), bool(ok))


def _le(suite, name, value, threshold):
    return _row(suite, name, value, threshold, value <= threshold)


@lru_cache(maxsize=None)
def tuned_douady_ghys(tol: float = 1e-10, n_iter: int = 10**6) -> bl.TuneResult:
    return bl.tune_to_rotation(bl.BlaschkeProduct.douady_ghys(), cfrac.parse_theta("golden"), tol, n_iter)


def random_bounded_type(rng: np.random.Generator, count: int, bound: int = 4, length: int = 12):
    out = []
    for _ in range(count):
        qs = [int(v) for v in rng.integers(1, bound + 1, length)]
        out.append(cfrac.RotationNumber.from_quotients(qs, periodic=True))
    return out


def suite_cfrac(seed: int):
    s = "cfrac"
    g = cfrac.parse_theta("golden")
    yield _row(s, "golden_certified_depth", g.depth, 30, g.depth >= 30)
    fib = [1, 1]
    while len(fib) < g.depth + 1:
        fib.append(fib[-1] + fib[-2])
    yield _row(s, "golden_q_fibonacci", 0, 0, list(g.q) == fib[: len(g.q)])
    rng = np.random.default_rng(seed)
    worst_return = 0.0
    worst_sixth = 0.0
    for rot in [g] + random_bounded_type(rng, 20):
        for n in range(rot.depth - 1):
            worst_return = max(worst_return, rot.closest_return(n) * rot.q[n + 1])
            if n >= 5:
                worst_sixth = max(worst_sixth, rot.closest_return(n) * 6)
    yield _row(s, "max_q_next_times_closest_return", worst_return, 1.0, worst_return < 1.0)
    yield _row(s, "max_6_closest_return_n_ge_5", worst_sixth, 1.0, worst_sixth < 1.0)
    tau_ok = all(g.q[n] < g.tau_bound() * g.q[n - 2] for n in range(2, g.depth + 1))
    yield _row(s, "tau_bound_golden", g.tau_bound(), 0, tau_ok)


def suite_circlegeo(seed: int):
    s = "circlegeo"
    rng = np.random.default_rng(seed)
    bad = 0
    worst_sum = 0.0
    for _ in range(500):
        arc = cg.ArcSegment.from_start_length(rng.uniform(0, cg.TWO_PI), rng.uniform(0.05, cg.TWO_PI - 0.05))
        z = complex(*rng.normal(size=2)) * rng.uniform(0.2, 2.0)
        if abs(abs(z) - 1.0) < 1e-3:
            continue
        mu = cg.mu_z(z, arc)
        worst_sum = max(worst_sum, abs(mu + cg.mu_z(z, arc.complement()) - cg.TWO_PI))
        if cg.in_key_domain(z, arc) != (mu > math.pi):
            bad += 1
    yield _row(s, "key_domain_vs_harmonic_measure_failures", bad, 0, bad == 0)
    yield _le(s, "harmonic_measure_complement_sum", worst_sum, 1e-12)
    g = cg.disk_preserving_moebius(0.3 - 0.4j)
    yield _row(s, "moebius_preserves_circle", 0, 0, g.preserves_circle())


def suite_hypgeo(seed: int):
    s = "hypgeo"
    Ts = np.logspace(-2, 2, 200)
    ident = max(abs(hg.teich_modulus(T) * hg.teich_modulus(1 / T) - 0.25) for T in Ts)
    yield _le(s, "teich_reciprocal_identity", ident, 1e-10)
    ok = all(T < math.exp(2 * math.pi * hg.teich_modulus(T)) <= 16 * (T + 1) for T in Ts)
    yield _row(s, "teich_two_sided_bound", 0, 0, ok)
    yield _le(s, "teich_at_one", abs(hg.teich_modulus(1.0) - 0.5), 1e-12)
    rng = np.random.default_rng(seed)
    viol = 0
    for cfg in random_nested_configs(rng, 1000):
        lo, mid, hi = hg.length_bracket(cfg)
        viol += not (lo <= mid <= hi)
    yield _row(s, "length_bracket_violations", viol, 0, viol == 0)
    pts = (rng.uniform(0, 0.95, (300, 3)) * np.exp(1j * rng.uniform(0, 2 * math.pi, (300, 3))))
    tri = 0
    for x, y, z in pts:
        d = hg.hyperbolic_distance_disk
        tri += d(x, z) > d(x, y) + d(y, z) + 1e-12
    yield _row(s, "disk_triangle_inequality_failures", tri, 0, tri == 0)
    A = hg.RoundAnnulus(1.0, math.e**2)
    B = hg.cut_annulus(A, [math.e])
    yield _le(s, "cut_annulus_equal_split", abs(B.modulus - A.modulus / 2), 1e-15)


def random_nested_configs(rng: np.random.Generator, count: int):
    out = []
    while len(out) < count:
        total = rng.uniform(0.01, cg.TWO_PI - 0.01)
        w = rng.dirichlet([1.0, 1.0, 1.0]) * total
        if w.min() < 1e-9:
            continue
        out.append(cg.QuadArcConfig.from_lengths(rng.uniform(0, cg.TWO_PI), *w))
    return out


def suite_blaschke(seed: int):
    s = "blaschke"
    B = bl.BlaschkeProduct.douady_ghys()
    L = bl.CircleLift(B)
    xs = np.linspace(0, 1, 513)
    yield _le(s, "lift_periodicity", float(np.max(np.abs(L(xs + 1) - L(xs) - 1))), 1e-10)
    crit = L.critical_points()
    yield _row(s, "douady_ghys_critical_point_at_1", crit.size, 1, crit.size == 1 and min(crit[0], 1 - crit[0]) < 1e-8)
    res = tuned_douady_ghys()
    g = cfrac.parse_theta("golden")
    times = bl.closest_return_times(bl.CircleLift(res.B), 10**6)[:10]
    yield _row(s, "tuned_closest_returns_fibonacci", res.t, 0, times == list(g.q[1:11]))
    yield _le(s, "tuned_rotation_error_bound", res.error_bound, 1e-10)
    h = cg.disk_automorphism(0.2 + 0.1j, 0.7)
    C = bl.conjugate(res.B, h)
    n = 2**14
    diff = abs(bl.rotation_number(bl.CircleLift(C), n) - bl.rotation_number(bl.CircleLift(res.B), n))
    diff = min(diff % 1.0, 1.0 - diff % 1.0)
    yield _le(s, "conjugation_rotation_number", diff, 2.0 / n)


def suite_linearize(seed: int):
    s = "linearize"
    rng = np.random.default_rng(seed)
    g = cfrac.parse_theta("golden")
    mu = lz.EmpiricalCircleMeasure.uniform_atoms(np.arange(1000) * cg.TWO_PI / 1000)
    yield _le(s, "uniform_barycenter", abs(lz.barycenter(mu).z), 1e-12)
    worst = 0.0
    for _ in range(50):
        m = lz.EmpiricalCircleMeasure(rng.uniform(0, cg.TWO_PI, 1000), rng.dirichlet(np.ones(1000)))
        h = cg.disk_automorphism(0.6 * np.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, cg.TWO_PI)), rng.uniform(0, cg.TWO_PI))
        worst = max(worst, abs(lz.barycenter(m.pushforward(h)).z - h(lz.barycenter(m).z)))
    yield _le(s, "barycenter_equivariance", worst, 1e-8)
    bad = sum(not (c.disjoint and c.covers) for c in (lz.pullback_partition_check_rotation(g, n) for n in range(5, 11)))
    yield _row(s, "rotation_pullback_disjoint_cover_failures", bad, 0, bad == 0)
    res = tuned_douady_ghys()
    cen = lz.center(res.B, 2**16)
    yield _le(s, "centered_first_moment", abs(cen.moment), 1e-2)
    viol = lz.centered_arc_bound_check(cen.measure, lz.random_arcs(rng, 200))
    yield _row(s, "centered_arc_bound_violations", viol, 0, viol == 0)
    yield _row(s, "identity_qs_constant", lz.qs_constant(lz.identity_table(1024)), 1.0, lz.qs_constant(lz.identity_table(1024)) == 1.0)
    R = bl.RigidRotation(g.value)
    yield _le(s, "rotation_length_ratio", abs(lz.swiatek_scan(R, g, 6).max_length_ratio - 1.0), 1e-9)
    L = bl.CircleLift(res.B)
    m15 = lz.qs_constant(lz.linearization_table(L, g.value, 2**15))
    m16 = lz.qs_constant(lz.linearization_table(L, g.value, 2**16))
    yield _le(s, "qs_constant_relative_change", abs(m16 - m15) / m15, 0.2)


def suite_siegel(seed: int):
    s = "siegel"
    g = cfrac.parse_theta("golden")
    ser = sg.linearization_coeffs(g, 1000)
    b2 = ser.coeffs[2]
    yield _le(s, "b2_exact", abs(b2 - 1 / (ser.lam**2 - ser.lam)), 1e-15)
    est = sg.conformal_radius(ser)
    est2 = sg.conformal_radius(sg.linearization_coeffs(g, 2000))
    yield _le(s, "radius_drift_1000_2000", abs(est.r_hat - est2.r_hat) / est2.r_hat, 0.01)
    yield _le(s, "functional_residual_half_radius", ser.residual(0.5 * est.r_hat), 1e-8)
    r = 0.5 * est.r_hat
    z = sg.gamma_orbit(ser, r, 0.0, 1000, est.r_hat)
    direct = sg.iterate_quadratic(ser.lam, z[0], 1000)
    yield _le(s, "orbit_vs_series", float(np.max(np.abs(z - direct))), 1e-7)
    rep = sg.cross_ratio_report(ser, [0.5, 0.9, 0.99], 10_000, seed)
    for f, v in zip(rep.r_grid, rep.min_v):
        yield _row(s, f"min_cross_ratio_r{f}", v, 0.0, v > 0.0)


def run_suite(name: str, seed: int = 0):
    names = SUITES if name == "full" else (name,)
    rows = []
    for n in names:
        fn = globals().get(f"suite_{n}")
        if fn is None:
            from .errors import ConfigError

            raise ConfigError(f"unknown suite {name!r}; choose from full, {', '.join(SUITES)}")
        rows.extend(fn(seed))
    return rows
