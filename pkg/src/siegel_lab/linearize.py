"""Invariant measures, conformal barycenters, centering and the linearizing homeomorphism.

Circle points are handled in turns (x in [0, 1) for exp(2 pi i x)) inside
this module; ArcSegment objects are produced at the boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .blaschke import BlaschkeProduct, CircleLift, RigidRotation, conjugate, critical_values
from .cfrac import RotationNumber
from .circlegeo import TWO_PI, ArcSegment, MoebiusMap, QuadArcConfig, cross_ratio_config, disk_automorphism, shadow
from .errors import DisjointnessViolation, NoConvergence, OrderMismatch
from .hypgeo import core_geodesic_length


# ---------------------------------------------------------------- measures

@dataclass(frozen=True)
class EmpiricalCircleMeasure:
    """Finitely many atoms exp(i angle) with positive weights summing to 1."""

    angles: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        ang = np.mod(np.asarray(self.angles, dtype=float), TWO_PI)
        w = np.asarray(self.weights, dtype=float)
        if ang.shape != w.shape or ang.ndim != 1 or ang.size == 0:
            raise ValueError("angles and weights must be matching non-empty 1-d arrays")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "angles", ang)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform_atoms(cls, angles) -> "EmpiricalCircleMeasure":
        angles = np.asarray(angles, dtype=float)
        return cls(angles, np.full(angles.size, 1.0 / angles.size))

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def mass(self, arc: ArcSegment) -> float:
        return float(self.weights[arc.contains(self.angles, closed=True)].sum())

    def first_moment(self) -> complex:
        """Integral of zeta d mu."""
        return complex(np.dot(self.weights, self.points))

    def pushforward(self, g: MoebiusMap) -> "EmpiricalCircleMeasure":
        return EmpiricalCircleMeasure(np.angle(g(self.points)), self.weights)

    def field(self, z: complex) -> complex:
        """Douady-Earle vector field (1 - |z|^2) * integral (zeta - z)/(1 - conj(z) zeta) d mu."""
        zeta = self.points
        return (1.0 - abs(z) ** 2) * complex(np.dot(self.weights, (zeta - z) / (1.0 - np.conj(z) * zeta)))


def empirical_invariant_measure(L, N: int, x0: float = 0.0) -> EmpiricalCircleMeasure:
    """N orbit atoms of weight 1/N, starting at exp(2 pi i x0)."""
    fr, _ = L.orbit(x0, N - 1)
    return EmpiricalCircleMeasure.uniform_atoms(TWO_PI * fr)


# ---------------------------------------------------------------- barycenter

@dataclass(frozen=True)
class Barycenter:
    z: complex
    residual: float
    steps: int


def barycenter(mu: EmpiricalCircleMeasure, tol: float = 1e-13, max_steps: int = 10_000) -> Barycenter:
    """The zero of the Douady-Earle field in the disk.

    Damped iteration z <- z + h xi(z), h halved whenever |xi| fails to drop,
    then a couple of Newton steps with a finite-difference Jacobian which are
    kept only if they reduce |xi|.
    """
    z = 0j
    xi = mu.field(z)
    r = abs(xi)
    h = 0.5
    steps = 0
    while r > tol and steps < max_steps:
        steps += 1
        cand = z + h * xi
        if abs(cand) >= 1.0:
            h *= 0.5
            continue
        xc = mu.field(cand)
        if abs(xc) < r:
            z, xi, r = cand, xc, abs(xc)
            h = min(0.5, 2.0 * h)
        else:
            h *= 0.5
            if h < 1e-12:
                break
    # Newton polish: the damped path stalls once |xi| reaches rounding level of the step
    for _ in range(8):
        if r <= 0.1 * tol:
            break
        eps = 1e-7
        fx = mu.field(z + eps) - xi
        fy = mu.field(z + 1j * eps) - xi
        J = np.array([[fx.real, fy.real], [fx.imag, fy.imag]]) / eps
        try:
            dx, dy = np.linalg.solve(J, [-xi.real, -xi.imag])
        except np.linalg.LinAlgError:
            break
        cand = z + complex(dx, dy)
        if abs(cand) >= 1.0:
            break
        xc = mu.field(cand)
        if abs(xc) >= r:
            break
        z, xi, r = cand, xc, abs(xc)
    if r > tol:
        raise NoConvergence(f"|xi(z)| = {r:.3e} > {tol:.1e} after {steps} steps")
    return Barycenter(z, r, steps)


@dataclass(frozen=True)
class Centering:
    B: BlaschkeProduct
    g: MoebiusMap
    z_B: complex
    moment: complex
    measure: EmpiricalCircleMeasure


def center(B: BlaschkeProduct, N: int = 2**16, tol: float = 1e-13) -> Centering:
    """Conjugate B by the disk automorphism sending its barycenter to 0."""
    mu = empirical_invariant_measure(CircleLift(B), N)
    bc = barycenter(mu, tol)
    g = disk_automorphism(bc.z)
    Bc = conjugate(B, g)
    mu2 = empirical_invariant_measure(CircleLift(Bc), N)
    return Centering(Bc, g, bc.z, mu2.first_moment(), mu2)


def centered_arc_bound(delta):
    """Lower bound 2 arccos(delta/(1 - delta)) on |T - I| when mu(I) = delta < 1/2."""
    delta = np.asarray(delta, dtype=float)
    return 2.0 * np.arccos(delta / (1.0 - delta))


def centered_arc_bound_check(mu: EmpiricalCircleMeasure, arcs) -> int:
    """Number of arcs with mu(I) < 1/2 violating the centered-measure bound (slack 4 pi / N)."""
    slack = 2.0 * TWO_PI / mu.angles.size
    bad = 0
    for arc in arcs:
        delta = mu.mass(arc)
        if delta >= 0.5:
            continue
        if TWO_PI - arc.length < centered_arc_bound(delta) - slack:
            bad += 1
    return bad


def random_arcs(rng: np.random.Generator, n: int) -> list[ArcSegment]:
    starts = rng.uniform(0.0, TWO_PI, n)
    lengths = rng.uniform(1e-3, TWO_PI - 1e-3, n)
    return [ArcSegment.from_start_length(s, l) for s, l in zip(starts, lengths)]


# ---------------------------------------------------------------- linearization

@dataclass(frozen=True)
class LinearizationTable:
    """Orbit x_k = F^k(0) paired with k theta mod 1, sorted in circle order (turns)."""

    sources: np.ndarray
    targets: np.ndarray
    index: np.ndarray
    theta: float

    @property
    def size(self) -> int:
        return self.sources.size

    def h(self, x):
        """Lift of h_B in turns: piecewise linear between adjacent nodes, h(x + 1) = h(x) + 1."""
        x = np.asarray(x, dtype=float)
        fl = np.floor(x)
        if np.array_equal(self.sources, self.targets):
            return x
        xs = np.concatenate([self.sources, [1.0]])
        ys = np.concatenate([self.targets, [1.0]])
        return fl + np.interp(x - fl, xs, ys)

    def h_eval(self, z):
        """h_B on the unit circle."""
        x = np.angle(np.asarray(z, dtype=complex)) / TWO_PI
        return np.exp(1j * TWO_PI * self.h(x))

    @property
    def max_gap(self) -> float:
        return float(np.max(np.diff(np.concatenate([self.targets, [1.0]]))))


def linearization_table(L, theta: float, N: int) -> LinearizationTable:
    fr, _ = L.orbit(0.0, N - 1)
    tg = np.mod(np.arange(N) * theta, 1.0)
    order_s = np.argsort(fr, kind="stable")
    order_t = np.argsort(tg, kind="stable")
    if not np.array_equal(order_s, order_t):
        raise OrderMismatch("orbit and rotation disagree on circle order; tune more accurately or lower N")
    return LinearizationTable(fr[order_s], tg[order_s], order_s, float(theta))


def identity_table(N: int) -> LinearizationTable:
    x = np.arange(N) / N
    return LinearizationTable(x, x.copy(), np.arange(N), 0.0)


DEFAULT_DELTAS = 2.0 ** -np.arange(4, 11)
DEFAULT_QS_POINTS = np.arange(256) / 256.0


def qs_constant(table: LinearizationTable, deltas=DEFAULT_DELTAS, xs=DEFAULT_QS_POINTS) -> float:
    """Max over the grids of max(r, 1/r), r = |h([x, x + d])| / |h([x - d, x])|."""
    xs = np.asarray(xs, dtype=float)[:, None]
    d = np.asarray(deltas, dtype=float)[None, :]
    hx = table.h(xs)
    ratio = (table.h(xs + d) - hx) / (hx - table.h(xs - d))
    return float(max(ratio.max(), (1.0 / ratio).max()))


# ---------------------------------------------------------------- pullback scans

def _disjoint_mod1(starts, lengths, slack=0.0) -> bool:
    """Open arcs (s, s + l) mod 1 pairwise disjoint; works for floats or Fractions."""
    arcs = sorted((s % 1, l) for s, l in zip(starts, lengths))
    total = sum(l for _, l in arcs)
    for (s0, l0), (s1, _) in zip(arcs, arcs[1:] + [(arcs[0][0] + 1, 0)]):
        if s0 + l0 > s1 + slack:
            return False
    return total <= 1 + slack


def _covers_mod1(starts, lengths, slack=0.0) -> bool:
    """Closed arcs [s, s + l] mod 1 cover the circle; works for floats or Fractions."""
    arcs = sorted((s % 1, l) for s, l in zip(starts, lengths))
    first = arcs[0][0]
    reach = first + arcs[0][1]
    for a, b in arcs[1:]:
        if a > reach + slack:
            return False
        reach = max(reach, a + b)
    return reach + slack >= first + 1


def _bracket(L, x0: float, i: int, j: int, theta: float):
    """<F^i x0, F^j x0> as lifted endpoints (lo, hi) with hi - lo < 1."""
    a = _iterate_signed(L, x0, i)
    b = _iterate_signed(L, x0, j)
    if math.fmod((j - i) * theta, 1.0) % 1.0 < 0.5:
        lo, hi = a, b
    else:
        lo, hi = b, a
    hi = lo + ((hi - lo) % 1.0)
    return lo, hi


def _iterate_signed(L, x0: float, k: int) -> float:
    if k >= 0:
        fr, wd = L.iterate(np.array([x0]), k)
    else:
        fr, wd = L.iterate_back(np.array([x0]), -k)
    return float(fr[0])


def pullback_family(L, lo: float, hi: float, count: int) -> np.ndarray:
    """Lifted endpoints of F^{-k}([lo, hi]) for k = 0..count-1, shape (count, 2)."""
    out = np.empty((count, 2))
    cur = np.array([lo, hi])
    for k in range(count):
        out[k] = cur
        cur = L.inverse(cur)
    return out


@dataclass(frozen=True)
class PartitionCheck:
    n: int
    disjoint: bool
    covers: bool
    n_disjoint: int
    n_cover: int


def orbit_positions(L, x0: float, back: int, fwd: int) -> dict:
    """Lifted orbit points F^j(x0) for -back <= j <= fwd, each computed once."""
    pos = {0: float(x0)}
    fr, wd = L.orbit(x0, fwd)
    for j in range(1, fwd + 1):
        pos[j] = float(fr[j] + wd[j])
    cur = np.array([float(x0)])
    for j in range(1, back + 1):
        cur = L.inverse(cur)
        pos[-j] = float(cur[0])
    return pos


def _orbit_arcs(pos, pairs, forward: bool):
    """(start mod 1, length) of the arcs <pos[i], pos[j]>, oriented by ``forward``."""
    # exact rationals from the reduced doubles: shared endpoints then compare exactly
    red = {k: Fraction(v % 1.0) for k, v in pos.items()}
    starts, lengths = [], []
    for i, j in pairs:
        a, b = (red[i], red[j]) if forward else (red[j], red[i])
        starts.append(a)
        lengths.append((b - a) % 1)
    return starts, lengths


def pullback_partition_check(L, rot: RotationNumber, n: int, x0: float = 0.0, slack: float = 0.0) -> PartitionCheck:
    """Disjointness of F^{-k} I (k < q_{n-2}) and covering by F^{-k} J (k < q_n + q_{n+1}).

    Arc endpoints are shared orbit points, so arcs that touch combinatorially
    touch bit-for-bit and no tolerance is needed.
    """
    q = rot.q
    qn, n_i, n_j = q[n], q[n - 2], q[n] + q[n + 1]
    forward = (qn * Fraction(rot.value) - rot.p[n]) > 0
    pos = orbit_positions(L, x0, max(qn + n_i, n_j), 2 * qn)
    si, li = _orbit_arcs(pos, [(-qn - k, 2 * qn - k) for k in range(n_i)], forward)
    sj, lj = _orbit_arcs(pos, [(-k, qn - k) for k in range(n_j)], forward)
    return PartitionCheck(n, _disjoint_mod1(si, li, slack), _covers_mod1(sj, lj, slack), n_i, n_j)


def pullback_partition_check_rotation(rot: RotationNumber, n: int) -> PartitionCheck:
    """The same two assertions for the rigid rotation, in exact rational arithmetic.

    The rotation angle is the double ``rot.value`` read as an exact fraction; its
    continued fraction agrees with ``rot`` through the certified depth, so the
    combinatorics are those of theta. Touching endpoints compare exactly.
    """
    th = Fraction(rot.value)
    q = rot.q
    qn = q[n]
    disp = qn * th - rot.p[n]  # signed position of R^{q_n} 0
    if disp > 0:
        ilo, ihi = -disp, 2 * disp
        jlo, jhi = Fraction(0), disp
    else:
        ilo, ihi = 2 * disp, -disp
        jlo, jhi = disp, Fraction(0)
    fam_i = [ilo - k * th for k in range(q[n - 2])]
    fam_j = [jlo - k * th for k in range(q[n] + q[n + 1])]
    disjoint = _disjoint_mod1(fam_i, [ihi - ilo] * len(fam_i))
    covers = _covers_mod1(fam_j, [jhi - jlo] * len(fam_j))
    return PartitionCheck(n, disjoint, covers, len(fam_i), len(fam_j))


@dataclass(frozen=True)
class SwiatekScan:
    n: int
    records: list  # (k, I_start, I_end, J_start, J_end, C, T, length) with angles in radians
    max_length_ratio: float
    max_cross_ratio: float
    shadow_steps: int
    shadow_bound: int


def swiatek_scan(L, rot: RotationNumber, n: int, x0: float = 0.0) -> SwiatekScan:
    """Pull back I = <F^{-q_n} z, F^{2 q_n} z> and J = <z, F^{q_n} z> for k < q_{n-2}."""
    if n < 5:
        raise ValueError("swiatek_scan needs n >= 5")
    q = rot.q
    qn = q[n]
    count = q[n - 2]
    theta = rot.value
    ilo, ihi = _bracket(L, x0, -qn, 2 * qn, theta)
    jlo, jhi = _bracket(L, x0, 0, qn, theta)
    # J sits inside I in the lifted picture
    width = jhi - jlo
    jlo = ilo + ((jlo - ilo) % 1.0)
    jhi = jlo + width
    I = pullback_family(L, ilo, ihi, count)
    J = pullback_family(L, jlo, jhi, count)
    if not _disjoint_mod1(I[:, 0], I[:, 1] - I[:, 0]):
        raise DisjointnessViolation(f"pullbacks of I overlap at level n={n}")
    B = getattr(L, "map", None)
    cvals = critical_values(B) if B is not None else np.empty(0)
    records = []
    lengths = []
    crs = []
    shadow_steps = 0
    for k in range(count):
        a, d = I[k]
        b, c = J[k]
        cfg = QuadArcConfig.from_lengths(TWO_PI * a, TWO_PI * (b - a), TWO_PI * (c - b), TWO_PI * (d - c))
        C = cross_ratio_config(cfg)
        geo = core_geodesic_length(cfg)
        records.append((k, cfg.outer.start, cfg.outer.end, cfg.inner.start, cfg.inner.end, C, geo.T, geo.length))
        lengths.append(geo.length)
        crs.append(C)
        if any(shadow(v, cfg.outer) for v in cvals):
            shadow_steps += 1
    lengths = np.array(lengths)
    return SwiatekScan(
        n,
        records,
        float(np.max(lengths / lengths[0])),
        float(np.max(crs)),
        shadow_steps,
        3 * len(cvals),
    )


@dataclass(frozen=True)
class DFRatios:
    n: int
    cp1_min: float
    cp1_max: float
    cp2_min: float
    cp2_max: float

    @property
    def J(self) -> float:
        return max(self.cp1_max, 1.0 / self.cp1_min, self.cp2_max, 1.0 / self.cp2_min)


def df_ratios(L, rot: RotationNumber, ns, xs) -> list[DFRatios]:
    """|<F^{-q_n} z, z>| / |<z, F^{q_n} z>| and |<F^{q_{n+1}} z, z>| / |<z, F^{q_n} z>| over a grid of z."""
    xs = np.asarray(xs, dtype=float)
    out = []
    for n in ns:
        qn, qn1 = rot.q[n], rot.q[n + 1]

        def disp(k):
            # circular distance from x to F^k x; these arcs are all shorter than 1/2
            fr, _ = L.iterate(xs, k) if k >= 0 else L.iterate_back(xs, -k)
            return 0.5 - np.abs(np.mod(fr - xs, 1.0) - 0.5)

        fwd = disp(qn)
        back = disp(-qn)
        nxt = disp(qn1)
        r1 = back / fwd
        r2 = nxt / fwd
        out.append(DFRatios(n, float(r1.min()), float(r1.max()), float(r2.min()), float(r2.max())))
    return out


def tuned_lift(B: BlaschkeProduct) -> CircleLift:
    return CircleLift(B)


def rigid_rotation(theta: float) -> RigidRotation:
    return RigidRotation(theta)
