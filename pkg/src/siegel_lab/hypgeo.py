"""Conformal moduli, hyperbolic densities and core-geodesic lengths.

Metric convention throughout: curvature -1, so the unit disk carries
rho(z) = 2 / (1 - |z|^2) and the punctured disk 1 / (|z| log(1/|z|)).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .circlegeo import (
    TWO_PI,
    ArcSegment,
    MoebiusMap,
    QuadArcConfig,
    cross_ratio_config,
    disk_automorphism,
    key_domain,
    three_point_map,
    wrap,
)
from .errors import (
    ArcTooLong,
    CoincidentPoints,
    DegenerateArc,
    EmptyInterior,
    NonPositiveModulus,
    NonPositiveT,
    OutsideDisk,
    OutsideDomain,
)

# beyond this log T the AGM inputs under/overflow; the asymptotic form is exact to double
_LOG_T_ASYMPTOTIC = 650.0


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean, iterated until the relative gap is below 4 ulp."""
    a, b = float(a), float(b)
    if a <= 0.0 or b <= 0.0:
        raise ValueError("agm needs positive arguments")
    for _ in range(64):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellipk(k: float) -> float:
    """Complete elliptic integral of the first kind K(k) (modulus k, not parameter)."""
    if not 0.0 <= k < 1.0:
        raise ValueError("modulus must lie in [0, 1)")
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


def teich_modulus(T: float) -> float:
    """Modulus Lambda(T) of C - ([-1, 0] U [T, inf)).

    Lambda(T) = K(r')/(2 K(r)) with r = 1/sqrt(1+T), r' = sqrt(T/(1+T)); the two
    complementary moduli are formed directly so neither side cancels.
    """
    T = float(T)
    if not T > 0.0 or math.isnan(T):
        raise NonPositiveT(f"T must be positive, got {T}")
    if math.isinf(T):
        raise NonPositiveT("T must be finite; use teich_modulus_log")
    r = 1.0 / math.sqrt(1.0 + T)
    rp = math.sqrt(T / (1.0 + T))
    # K(r') = pi / (2 agm(1, r)), K(r) = pi / (2 agm(1, r'))
    return agm(1.0, rp) / (2.0 * agm(1.0, r))


def teich_modulus_log(log_T: float) -> float:
    """Lambda as a function of log T, valid far outside the double range of T."""
    if log_T > _LOG_T_ASYMPTOTIC:
        # log(16 (T + 1)) = log 16 + log T + log1p(1/T)
        return (math.log(16.0) + log_T) / TWO_PI
    if log_T < -_LOG_T_ASYMPTOTIC:
        return 0.25 / teich_modulus_log(-log_T)
    return teich_modulus(math.exp(log_T))


def annulus_core_length(modulus: float) -> float:
    """Hyperbolic length pi / mod of the core geodesic of an annulus."""
    if not modulus > 0.0:
        raise NonPositiveModulus(f"modulus must be positive, got {modulus}")
    return math.pi / modulus


def round_annulus_density(z, alpha: float):
    """Hyperbolic density of e^{-alpha} < |z| < e^{alpha}, pulled back from the strip."""
    z = np.asarray(z, dtype=complex)
    s = np.log(np.abs(z))
    k = math.pi / (2.0 * alpha)
    return k / (np.abs(z) * np.cos(k * s))


@dataclass(frozen=True)
class Geodesic:
    """A circle orthogonal to T (``radius`` finite) or a line through 0."""

    center: complex
    radius: float
    direction: complex | None = None

    @property
    def is_line(self) -> bool:
        return self.direction is not None

    def points(self, n: int = 256) -> np.ndarray:
        t = TWO_PI * np.arange(n) / n
        if self.is_line:
            return self.center + np.tan(0.5 * (t - math.pi)) * self.direction
        return self.center + self.radius * np.exp(1j * t)


@dataclass(frozen=True)
class CoreGeodesic:
    T: float
    log_T: float
    modulus: float
    length: float
    geodesic: Geodesic
    normalizer: MoebiusMap


def _log_T_from_lengths(total: float, lj: float, ll: float, lr: float) -> float:
    return (
        math.log(math.sin(0.5 * total))
        + math.log(math.sin(0.5 * lj))
        - math.log(math.sin(0.5 * lr))
        - math.log(math.sin(0.5 * ll))
    )


def _normalizer(cfg: QuadArcConfig) -> MoebiusMap:
    """Moebius map with start(I) -> inf, start(J) -> -1, end(J) -> 0."""
    a = cmath.exp(1j * cfg.outer.start)
    b, c = cfg.inner.endpoints
    return three_point_map(a, b, c, complex(math.inf, 0.0), -1.0, 0.0)


def core_geodesic_length(cfg: QuadArcConfig) -> CoreGeodesic:
    """T of the configuration, Lambda(T), the core length 4 pi Lambda(T) and the geodesic."""
    total, lj, ll, lr = cfg.lengths
    if min(lj, ll, lr) <= 0.0:
        raise DegenerateArc("configuration has an empty piece")
    log_T = _log_T_from_lengths(total, lj, ll, lr)
    T = math.exp(log_T) if log_T < 700.0 else math.inf
    lam = teich_modulus_log(log_T)
    length = 4.0 * math.pi * lam
    phi = _normalizer(cfg)
    # phi sends the far endpoint of I to 1/T, so the ring is C - ([-1, 0] U [1/T, inf))
    # and its core geodesic is the circle |w + 1| = sqrt(1 + 1/T)
    geo = _pull_back_circle(phi.inverse(), -1.0 + 0j, math.sqrt(1.0 + math.exp(-log_T)))
    return CoreGeodesic(T, log_T, lam, length, geo, phi)


def _pull_back_circle(g: MoebiusMap, center: complex, radius: float) -> Geodesic:
    """Image under g of the circle |w - center| = radius, w-real-axis symmetric.

    g sends the real line onto T, so the image is the circle orthogonal to T
    through the images of the two real points of the w-circle.
    """
    if not math.isfinite(radius):
        # the circle degenerates to the line through -1 and infinity
        ends = (complex(g(center)), complex(g(complex(math.inf, 0.0))))
    else:
        ends = (complex(g(center - radius)), complex(g(center + radius)))
    theta = wrap(cmath.phase(ends[1]) - cmath.phase(ends[0]))
    mid = cmath.phase(ends[0]) + 0.5 * theta
    if abs(theta - math.pi) < 1e-12:
        return Geodesic(0j, math.inf, ends[0])
    half = 0.5 * theta
    return Geodesic(cmath.exp(1j * mid) / math.cos(half), abs(math.tan(half)))


def length_bracket(cfg: QuadArcConfig) -> tuple[float, float, float]:
    """(lower, e^{l/2}, upper) of the two-sided cross-ratio/length bracket."""
    total = cfg.outer.length
    C = cross_ratio_config(cfg)
    geo = core_geodesic_length(cfg)
    mid = math.exp(0.5 * geo.length)
    lower = (TWO_PI - total) ** 2 / (4.0 * math.pi**2) * C
    upper = 4.0 * math.pi**2 * (1.0 + C)
    return lower, mid, upper


# ---------------------------------------------------------------- disk metrics

def disk_density(z):
    z = np.asarray(z, dtype=complex)
    return 2.0 / (1.0 - np.abs(z) ** 2)


def punctured_disk_density(z):
    r = np.abs(np.asarray(z, dtype=complex))
    return 1.0 / (r * np.log(1.0 / r))


def hyperbolic_distance_disk(x: complex, y: complex) -> float:
    if abs(x) >= 1.0 or abs(y) >= 1.0:
        raise OutsideDisk("both points must lie in the open unit disk")
    t = abs((x - y) / (1.0 - y.conjugate() * x))
    return math.log1p(t) - math.log1p(-t)


def _density_ratio_at(u):
    """rho_{D-{0}}(u) / rho_D(u) as a function of |u|."""
    r = np.abs(u)
    return (1.0 - r) * (1.0 + r) / (2.0 * r * -np.log(r))


def punctured_density_ratio(x: complex, y: complex) -> float:
    """rho_{D - {y}}(x) / rho_D(x)."""
    x, y = complex(x), complex(y)
    if abs(x) >= 1.0 or abs(y) >= 1.0:
        raise OutsideDisk("both points must lie in the open unit disk")
    if x == y:
        raise CoincidentPoints("x and y coincide")
    u = complex(disk_automorphism(y)(x))
    return float(_density_ratio_at(u))


# ---------------------------------------------------------------- slit sphere

@dataclass(frozen=True)
class SlitSphere:
    """W = sphere minus (T - I), uniformised by Moebius, square root and Cayley."""

    gap: ArcSegment
    swap: bool = False

    def _moebius(self) -> MoebiusMap:
        a, b = self.gap.endpoints
        if self.swap:
            a, b = b, a
        m = MoebiusMap(1.0, -a, 1.0, -b)
        slit_mid = cmath.exp(1j * self.gap.complement().mid)
        w = complex(m(slit_mid))
        rot = -abs(w) / w  # slit onto the negative real axis
        return MoebiusMap(rot, -rot * a, 1.0, -b)

    def _check(self, z):
        z = np.asarray(z, dtype=complex)
        on_slit = (np.abs(np.abs(z) - 1.0) < 1e-13) & ~self.gap.contains(np.angle(z), closed=False)
        if np.any(on_slit):
            raise OutsideDomain("point lies on T - I")
        return z

    def to_half_plane(self, z):
        """Uniformising coordinate s in the right half plane and ds/dz."""
        z = self._check(z)
        m = self._moebius()
        w = m(z)
        s = np.sqrt(w)
        ds = m.derivative(z) / (2.0 * s)
        return s, ds

    def to_disk(self, z):
        s, _ = self.to_half_plane(z)
        return (s - 1.0) / (s + 1.0)

    def from_disk(self, u):
        """Inverse of ``to_disk``."""
        u = np.asarray(u, dtype=complex)
        s = (1.0 + u) / (1.0 - u)
        return self._moebius().inverse()(s * s)

    def density(self, z):
        s, ds = self.to_half_plane(z)
        return np.abs(ds) / s.real

    def distance(self, z1, z2):
        s1, _ = self.to_half_plane(z1)
        s2, _ = self.to_half_plane(z2)
        t = np.abs(s1 - s2) / np.abs(s1 + np.conj(s2))
        return 2.0 * np.arctanh(t)

    def punctured_ratio(self, z, puncture: complex = 0j):
        """rho_{W - {puncture}}(z) / rho_W(z)."""
        u = self.to_disk(z)
        u0 = complex(self.to_disk(puncture))
        v = disk_automorphism(u0)(u)
        return _density_ratio_at(v)

    def punctured_density(self, z, puncture: complex = 0j):
        return self.density(z) * self.punctured_ratio(z, puncture)


def slit_sphere_metrics(gap: ArcSegment) -> SlitSphere:
    return SlitSphere(gap)


def key_domain_boundary(arc: ArcSegment, n: int = 2049) -> np.ndarray:
    """Points of the orthogonal circle bounding D(arc) that lie off the unit circle."""
    kd = key_domain(arc)
    if kd.kind == "halfplane":
        t = np.tan(0.5 * math.pi * np.linspace(-0.999, 0.999, n))
        return t * kd.center * 1j
    # parametrise the full orthogonal circle, dropping its two points on T
    t = TWO_PI * (np.arange(n) + 0.5) / n
    pts = kd.center + kd.radius * np.exp(1j * t)
    return pts[np.abs(np.abs(pts) - 1.0) > 1e-9]


def distance_to_key_domain(W: SlitSphere, z0: complex = 0j, n: int = 4097) -> float:
    """d_W(z0, D(I)) for the gap I of W, minimised over the boundary of D(I)."""
    arc = W.gap
    if key_domain(arc).contains(z0):
        return 0.0
    pts = key_domain_boundary(arc, n)
    d = W.distance(np.full(pts.shape, z0), pts)
    k = int(np.argmin(d))
    # golden-section refinement on the boundary parameter around the grid minimum
    kd = key_domain(arc)
    if kd.kind == "halfplane":
        return float(d[k])
    ang = np.angle(pts - kd.center)
    lo, hi = ang[k] - TWO_PI / n, ang[k] + TWO_PI / n
    f = lambda t: float(W.distance(z0, kd.center + kd.radius * cmath.exp(1j * t)))
    g = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(80):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
    return min(float(d[k]), f1, f2)


def key_domain_samples(arc: ArcSegment, n_radial: int = 48, n_angular: int = 96) -> np.ndarray:
    """Polar grid inside D(arc) (disk case) including points close to its boundary."""
    kd = key_domain(arc)
    if kd.kind != "disk":
        raise ArcTooLong("sampling implemented for |I| < pi")
    rad = kd.radius * (1.0 - np.geomspace(1e-6, 1.0, n_radial, endpoint=False))
    ang = TWO_PI * (np.arange(n_angular) + 0.5) / n_angular
    pts = kd.center + (rad[:, None] * np.exp(1j * ang)[None, :]).ravel()
    on_t = (np.abs(np.abs(pts) - 1.0) < 1e-12) & ~arc.contains(np.angle(pts))
    return pts[~on_t]


@dataclass(frozen=True)
class DensityRatioScan:
    lengths: np.ndarray
    max_ratio: np.ndarray
    slope: float
    fitted_C: float


def density_ratio_bound_scan(lengths, start: float = 0.0, n_radial: int = 48, n_angular: int = 96) -> DensityRatioScan:
    """sup over D(I) of rho_{W-{0}}/rho_W for arcs of the given lengths (all < 2 pi / 3).

    ``slope`` is the least-squares slope through the origin of log(max ratio)
    against |I|; ``fitted_C`` is the smallest C with log(max ratio) <= C |I|
    on every sampled length.
    """
    lengths = np.asarray(lengths, dtype=float)
    if np.any(lengths >= TWO_PI / 3.0) or np.any(lengths <= 0.0):
        raise ArcTooLong("all arcs must satisfy 0 < |I| < 2 pi / 3")
    out = np.empty(lengths.size)
    for i, L in enumerate(lengths):
        arc = ArcSegment.from_start_length(start, L)
        W = SlitSphere(arc)
        pts = key_domain_samples(arc, n_radial, n_angular)
        out[i] = float(np.max(W.punctured_ratio(pts)))
    logs = np.log(out)
    slope = float(np.dot(lengths, logs) / np.dot(lengths, lengths))
    fitted = float(np.max(logs / lengths))
    return DensityRatioScan(lengths, out, slope, fitted)


# ---------------------------------------------------------------- annulus cutting

@dataclass(frozen=True)
class RoundAnnulus:
    inner: float
    outer: float
    center: complex = 0j

    def __post_init__(self):
        if not 0.0 <= self.inner < self.outer:
            raise ValueError("need 0 <= inner < outer")

    @property
    def modulus(self) -> float:
        if self.inner == 0.0:
            return math.inf
        return math.log(self.outer / self.inner) / TWO_PI


def cut_annulus(A: RoundAnnulus, Z, tol: float = 1e-15) -> RoundAnnulus:
    """Widest round subannulus of A - Z obtained by cutting along circles through Z."""
    radii = np.sort(np.abs(np.asarray(list(Z), dtype=complex) - A.center))
    if radii.size and (radii[0] <= A.inner or radii[-1] >= A.outer):
        raise ValueError("points of Z must lie inside the annulus")
    cuts = np.concatenate([[A.inner], radii, [A.outer]])
    if A.inner == 0.0:
        # the innermost piece is a punctured disk of infinite modulus
        return RoundAnnulus(0.0, cuts[1], A.center)
    logs = np.diff(np.log(cuts))
    k = int(np.argmax(logs))
    if logs[k] <= tol:
        raise EmptyInterior("Z leaves no round subannulus")
    return RoundAnnulus(float(cuts[k]), float(cuts[k + 1]), A.center)


def schwarz_pick_inclusion(z, inner_radius: float = 0.5):
    """rho_D(z) and rho_{D_r}(z) for the inclusion D_r into D."""
    z = np.asarray(z, dtype=complex)
    return disk_density(z), disk_density(z / inner_radius) / inner_radius
