"""Arcs on the unit circle, circle-preserving Moebius maps, key domains and shadows."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateArc, NotProperlyContained, OnCircle

TWO_PI = 2.0 * math.pi
MIN_ARC = 1e-14
CIRCLE_TOL = 1e-12
SHADOW_ANGLE = TWO_PI / 3.0


def wrap(angle):
    """Reduce angles to [0, 2 pi)."""
    r = np.mod(angle, TWO_PI)
    if np.ndim(r) == 0:
        r = float(r)
        return 0.0 if r >= TWO_PI else r
    return np.where(r >= TWO_PI, 0.0, r)


def ccw_distance(a, b):
    """Anticlockwise angular distance from a to b, in [0, 2 pi)."""
    return wrap(np.asarray(b, dtype=float) - np.asarray(a, dtype=float))


@dataclass(frozen=True)
class ArcSegment:
    """Anticlockwise arc from ``start`` to ``end``; never empty, never the full circle."""

    start: float
    end: float
    length: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        s, e = wrap(float(self.start)), wrap(float(self.end))
        length = wrap(e - s)
        if not length > 0.0:
            raise DegenerateArc("arc has zero length or covers the whole circle")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)
        object.__setattr__(self, "length", length)

    @classmethod
    def from_start_length(cls, start: float, length: float) -> "ArcSegment":
        if not 0.0 < length < TWO_PI:
            raise DegenerateArc(f"arc length {length} outside (0, 2pi)")
        return cls(start, start + length)

    @classmethod
    def from_points(cls, a: complex, b: complex) -> "ArcSegment":
        return cls(cmath.phase(a), cmath.phase(b))

    @property
    def mid(self) -> float:
        return wrap(self.start + 0.5 * self.length)

    @property
    def endpoints(self) -> tuple[complex, complex]:
        return cmath.exp(1j * self.start), cmath.exp(1j * self.end)

    def contains(self, angle, closed: bool = False):
        """Membership of angle(s) in the arc, following anticlockwise traversal."""
        d = ccw_distance(self.start, angle)
        if closed:
            return (d <= self.length) | np.isclose(d, TWO_PI, rtol=0, atol=1e-15)
        return (d > 0.0) & (d < self.length)

    def contains_point(self, z) -> bool:
        return bool(self.contains(np.angle(z)))

    def rotate(self, alpha: float) -> "ArcSegment":
        return ArcSegment(self.start + alpha, self.end + alpha)

    def complement(self) -> "ArcSegment":
        return ArcSegment(self.end, self.start)

    def sample(self, n: int, interior: bool = True) -> np.ndarray:
        if interior:
            t = (np.arange(n) + 0.5) / n
        else:
            t = np.linspace(0.0, 1.0, n)
        return wrap(self.start + t * self.length)


def arc_split(outer: ArcSegment, inner: ArcSegment) -> tuple[ArcSegment, ArcSegment]:
    """Return (L, R): the components of outer - inner before and after inner."""
    s = wrap(inner.start - outer.start)
    e = s + inner.length
    if not (s > 0.0 and e < outer.length):
        raise NotProperlyContained("inner arc is not properly contained in outer arc")
    left = ArcSegment(outer.start, inner.start)
    right = ArcSegment(inner.end, outer.end)
    return left, right


@dataclass(frozen=True)
class QuadArcConfig:
    """Nested arcs J properly inside I together with the side pieces L and R."""

    outer: ArcSegment
    inner: ArcSegment
    left: ArcSegment = field(init=False)
    right: ArcSegment = field(init=False)

    def __post_init__(self):
        left, right = arc_split(self.outer, self.inner)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def from_lengths(cls, start: float, left: float, inner: float, right: float) -> "QuadArcConfig":
        outer = ArcSegment.from_start_length(start, left + inner + right)
        return cls(outer, ArcSegment.from_start_length(start + left, inner))

    @property
    def lengths(self) -> tuple[float, float, float, float]:
        """(|I|, |J|, |L|, |R|) with |L| and |R| taken from the angular offsets."""
        total = self.outer.length
        lj = self.inner.length
        ll = wrap(self.inner.start - self.outer.start)
        lr = total - ll - lj
        return total, lj, ll, lr


def cross_ratio_config(cfg: QuadArcConfig) -> float:
    """C(I, J) = |I||J| / (|R||L|)."""
    total, lj, ll, lr = cfg.lengths
    if min(lj, ll, lr) < MIN_ARC:
        raise DegenerateArc("an arc of the configuration is shorter than 1e-14")
    return total * lj / (lr * ll)


# ---------------------------------------------------------------- Moebius maps

@dataclass(frozen=True)
class MoebiusMap:
    """w -> (a w + b) / (c w + d)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise ValueError("singular Moebius map (ad - bc = 0)")

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.a * w + self.b) / (self.c * w + self.d)
            inf = np.isinf(w)
            if np.any(inf):
                lim = self.a / self.c if self.c != 0 else complex(np.inf, 0.0)
                out = np.where(inf, lim, out)
        return out[()] if out.ndim == 0 else out

    def derivative(self, w):
        w = np.asarray(w, dtype=complex)
        det = self.a * self.d - self.b * self.c
        out = det / (self.c * w + self.d) ** 2
        return out[()] if out.ndim == 0 else out

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self o other."""
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def preserves_circle(self, n: int = 64, tol: float = 1e-12) -> bool:
        z = np.exp(1j * TWO_PI * np.arange(n) / n)
        return bool(np.all(np.abs(np.abs(self(z)) - 1.0) <= tol))

    def image_arc(self, arc: ArcSegment) -> ArcSegment:
        """Image of an arc under a map that preserves the unit circle."""
        za, zb = arc.endpoints
        wa, wb = np.angle(self(za)), np.angle(self(zb))
        wm = np.angle(self(cmath.exp(1j * arc.mid)))
        cand = ArcSegment(wa, wb)
        if cand.contains(wm):
            return cand
        return ArcSegment(wb, wa)


def disk_automorphism(center: complex, angle: float = 0.0) -> MoebiusMap:
    """w -> e^{i angle} (w - center) / (1 - conj(center) w)."""
    rot = cmath.exp(1j * angle)
    center = complex(center)
    return MoebiusMap(rot, -rot * center, -center.conjugate(), 1.0)


def disk_preserving_moebius(z: complex) -> MoebiusMap:
    """phi_z(w) = (w - z)/(1 - conj(z) w): sends z to 0 and preserves the unit circle.

    Points outside the closed disk are allowed (the map then swaps the two
    complementary disks); points on the circle raise OnCircle.
    """
    z = complex(z)
    if abs(abs(z) - 1.0) < CIRCLE_TOL:
        raise OnCircle(f"|z| = 1 for z = {z}")
    return disk_automorphism(z)


def three_point_map(z1, z2, z3, w1, w2, w3) -> MoebiusMap:
    """Moebius map with z_k -> w_k; infinity is allowed among the targets."""

    def to_std(p, q, r):
        # sends p -> 0, q -> 1, r -> inf
        if cmath.isinf(p):
            return MoebiusMap(0.0, q - r, 1.0, -r)
        if cmath.isinf(q):
            return MoebiusMap(1.0, -p, 1.0, -r)
        if cmath.isinf(r):
            return MoebiusMap(1.0, -p, 0.0, q - p)
        return MoebiusMap(q - r, -p * (q - r), q - p, -r * (q - p))

    return to_std(w1, w2, w3).inverse().compose(to_std(z1, z2, z3))


def mu_z(z: complex, arc: ArcSegment) -> float:
    """Length of phi_z(arc): 2 pi times the harmonic measure of the arc seen from z."""
    z = complex(z)
    if cmath.isinf(z):
        return arc.length
    return disk_preserving_moebius(z).image_arc(arc).length


def on_circle(z: complex) -> bool:
    return (not cmath.isinf(z)) and abs(abs(z) - 1.0) < CIRCLE_TOL


def shadow(z: complex, arc: ArcSegment) -> bool:
    """z lies in the shadow of the arc: z in the arc, or mu_z(arc) >= 2 pi / 3."""
    z = complex(z)
    if on_circle(z):
        return arc.contains_point(z)
    return mu_z(z, arc) >= SHADOW_ANGLE


@dataclass(frozen=True)
class KeyDomain:
    """D(I): the side of the circle through I's endpoints orthogonal to T containing I.

    ``kind`` is ``"disk"`` (|I| < pi), ``"halfplane"`` (|I| = pi) or ``"exterior"``.
    For the half plane, ``center`` holds the unit normal pointing into D(I)
    and ``radius`` is infinite.
    """

    arc: ArcSegment
    center: complex
    radius: float
    kind: str

    def contains(self, z) -> np.ndarray | bool:
        z = np.asarray(z, dtype=complex)
        with np.errstate(invalid="ignore"):
            if self.kind == "halfplane":
                inside = (z * np.conj(self.center)).real > 0.0
            elif self.kind == "disk":
                inside = np.abs(z - self.center) < self.radius
            else:
                inside = np.isinf(z) | (np.abs(z - self.center) > self.radius)
        return bool(inside) if inside.ndim == 0 else inside


def key_domain(arc: ArcSegment, halfplane_tol: float = 1e-12) -> KeyDomain:
    length = arc.length
    if not MIN_ARC < length < TWO_PI - MIN_ARC:
        raise DegenerateArc("key domain needs 0 < |I| < 2 pi")
    if abs(length - math.pi) < halfplane_tol:
        return KeyDomain(arc, cmath.exp(1j * arc.mid), math.inf, "halfplane")
    # same point as (a + b) / (1 + cos|I|), without the cancellation near |I| = pi
    half = 0.5 * length
    c = cmath.exp(1j * arc.mid) / math.cos(half)
    radius = abs(math.tan(half))
    return KeyDomain(arc, c, radius, "disk" if length < math.pi else "exterior")


def in_key_domain(z, arc: ArcSegment):
    return key_domain(arc).contains(z)
