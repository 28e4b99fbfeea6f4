"""Blaschke products with d zeros inside and d-1 zeros outside the unit disk, and their circle dynamics."""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .cfrac import RotationNumber
from .circlegeo import TWO_PI, ArcSegment, MoebiusMap
from .errors import (
    AtPole,
    BisectionFailure,
    ConfigError,
    NoBracket,
    NotHomeomorphism,
    NotMonotone,
    RootFindingFailure,
)

ZERO_MARGIN = 1e-9
HOMEO_TOL = 1e-6
DEFAULT_ITER = 2**16


@dataclass(frozen=True)
class BlaschkeProduct:
    """lam * prod (z - p_i)/(1 - conj(p_i) z) * prod (z - q_j)/(1 - conj(q_j) z)."""

    lam: complex
    interior_zeros: tuple
    exterior_zeros: tuple

    def __post_init__(self):
        lam = complex(self.lam)
        p = tuple(complex(v) for v in self.interior_zeros)
        q = tuple(complex(v) for v in self.exterior_zeros)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise ConfigError(f"|lambda| = {abs(lam)} is not 1")
        if len(p) < 2:
            raise ConfigError("need d >= 2 interior zeros (degree m = 2d - 1 >= 3)")
        if len(q) != len(p) - 1:
            raise ConfigError(f"need d - 1 = {len(p) - 1} exterior zeros, got {len(q)}")
        if any(abs(v) >= 1.0 - ZERO_MARGIN for v in p):
            raise ConfigError("interior zeros must satisfy |p| < 1 - 1e-9")
        if any(abs(v) <= 1.0 + ZERO_MARGIN or not cmath.isfinite(v) for v in q):
            raise ConfigError("exterior zeros must be finite with |q| > 1 + 1e-9")
        object.__setattr__(self, "lam", lam / abs(lam))
        object.__setattr__(self, "interior_zeros", p)
        object.__setattr__(self, "exterior_zeros", q)

    # -- construction -------------------------------------------------
    @classmethod
    def from_herman(cls, lam: complex, d: int, a) -> "BlaschkeProduct":
        """lam z^d prod (1 - conj(a_i) z)/(z - a_i), with 0 < |a_i| < 1."""
        a = [complex(v) for v in a]
        if len(a) != d - 1:
            raise ConfigError(f"Herman form with d={d} needs {d - 1} parameters a_i")
        if any(v == 0 or abs(v) >= 1.0 for v in a):
            raise ConfigError("Herman parameters need 0 < |a_i| < 1")
        # (1 - conj(a) z)/(z - a) = (conj(a)/a) (z - q)/(1 - conj(q) z) with q = 1/conj(a)
        factor = complex(lam)
        for v in a:
            factor *= v.conjugate() / v
        return cls(factor, (0j,) * d, tuple(1.0 / v.conjugate() for v in a))

    @classmethod
    def douady_ghys(cls, t: float = 0.0, q: float = 3.0) -> "BlaschkeProduct":
        """The cubic e^{2 pi i t} z^2 (z - q)/(1 - q z); for q = 3 it has a critical point at z = 1."""
        return cls(cmath.exp(1j * TWO_PI * t), (0j, 0j), (complex(q),))

    def rotated(self, t: float) -> "BlaschkeProduct":
        """e^{2 pi i t} B."""
        return BlaschkeProduct(self.lam * cmath.exp(1j * TWO_PI * t), self.interior_zeros, self.exterior_zeros)

    # -- basic data -----------------------------------------------------
    @property
    def d(self) -> int:
        return len(self.interior_zeros)

    @property
    def m(self) -> int:
        return 2 * self.d - 1

    @property
    def zeros(self) -> np.ndarray:
        return np.array(self.interior_zeros + self.exterior_zeros, dtype=complex)

    @property
    def poles(self) -> np.ndarray:
        z = self.zeros
        z = z[z != 0]
        return 1.0 / np.conj(z)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        num = np.full(z.shape, self.lam, dtype=complex)
        den = np.ones(z.shape, dtype=complex)
        for v in self.zeros:
            num = num * (z - v)
            den = den * (1.0 - np.conj(v) * z)
        if np.any(den == 0):
            raise AtPole("evaluation at a pole")
        out = num / den
        return out[()] if out.ndim == 0 else out

    def derivative(self, z):
        """B'(z) = B(z) * sum_v [1/(z - v) + conj(v)/(1 - conj(v) z)]."""
        z = np.asarray(z, dtype=complex)
        vs = self.zeros
        if np.any(np.isin(z, vs)):
            # at a zero use the plain product rule on the numerator
            return self._derivative_product_rule(z)
        b = np.asarray(self(z))
        s = np.zeros(z.shape, dtype=complex)
        for v in vs:
            s = s + 1.0 / (z - v) + np.conj(v) / (1.0 - np.conj(v) * z)
        out = b * s
        return out[()] if out.ndim == 0 else out

    def _derivative_product_rule(self, z):
        N, D = self.polynomials()
        num = np.polyval(np.polyder(N), z) * np.polyval(D, z) - np.polyval(N, z) * np.polyval(np.polyder(D), z)
        den = np.polyval(D, z) ** 2
        if np.any(den == 0):
            raise AtPole("derivative at a pole")
        return num / den

    def polynomials(self) -> tuple[np.ndarray, np.ndarray]:
        """Numerator and denominator coefficient arrays (highest degree first)."""
        vs = self.zeros
        N = self.lam * np.poly(vs)
        D = np.array([1.0 + 0j])
        for v in vs:
            D = np.polymul(D, np.array([-np.conj(v), 1.0]))
        return N, D

    def angular_derivative(self, z):
        """z B'(z)/B(z) on the unit circle (real)."""
        return K.slope(np.angle(np.asarray(z, dtype=complex)) / TWO_PI, *self.lift_params()[1:])

    # -- lift parametrisation -------------------------------------------
    def lift_params(self) -> tuple[float, np.ndarray, np.ndarray]:
        p = np.array(self.interior_zeros, dtype=complex)
        a = 1.0 / np.conj(np.array(self.exterior_zeros, dtype=complex))
        c0 = (cmath.phase(self.lam) + 2.0 * float(np.sum(np.angle(a)))) / TWO_PI
        return c0, p, a

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "lambda_angle": cmath.phase(self.lam),
            "interior_zeros": [[v.real, v.imag] for v in self.interior_zeros],
            "exterior_zeros": [[v.real, v.imag] for v in self.exterior_zeros],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BlaschkeProduct":
        try:
            lam = cmath.exp(1j * float(data["lambda_angle"]))
            p = [complex(float(x), float(y)) for x, y in data["interior_zeros"]]
            q = [complex(float(x), float(y)) for x, y in data["exterior_zeros"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed Blaschke product: {exc}") from exc
        return cls(lam, tuple(p), tuple(q))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "BlaschkeProduct":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------- circle lift

@dataclass(frozen=True)
class CircleLift:
    """Lift F of B|T in turns: exp(2 pi i F(x)) = B(exp(2 pi i x)), F(x + 1) = F(x) + 1.

    A nonzero ``offset`` lifts e^{2 pi i offset} B instead, continuously in the offset.
    """

    B: BlaschkeProduct
    grid_size: int = 2**14
    offset: float = 0.0
    c0: float = field(init=False)
    p: np.ndarray = field(init=False, repr=False)
    a: np.ndarray = field(init=False, repr=False)
    spread: float = field(init=False)
    min_slope: float = field(init=False)

    def __post_init__(self):
        c0, p, a = self.B.lift_params()
        object.__setattr__(self, "c0", c0 + self.offset)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "a", a)
        spread = (np.sum(np.arcsin(np.abs(p))) + np.sum(np.arcsin(np.abs(a)))) / math.pi
        object.__setattr__(self, "spread", float(spread))
        xs = np.arange(self.grid_size) / self.grid_size
        ms = float(np.min(K.slope(xs, p, a)))
        object.__setattr__(self, "min_slope", ms)
        if ms < -HOMEO_TOL:
            raise NotHomeomorphism(f"angular derivative reaches {ms:.3e} < -1e-6")

    def shifted(self, t: float) -> "CircleLift":
        return CircleLift(self.B, self.grid_size, self.offset + t)

    @property
    def map(self) -> BlaschkeProduct:
        return self.B.rotated(self.offset) if self.offset else self.B

    def __call__(self, x):
        return K.lift(np.asarray(x, dtype=float), self.c0, self.p, self.a)

    def slope(self, x):
        return K.slope(np.asarray(x, dtype=float), self.p, self.a)

    def inverse(self, y):
        return K.inverse(y, self.c0, self.p, self.a, self.spread)

    def iterate(self, x, n: int):
        """F^n(x) as (fractional part, integer part) arrays."""
        return K.forward(x, n, self.c0, self.p, self.a)

    def iterate_back(self, x, n: int):
        return K.backward(x, n, self.c0, self.p, self.a, self.spread)

    def orbit(self, x0: float, n: int):
        """x_0..x_n of F as (fractions, windings)."""
        return K.orbit(x0, n, self.c0, self.p, self.a)

    def _slope_prime(self, x):
        """d/dx of the angular derivative (turn units)."""
        z = np.exp(1j * TWO_PI * np.asarray(x, dtype=float))[..., None]
        def part(v):
            w = (1.0 - np.abs(v) ** 2) * 2.0 * np.imag(np.conj(v) * z) / np.abs(z - v) ** 4
            return -TWO_PI * w.sum(axis=-1)
        return part(self.p) - part(self.a)

    def critical_points(self, tol: float = 1e-7) -> np.ndarray:
        """Points of T (in turns) where the angular derivative vanishes to ``tol``.

        Grid minima are refined by bisection on the sign of the slope's derivative.
        """
        n = self.grid_size
        xs = np.arange(n) / n
        s = self.slope(xs)
        local = (s <= np.roll(s, 1)) & (s <= np.roll(s, -1)) & (s < 1e-3)
        found = []
        for i in np.flatnonzero(local):
            lo, hi = (i - 1) / n, (i + 1) / n
            if self._slope_prime(lo) > 0 or self._slope_prime(hi) < 0:
                x = xs[i]
            else:
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if self._slope_prime(mid) < 0:
                        lo = mid
                    else:
                        hi = mid
                x = 0.5 * (lo + hi)
            if abs(float(np.ravel(self.slope(x))[0])) <= tol:
                x = x % 1.0
                if not any(min(abs(x - y), 1 - abs(x - y)) < 1e-9 for y in found):
                    found.append(x)
        return np.array(sorted(found))


def circle_lift(B: BlaschkeProduct, grid_size: int = 2**14) -> CircleLift:
    return CircleLift(B, grid_size)


def rotation_number(L: CircleLift, n: int = DEFAULT_ITER, x0: float = 0.0) -> float:
    """(F^n(x0) - x0)/n; within 1/n of the true rotation number."""
    frac, wind = L.iterate(np.array([x0]), n)
    return float(((wind[0] - math.floor(x0)) + (frac[0] - (x0 - math.floor(x0)))) / n)


def closest_return_times(L: CircleLift, n: int, x0: float = 0.0) -> list[int]:
    """Times k <= n at which the orbit of x0 comes closer to x0 than ever before."""
    fr, _ = L.orbit(x0, n)
    d = np.abs(fr[1:] - fr[0])
    d = np.minimum(d, 1.0 - d)
    best = np.minimum.accumulate(d)
    rec = np.flatnonzero(d < np.concatenate([[np.inf], best[:-1]]))
    return [int(k) + 1 for k in rec]


# ---------------------------------------------------------------- tuning

@dataclass(frozen=True)
class TuneResult:
    t: float
    B: BlaschkeProduct
    rho_hat: float
    error_bound: float
    iterations: int
    certified_depth: int


def _compare_rotation(L: CircleLift, target: RotationNumber, offset: int, n_max: int):
    """Sign of rho(F) - (theta + offset) from a single orbit of 0.

    For a convergent p/q below theta, F^q(0) <= p + offset*q forces rho <= p/q;
    above theta, F^q(0) >= p + offset*q forces rho >= p/q. Returns (sign, depth)
    with sign 0 when every usable convergent is inconclusive.
    """
    qs, ps = target.q, target.p
    ks = [k for k in range(1, len(qs)) if qs[k] <= n_max]
    if not ks:
        raise ValueError("orbit budget shorter than q_1")
    fr, wd = L.orbit(0.0, qs[ks[-1]])
    for k in ks:
        q = qs[k]
        excess = (wd[q] - (ps[k] + offset * q)) + fr[q]
        if k % 2 == 0 and excess <= 0.0:
            return -1, k
        if k % 2 == 1 and excess >= 0.0:
            return 1, k
    return 0, ks[-1]


def rotation_profile(B0: BlaschkeProduct, ts, n: int = 4096) -> np.ndarray:
    """Lifted rotation numbers of e^{2 pi i t} B0, continuous (nondecreasing) in t."""
    L0 = CircleLift(B0)
    return np.array([rotation_number(L0.shifted(t), n) for t in ts])


def tune_to_rotation(
    B0: BlaschkeProduct,
    theta: RotationNumber,
    tol: float = 1e-10,
    n_iter: int = 10**6,
    max_steps: int = 60,
    profile_points: int = 64,
) -> TuneResult:
    """Find t in [0, 1) with rho(e^{2 pi i t} B0) = theta (mod 1) to within ``tol``."""
    L0 = CircleLift(B0)
    if profile_points:
        ts = np.arange(profile_points) / profile_points
        drops = np.diff(rotation_profile(B0, ts, 4096))
        if np.any(drops < -2.0 / 4096):
            raise NotMonotone(f"rho(t) decreases by {-drops.min():.3e}")
    # rho(c0 + t + g) lies within spread of c0 + t, so this interval brackets theta
    lo = theta.value - L0.c0 - L0.spread - 1e-9
    hi = theta.value - L0.c0 + L0.spread + 1e-9
    s_lo, _ = _compare_rotation(L0.shifted(lo), theta, 0, n_iter)
    s_hi, _ = _compare_rotation(L0.shifted(hi), theta, 0, n_iter)
    if s_lo > 0 or s_hi < 0:
        raise NoBracket("theta is not bracketed by the rotation family")
    t = None
    depth = 0
    steps = 0
    for steps in range(1, max_steps + 1):
        mid = 0.5 * (lo + hi)
        sign, depth = _compare_rotation(L0.shifted(mid), theta, 0, n_iter)
        if sign == 0:
            t = mid
            break
        if sign < 0:
            lo = mid
        else:
            hi = mid
    if t is None:
        t = lo
    qd = theta.q
    bound = 1.0 / (qd[depth] * qd[depth + 1]) if depth + 1 < len(qd) else 1.0 / qd[depth] ** 2
    if bound > tol:
        raise BisectionFailure(f"could not certify |rho - theta| <= {tol} (bound {bound:.2e})")
    rho_hat = rotation_number(L0.shifted(t), min(n_iter, DEFAULT_ITER))
    t = t % 1.0
    Bt = B0.rotated(t)
    return TuneResult(t, Bt, rho_hat, bound, steps, depth)


# ---------------------------------------------------------------- arcs and critical data

def pullback_arc(L: CircleLift, arc: ArcSegment, k: int, tol: float = 1e-9) -> ArcSegment:
    """(B|T)^{-k}(arc), endpoint by endpoint."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return arc
    ends = np.array([arc.start, arc.end]) / TWO_PI
    fr, _ = L.iterate_back(ends, k)
    back, _ = L.iterate(fr, k)
    err = np.abs(back - ends)
    err = np.minimum(err, 1.0 - err)
    if np.any(err * TWO_PI > tol):
        raise BisectionFailure(f"pullback endpoints return with error {err.max() * TWO_PI:.2e}")
    return ArcSegment(TWO_PI * fr[0], TWO_PI * fr[1])


def critical_points(B: BlaschkeProduct) -> np.ndarray:
    """Finite zeros of N'D - N D'; a degree drop below 2m - 2 means critical points at infinity."""
    N, D = B.polynomials()
    P = np.polysub(np.polymul(np.polyder(N), D), np.polymul(N, np.polyder(D)))
    P = np.trim_zeros(np.where(np.abs(P) < 1e-14 * np.max(np.abs(P)), 0, P), "f")
    try:
        roots = np.roots(P)
    except np.linalg.LinAlgError as exc:
        raise RootFindingFailure(str(exc)) from exc
    if not np.all(np.isfinite(roots)):
        raise RootFindingFailure("non-finite critical points")
    n_inf = (2 * B.m - 2) - (len(P) - 1)
    return np.concatenate([roots, np.full(n_inf, complex(np.inf, 0.0))])


def _value_at_infinity(B: BlaschkeProduct) -> complex:
    b0 = complex(B(0.0))
    return complex(np.inf, 0.0) if b0 == 0 else 1.0 / b0.conjugate()


def critical_values(B: BlaschkeProduct, tol: float = 1e-8) -> np.ndarray:
    """Distinct critical values, with infinity represented as complex(inf, 0)."""
    out: list[complex] = []
    for c in critical_points(B):
        v = _value_at_infinity(B) if cmath.isinf(c) else complex(B(c))
        if cmath.isinf(v):
            if not any(cmath.isinf(w) for w in out):
                out.append(complex(np.inf, 0.0))
            continue
        if not any((not cmath.isinf(w)) and abs(w - v) <= tol for w in out):
            out.append(v)
    if len(out) > 2 * B.m - 2:
        raise RootFindingFailure("more critical values than 2m - 2")
    return np.array(out, dtype=complex)


def conjugate(B: BlaschkeProduct, g: MoebiusMap) -> BlaschkeProduct:
    """g o B o g^{-1} for a Moebius g preserving the unit disk.

    Zeros of the conjugate are g(B^{-1}(w0)) with w0 = g^{-1}(0); the d
    preimages inside the disk become interior zeros.
    """
    ginv = g.inverse()
    w0 = complex(ginv(0.0))
    N, D = B.polynomials()
    P = np.polysub(N, w0 * D)
    lead_small = abs(P[0]) < 1e-13 * np.max(np.abs(P))
    roots = np.roots(np.trim_zeros(np.where(np.abs(P) < 1e-15 * np.max(np.abs(P)), 0, P), "f"))
    images = [complex(g(r)) for r in roots]
    if lead_small or len(roots) < B.m:
        images.extend([complex(g(complex(np.inf, 0.0)))] * (B.m - len(roots)))
    images.sort(key=abs)
    inner, outer = images[: B.d], images[B.d:]
    if abs(inner[-1]) >= 1.0 or abs(outer[0]) <= 1.0:
        raise RootFindingFailure("preimages do not split d inside / d - 1 outside")
    probe = np.exp(1j * TWO_PI * np.array([0.1, 0.35, 0.6, 0.85]))
    target = g(B(ginv(probe)))
    shape = BlaschkeProduct(1.0, tuple(inner), tuple(outer))(probe)
    ratio = target / shape
    lam = complex(np.mean(ratio / np.abs(ratio)))
    return BlaschkeProduct(lam / abs(lam), tuple(inner), tuple(outer))


@dataclass(frozen=True)
class RigidRotation:
    """x -> x + theta, with the same interface as CircleLift (turn units)."""

    theta: float
    offset: float = 0.0

    @property
    def c0(self) -> float:
        return self.theta + self.offset

    @property
    def map(self):
        return None

    def shifted(self, t: float) -> "RigidRotation":
        return RigidRotation(self.theta, self.offset + t)

    def __call__(self, x):
        return np.asarray(x, dtype=float) + self.c0

    def slope(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def inverse(self, y):
        return np.atleast_1d(np.asarray(y, dtype=float)) - self.c0

    def iterate(self, x, n: int):
        y = np.atleast_1d(np.asarray(x, dtype=float)) + n * self.c0
        fl = np.floor(y)
        return y - fl, fl.astype(np.int64)

    def iterate_back(self, x, n: int):
        return self.iterate(x, -n)

    def orbit(self, x0: float, n: int):
        y = x0 + np.arange(n + 1) * self.c0
        fl = np.floor(y)
        return y - fl, fl.astype(np.int64)

    def critical_points(self, tol: float = 1e-7) -> np.ndarray:
        return np.empty(0)
