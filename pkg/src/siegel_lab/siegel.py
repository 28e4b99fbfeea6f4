"""Linearizing series of P(z) = e^{2 pi i theta} z + z^2, invariant curves, cross-ratio diagnostics."""
from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .cfrac import RotationNumber
from .errors import RadiusTooLarge, SmallDivisorUnderflow, TooFewPoints, UnstableEstimate

TWO_PI = 2.0 * math.pi
SMALL_DIVISOR = 1e-13
EVAL_CUTOFF = 1e-18
# first-pass scale; tails of the scaled coefficients stay in double range for N up to a few thousand
_PILOT_SCALE = 0.25
_PILOT_TERMS = 400


@dataclass(frozen=True)
class LinearizingSeries:
    """sigma(w) = sum_{n>=1} b_n w^n with sigma(lam w) = lam sigma(w) + sigma(w)^2 and b_1 = 1.

    Coefficients are stored scaled, ``scaled[n] = b_n * scale**n``, because
    b_n itself grows like r^-n and overflows past a few hundred terms.
    """

    theta: RotationNumber
    lam: complex
    scale: float
    scaled: np.ndarray
    quad: complex = 1.0

    @property
    def N(self) -> int:
        return self.scaled.size - 1

    @property
    def coeffs(self) -> np.ndarray:
        """Unscaled b_0..b_N (b_0 = 0); may overflow to inf for large N."""
        n = np.arange(self.N + 1)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return self.scaled / self.scale ** n.astype(float)

    def log_abs_coeffs(self) -> np.ndarray:
        """log|b_n| for n = 1..N, computed without overflow."""
        n = np.arange(1, self.N + 1)
        return np.log(np.abs(self.scaled[1:])) - n * math.log(self.scale)

    def _terms_needed(self, rmax: float) -> int:
        ratio = rmax / self.scale
        with np.errstate(over="ignore", divide="ignore"):
            mag = np.log(np.abs(self.scaled[1:]) + 1e-300) + np.arange(1, self.N + 1) * math.log(max(ratio, 1e-300))
        keep = np.flatnonzero(mag >= math.log(EVAL_CUTOFF))
        return int(keep[-1]) + 1 if keep.size else 1

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        u = w / self.scale
        rmax = float(np.max(np.abs(w))) if w.size else 0.0
        n_use = self._terms_needed(rmax)
        acc = np.zeros(w.shape, dtype=complex)
        for c in self.scaled[n_use:0:-1]:
            acc = acc * u + c
        out = acc * u
        return out[()] if out.ndim == 0 else out

    def residual(self, radius: float, n_points: int = 256) -> float:
        """max over |w| = radius of |sigma(lam w) - lam sigma(w) - sigma(w)^2|."""
        w = radius * np.exp(1j * TWO_PI * np.arange(n_points) / n_points)
        s = self(w)
        with np.errstate(over="ignore", invalid="ignore"):
            r = np.abs(self(self.lam * w) - self.lam * s - self.quad * s * s)
        return float(np.max(np.where(np.isfinite(r), r, np.inf)))


def linearization_coeffs(theta: RotationNumber, N: int, scale: float | None = None, quad: complex = 1.0) -> LinearizingSeries:
    """Coefficients b_1..b_N from b_n = quad * sum_{i+j=n} b_i b_j / (lam^n - lam).

    ``quad`` is the z^2 coefficient of P(z) = lam z + quad z^2.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    lam = cmath.exp(1j * TWO_PI * theta.value)
    n = np.arange(2, N + 1)
    div = np.abs(np.exp(1j * TWO_PI * theta.value * n) - lam)
    if np.any(div < SMALL_DIVISOR):
        k = int(n[np.argmax(div < SMALL_DIVISOR)])
        raise SmallDivisorUnderflow(f"|lam^{k} - lam| < {SMALL_DIVISOR}")
    if scale is None:
        pilot_scale = _PILOT_SCALE / max(abs(quad), 1e-300)
        pilot = K.series(lam, quad, pilot_scale, min(N, _PILOT_TERMS))
        r_hat = _fit_radius(np.log(np.abs(pilot[1:])) - np.arange(1, pilot.size) * math.log(pilot_scale))
        scale = r_hat if math.isfinite(r_hat) and r_hat > 0 else pilot_scale
    c = K.series(lam, quad, float(scale), N)
    if not np.all(np.isfinite(c)):
        raise SmallDivisorUnderflow("scaled coefficients left double range")
    return LinearizingSeries(theta, lam, float(scale), c, complex(quad))


def _fit_radius(log_b: np.ndarray) -> float:
    """exp(-slope) of a least-squares line through log|b_n| over the upper half of n."""
    N = log_b.size
    n = np.arange(1, N + 1)
    lo = N // 2
    slope = np.polyfit(n[lo:], log_b[lo:], 1)[0]
    return float(math.exp(-slope))


@dataclass(frozen=True)
class RadiusEstimate:
    r_hat: float
    r_half: float
    drift: float


def conformal_radius(series: LinearizingSeries, max_drift: float = 0.01) -> RadiusEstimate:
    """Radius of convergence of sigma from the coefficient tail, compared against the N/2 fit."""
    if series.N < 500:
        raise ValueError("conformal_radius needs N >= 500")
    lb = series.log_abs_coeffs()
    full = _fit_radius(lb)
    half = _fit_radius(lb[: series.N // 2])
    drift = abs(full - half) / full
    if drift > max_drift:
        raise UnstableEstimate(f"radius fits at N/2 and N differ by {100 * drift:.2f}%")
    return RadiusEstimate(full, half, drift)


def gamma_orbit(series: LinearizingSeries, r: float, t0: float, K_: int, r_hat: float | None = None) -> np.ndarray:
    """z_k = sigma(lam^k r e^{i t0}) for k = 0..K_."""
    if r_hat is None:
        r_hat = conformal_radius(series, max_drift=1.0).r_hat
    if r > 0.99 * r_hat:
        raise RadiusTooLarge(f"r = {r} exceeds 0.99 * r_hat = {0.99 * r_hat}")
    k = np.arange(K_ + 1)
    # angles from k * theta reduced mod 1 keep lam^k accurate for large k
    ang = np.mod(k * series.theta.value, 1.0)
    return series(r * np.exp(1j * (t0 + TWO_PI * ang)))


def iterate_quadratic(lam: complex, z0: complex, K_: int, quad: complex = 1.0) -> np.ndarray:
    out = np.empty(K_ + 1, dtype=complex)
    z = complex(z0)
    out[0] = z
    for k in range(1, K_ + 1):
        z = lam * z + quad * z * z
        out[k] = z
    return out


# ---------------------------------------------------------------- cross ratios

def cross_ratio_abs(w1, w2, w3, w4):
    return np.abs((w1 - w3) * (w2 - w4) / ((w1 - w4) * (w2 - w3)))


def _thread_count() -> int:
    try:
        n = int(os.environ.get("SIEGEL_LAB_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _shard_min(points: np.ndarray, n: int, seed_seq: np.random.SeedSequence, stratum: tuple[int, int]) -> float:
    rng = np.random.default_rng(seed_seq)
    m = points.size
    lo, hi = stratum
    # first index from this stratum of the cyclic order, the other three anywhere after it
    i1 = rng.integers(lo, hi, n)
    rest = np.sort(np.stack([rng.choice(m - 1, 3, replace=False) for _ in range(n)]), axis=1) + 1
    idx = (i1[:, None] + np.concatenate([np.zeros((n, 1), dtype=int), rest], axis=1)) % m
    w = points[idx]
    return float(np.min(cross_ratio_abs(w[:, 0], w[:, 1], w[:, 2], w[:, 3])))


def cross_ratio_statistic(points, n_tuples: int, seed: int, shards: int = 8) -> float:
    """Min of |(w1-w3)(w2-w4)/((w1-w4)(w2-w3))| over random cyclically ordered 4-tuples.

    ``points`` must already be listed in cyclic (anticlockwise) order. Each
    shard draws its own tuples from a child of the master seed and owns one
    stratum of starting positions, so the result does not depend on threading.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.size < 4:
        raise TooFewPoints("need at least four points")
    shards = max(1, min(shards, n_tuples, pts.size))
    children = np.random.SeedSequence(seed).spawn(shards)
    bounds = np.linspace(0, pts.size, shards + 1).astype(int)
    counts = [n_tuples // shards + (1 if s < n_tuples % shards else 0) for s in range(shards)]
    jobs = [(pts, counts[s], children[s], (int(bounds[s]), int(max(bounds[s + 1], bounds[s] + 1)))) for s in range(shards) if counts[s]]
    with ThreadPoolExecutor(max_workers=min(_thread_count(), len(jobs))) as ex:
        mins = list(ex.map(lambda j: _shard_min(*j), jobs))
    return float(min(mins))


@dataclass(frozen=True)
class CrossRatioReport:
    r_grid: tuple
    min_v: tuple
    n_tuples: int
    seed: int
    r_hat: float

    @property
    def all_positive(self) -> bool:
        return all(v > 0 for v in self.min_v)

    @property
    def nonincreasing(self) -> bool:
        return all(a >= b for a, b in zip(self.min_v, self.min_v[1:]))

    def rows(self):
        return [(r, r * self.r_hat, v, self.n_tuples, self.seed) for r, v in zip(self.r_grid, self.min_v)]


def cross_ratio_report(series: LinearizingSeries, r_fracs, n_tuples: int = 10_000, seed: int = 0, n_points: int = 4096) -> CrossRatioReport:
    """min V on Gamma_r for r = frac * r_hat; points ordered by their conjugacy angle."""
    r_hat = conformal_radius(series, max_drift=1.0).r_hat
    t = TWO_PI * np.arange(n_points) / n_points
    mins = []
    for f in r_fracs:
        if f > 0.99:
            raise RadiusTooLarge(f"r/r_hat = {f} > 0.99")
        pts = series(f * r_hat * np.exp(1j * t))
        mins.append(cross_ratio_statistic(pts, n_tuples, seed))
    return CrossRatioReport(tuple(float(f) for f in r_fracs), tuple(mins), n_tuples, seed, r_hat)


# ---------------------------------------------------------------- rendering

def curve_points(series: LinearizingSeries, r: float, samples: int) -> np.ndarray:
    t = TWO_PI * np.arange(samples) / samples
    return series(r * np.exp(1j * t))


def polyline_is_simple(pts: np.ndarray) -> bool:
    """No two non-adjacent segments of the closed polyline cross (O(n^2) sweep in numpy)."""
    p = np.asarray(pts, dtype=complex)
    a, b = p, np.roll(p, -1)
    n = p.size

    def orient(x, y, z):
        return np.sign(((y - x).conjugate() * (z - x)).imag)

    for i in range(n):
        j = np.arange(i + 2, n)
        if i == 0:
            j = j[j != n - 1]
        if j.size == 0:
            continue
        o1 = orient(a[i], b[i], a[j])
        o2 = orient(a[i], b[i], b[j])
        o3 = orient(a[j], b[j], a[i])
        o4 = orient(a[j], b[j], b[i])
        if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
            return False
    return True


def rasterize(pts: np.ndarray, size: int = 1024, margin: float = 0.05) -> np.ndarray:
    """White RGB image with the closed polyline drawn in black over its bounding box."""
    pts = np.asarray(pts, dtype=complex)
    x, y = pts.real, pts.imag
    span = max(np.ptp(x), np.ptp(y), 1e-300)
    cx, cy = 0.5 * (x.max() + x.min()), 0.5 * (y.max() + y.min())
    half = 0.5 * span * (1.0 + 2.0 * margin)
    img = np.full((size, size, 3), 255, dtype=np.uint8)

    def to_px(u, v):
        col = (u - (cx - half)) / (2 * half) * (size - 1)
        row = ((cy + half) - v) / (2 * half) * (size - 1)
        return col, row

    nxt = np.roll(pts, -1)
    for a, b in zip(pts, nxt):
        c0, r0 = to_px(a.real, a.imag)
        c1, r1 = to_px(b.real, b.imag)
        steps = int(max(abs(c1 - c0), abs(r1 - r0))) + 1
        s = np.linspace(0.0, 1.0, steps + 1)
        cols = np.clip(np.rint(c0 + s * (c1 - c0)).astype(int), 0, size - 1)
        rows = np.clip(np.rint(r0 + s * (r1 - r0)).astype(int), 0, size - 1)
        img[rows, cols] = 0
    return img


def write_ppm(path, img: np.ndarray) -> None:
    h, w, _ = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())
