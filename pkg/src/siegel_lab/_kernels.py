"""Hot inner loops: circle-lift iteration/inversion and series recursions.

Every kernel has a pure-numpy implementation and, when numba is importable,
an ``@njit`` twin. Set ``SIEGEL_LAB_NUMBA=0`` to force the numpy path.

A Blaschke lift is parametrised by ``(c0, p, a)``: a constant shift in turns,
the interior zeros ``p`` and the reflected exterior zeros ``a = 1/conj(q)``.
Its value is

    F(x) = x + c0 + (1/pi) * (sum_i arg(1 - p_i e^{-2 pi i x}) - sum_j arg(1 - a_j e^{-2 pi i x}))

which is continuous with F(x + 1) = F(x) + 1 and needs no branch tracking.
Orbits are carried as (fractional part, integer winding) pairs.
"""
from __future__ import annotations

import math
import os

import numpy as np

TWO_PI = 2.0 * math.pi
_BISECT_STEPS = 64


def _numba_requested() -> bool:
    return os.environ.get("SIEGEL_LAB_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


# ---------------------------------------------------------------- numpy path

def np_lift(x, c0, p, a):
    x = np.asarray(x, dtype=float)
    phi = TWO_PI * x
    e = np.exp(-1j * phi)[..., None]
    s = np.angle(1.0 - p * e).sum(axis=-1) - np.angle(1.0 - a * e).sum(axis=-1)
    return x + c0 + s / math.pi


def np_slope(x, p, a):
    z = np.exp(1j * TWO_PI * np.asarray(x, dtype=float))[..., None]
    pos = ((1.0 - np.abs(p) ** 2) / np.abs(z - p) ** 2).sum(axis=-1)
    neg = ((1.0 - np.abs(a) ** 2) / np.abs(z - a) ** 2).sum(axis=-1)
    return pos - neg


def _split(y):
    fl = np.floor(y)
    return y - fl, fl.astype(np.int64)


def np_forward(xs, n, c0, p, a):
    frac, wind = _split(np.asarray(xs, dtype=float))
    for _ in range(n):
        f, w = _split(np_lift(frac, c0, p, a))
        frac = f
        wind = wind + w
    return frac, wind


def np_orbit(x0, n, c0, p, a):
    """Sequential orbit of one point; scalar math to keep per-step cost low."""
    fl = math.floor(x0)
    x = x0 - fl
    wind = int(fl)
    fracs = np.empty(n + 1)
    winds = np.empty(n + 1, dtype=np.int64)
    fracs[0] = x
    winds[0] = wind
    pr = [complex(v) for v in p]
    ar = [complex(v) for v in a]
    for k in range(1, n + 1):
        phi = TWO_PI * x
        c = math.cos(phi)
        s = math.sin(phi)
        acc = 0.0
        for u in pr:
            acc += math.atan2(u.real * s - u.imag * c, 1.0 - u.real * c - u.imag * s)
        for u in ar:
            acc -= math.atan2(u.real * s - u.imag * c, 1.0 - u.real * c - u.imag * s)
        y = x + c0 + acc / math.pi
        f = math.floor(y)
        x = y - f
        wind += int(f)
        fracs[k] = x
        winds[k] = wind
    return fracs, winds


def np_inverse(ys, c0, p, a, spread):
    """Solve F(x) = y by bracketed bisection, vectorised over ``ys``."""
    ys = np.asarray(ys, dtype=float)
    lo = ys - c0 - spread - 1e-12
    hi = ys - c0 + spread + 1e-12
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        below = np_lift(mid, c0, p, a) < ys
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def np_backward(xs, n, c0, p, a, spread):
    frac, wind = _split(np.asarray(xs, dtype=float))
    for _ in range(n):
        f, w = _split(np_inverse(frac, c0, p, a, spread))
        frac = f
        wind = wind + w
    return frac, wind


def np_series(lam, quad, scale, n_terms):
    """Scaled coefficients c_n = b_n scale^n of sigma(lam w) = lam sigma + quad sigma^2."""
    c = np.zeros(n_terms + 1, dtype=complex)
    c[1] = scale
    lam_pow = lam
    for n in range(2, n_terms + 1):
        lam_pow = lam_pow * lam
        c[n] = quad * np.dot(c[1:n], c[n - 1:0:-1]) / (lam_pow - lam)
    return c


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True, fastmath=False)

    @_jit
    def _nb_lift1(x, c0, p, a):
        phi = TWO_PI * x
        c = math.cos(phi)
        s = math.sin(phi)
        acc = 0.0
        for u in p:
            acc += math.atan2(u.real * s - u.imag * c, 1.0 - u.real * c - u.imag * s)
        for u in a:
            acc -= math.atan2(u.real * s - u.imag * c, 1.0 - u.real * c - u.imag * s)
        return x + c0 + acc / math.pi

    @_jit
    def nb_lift(x, c0, p, a):
        out = np.empty(x.size)
        xf = x.ravel()
        for i in range(xf.size):
            out[i] = _nb_lift1(xf[i], c0, p, a)
        return out.reshape(x.shape)

    @_jit
    def nb_slope(x, p, a):
        xf = x.ravel()
        out = np.empty(xf.size)
        for i in range(xf.size):
            z = complex(math.cos(TWO_PI * xf[i]), math.sin(TWO_PI * xf[i]))
            acc = 0.0
            for u in p:
                acc += (1.0 - abs(u) ** 2) / abs(z - u) ** 2
            for u in a:
                acc -= (1.0 - abs(u) ** 2) / abs(z - u) ** 2
            out[i] = acc
        return out.reshape(x.shape)

    @_jit
    def nb_orbit(x0, n, c0, p, a):
        fracs = np.empty(n + 1)
        winds = np.empty(n + 1, dtype=np.int64)
        f = math.floor(x0)
        x = x0 - f
        wind = np.int64(f)
        fracs[0] = x
        winds[0] = wind
        for k in range(1, n + 1):
            y = _nb_lift1(x, c0, p, a)
            f = math.floor(y)
            x = y - f
            wind += np.int64(f)
            fracs[k] = x
            winds[k] = wind
        return fracs, winds

    @_jit
    def nb_forward(xs, n, c0, p, a):
        m = xs.size
        fracs = np.empty(m)
        winds = np.empty(m, dtype=np.int64)
        for i in range(m):
            f = math.floor(xs[i])
            x = xs[i] - f
            wind = np.int64(f)
            for _ in range(n):
                y = _nb_lift1(x, c0, p, a)
                f = math.floor(y)
                x = y - f
                wind += np.int64(f)
            fracs[i] = x
            winds[i] = wind
        return fracs, winds

    @_jit
    def _nb_inverse1(y, c0, p, a, spread):
        lo = y - c0 - spread - 1e-12
        hi = y - c0 + spread + 1e-12
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if _nb_lift1(mid, c0, p, a) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    @_jit
    def nb_inverse(ys, c0, p, a, spread):
        out = np.empty(ys.size)
        for i in range(ys.size):
            out[i] = _nb_inverse1(ys[i], c0, p, a, spread)
        return out

    @_jit
    def nb_backward(xs, n, c0, p, a, spread):
        m = xs.size
        fracs = np.empty(m)
        winds = np.empty(m, dtype=np.int64)
        for i in range(m):
            f = math.floor(xs[i])
            x = xs[i] - f
            wind = np.int64(f)
            for _ in range(n):
                y = _nb_inverse1(x, c0, p, a, spread)
                f = math.floor(y)
                x = y - f
                wind += np.int64(f)
            fracs[i] = x
            winds[i] = wind
        return fracs, winds

    @_jit
    def nb_series(lam, quad, scale, n_terms):
        c = np.zeros(n_terms + 1, dtype=np.complex128)
        c[1] = scale
        lam_pow = lam
        for n in range(2, n_terms + 1):
            lam_pow = lam_pow * lam
            acc = 0j
            for i in range(1, n):
                acc += c[i] * c[n - i]
            c[n] = quad * acc / (lam_pow - lam)
        return c


# ---------------------------------------------------------------- dispatch

def _as_params(p, a):
    return np.ascontiguousarray(p, dtype=np.complex128), np.ascontiguousarray(a, dtype=np.complex128)


def _shaped(x, out):
    return out.reshape(np.shape(x)) if np.ndim(x) == 0 else out


def lift(x, c0, p, a):
    p, a = _as_params(p, a)
    if USE_NUMBA:
        return _shaped(x, nb_lift(np.ascontiguousarray(x, dtype=float), float(c0), p, a))
    return np_lift(x, c0, p, a)


def slope(x, p, a):
    p, a = _as_params(p, a)
    if USE_NUMBA:
        return _shaped(x, nb_slope(np.ascontiguousarray(x, dtype=float), p, a))
    return np_slope(x, p, a)


def orbit(x0, n, c0, p, a):
    p, a = _as_params(p, a)
    if USE_NUMBA:
        return nb_orbit(float(x0), int(n), float(c0), p, a)
    return np_orbit(float(x0), int(n), float(c0), p, a)


def forward(xs, n, c0, p, a):
    p, a = _as_params(p, a)
    xs = np.ascontiguousarray(np.atleast_1d(xs), dtype=float)
    if USE_NUMBA:
        return nb_forward(xs, int(n), float(c0), p, a)
    return np_forward(xs, int(n), float(c0), p, a)


def inverse(ys, c0, p, a, spread):
    p, a = _as_params(p, a)
    ys = np.ascontiguousarray(np.atleast_1d(ys), dtype=float)
    if USE_NUMBA:
        return nb_inverse(ys, float(c0), p, a, float(spread))
    return np_inverse(ys, c0, p, a, spread)


def backward(xs, n, c0, p, a, spread):
    p, a = _as_params(p, a)
    xs = np.ascontiguousarray(np.atleast_1d(xs), dtype=float)
    if USE_NUMBA:
        return nb_backward(xs, int(n), float(c0), p, a, float(spread))
    return np_backward(xs, int(n), float(c0), p, a, spread)


def series(lam, quad, scale, n_terms):
    if USE_NUMBA:
        return nb_series(complex(lam), complex(quad), complex(scale), int(n_terms))
    return np_series(complex(lam), complex(quad), complex(scale), int(n_terms))
