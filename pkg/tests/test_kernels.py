import numpy as np
import pytest

from siegel_lab import _kernels as K
from siegel_lab.blaschke import BlaschkeProduct, CircleLift

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture
def params():
    B = BlaschkeProduct.douady_ghys(0.37)
    L = CircleLift(B)
    return L.c0, L.p, L.a, L.spread


def _both(monkeypatch, fn, *args):
    monkeypatch.setattr(K, "USE_NUMBA", True)
    fast = fn(*args)
    monkeypatch.setattr(K, "USE_NUMBA", False)
    slow = fn(*args)
    return fast, slow


def test_lift_and_slope_agree(monkeypatch, params):
    c0, p, a, _ = params
    xs = np.linspace(-1.5, 2.5, 1001)
    f, s = _both(monkeypatch, K.lift, xs, c0, p, a)
    np.testing.assert_allclose(f, s, atol=1e-13)
    f, s = _both(monkeypatch, K.slope, xs, p, a)
    np.testing.assert_allclose(f, s, atol=1e-12)


def test_orbit_and_forward_agree(monkeypatch, params):
    c0, p, a, _ = params
    (ff, fw), (sf, sw) = _both(monkeypatch, K.orbit, 0.1, 5000, c0, p, a)
    np.testing.assert_array_equal(fw, sw)
    np.testing.assert_allclose(ff, sf, atol=1e-9)
    (ff, fw), (sf, sw) = _both(monkeypatch, K.forward, np.array([0.0, 0.3, 0.9]), 777, c0, p, a)
    np.testing.assert_array_equal(fw, sw)
    np.testing.assert_allclose(ff, sf, atol=1e-9)


def test_inverse_and_backward_agree(monkeypatch, params):
    c0, p, a, spread = params
    ys = np.linspace(-0.5, 1.5, 301)
    f, s = _both(monkeypatch, K.inverse, ys, c0, p, a, spread)
    np.testing.assert_allclose(f, s, atol=1e-13)
    np.testing.assert_allclose(K.lift(f, c0, p, a), ys, atol=1e-13)
    (ff, fw), (sf, sw) = _both(monkeypatch, K.backward, np.array([0.2, 0.7]), 50, c0, p, a, spread)
    np.testing.assert_array_equal(fw, sw)
    np.testing.assert_allclose(ff, sf, atol=1e-10)


def test_series_agree(monkeypatch):
    lam = np.exp(2j * np.pi * 0.618034)
    f, s = _both(monkeypatch, K.series, lam, 1.0, 0.3, 300)
    np.testing.assert_allclose(f, s, rtol=1e-12, atol=1e-300)


def test_env_flag(monkeypatch):
    monkeypatch.setenv("SIEGEL_LAB_NUMBA", "0")
    assert not K._numba_requested()
    monkeypatch.setenv("SIEGEL_LAB_NUMBA", "1")
    assert K._numba_requested()
