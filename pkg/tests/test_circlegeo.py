import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import quad

from siegel_lab import circlegeo as cg
from siegel_lab.circlegeo import ArcSegment, MoebiusMap, QuadArcConfig
from siegel_lab.errors import DegenerateArc, NotProperlyContained, OnCircle

angles = st.floats(0, 2 * math.pi, allow_nan=False)
lengths = st.floats(0.05, 2 * math.pi - 0.05)
inside = st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False)


def poisson_measure(z, arc):
    """2 pi times harmonic measure by direct quadrature of the Poisson kernel."""
    if abs(z) > 1:
        z = 1 / z.conjugate()
    f = lambda t: (1 - abs(z) ** 2) / abs(cmath.exp(1j * t) - z) ** 2
    return quad(f, arc.start, arc.start + arc.length, epsabs=1e-13, limit=200)[0]


def test_arc_basics():
    a = ArcSegment(-0.5, 0.5)
    assert a.length == pytest.approx(1.0)
    assert a.contains(0.0) and not a.contains(math.pi)
    assert a.contains(0.5, closed=True) and not a.contains(0.5)
    assert a.complement().length == pytest.approx(2 * math.pi - 1.0)
    assert a.rotate(math.pi).contains(math.pi)
    with pytest.raises(DegenerateArc):
        ArcSegment(1.0, 1.0)
    with pytest.raises(DegenerateArc):
        ArcSegment.from_start_length(0.0, 2 * math.pi)


def test_arc_split_and_lengths():
    cfg = QuadArcConfig.from_lengths(5.0, 0.5, 1.0, 1.5)
    total, lj, ll, lr = cfg.lengths
    assert (total, lj, ll, lr) == pytest.approx((3.0, 1.0, 0.5, 1.5))
    assert cg.cross_ratio_config(cfg) == pytest.approx(3.0 * 1.0 / (1.5 * 0.5))
    with pytest.raises(NotProperlyContained):
        cg.arc_split(ArcSegment(0, 1), ArcSegment(0.5, 1.5))


def test_three_point_map_hits_targets():
    z = (1 + 0j, 1j, -1 + 0j)
    g = cg.three_point_map(*z, complex(math.inf, 0), -1.0, 0.0)
    assert cmath.isinf(g(z[0]))
    assert g(z[1]) == pytest.approx(-1.0)
    assert abs(g(z[2])) < 1e-15


def test_on_circle_rejected():
    with pytest.raises(OnCircle):
        cg.disk_preserving_moebius(1j)


def test_shadow():
    arc = ArcSegment(0.0, 1.0)
    assert cg.shadow(cmath.exp(0.5j), arc)
    assert not cg.shadow(-1 + 0j, arc)
    assert cg.shadow(0.99 * cmath.exp(0.5j), arc)
    assert not cg.shadow(0j, arc)


@settings(max_examples=40, deadline=None)
@given(angles, lengths, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_mu_matches_poisson(start, length, z):
    assume(abs(abs(z) - 1) > 0.05)
    arc = ArcSegment.from_start_length(start, length)
    assert cg.mu_z(z, arc) == pytest.approx(poisson_measure(z, arc), abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(angles, lengths, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_key_domain_is_half_harmonic_measure(start, length, z):
    assume(abs(abs(z) - 1) > 1e-3)
    arc = ArcSegment.from_start_length(start, length)
    mu = cg.mu_z(z, arc)
    assume(abs(mu - math.pi) > 1e-9)
    assert cg.in_key_domain(z, arc) == (mu > math.pi)
    assert mu + cg.mu_z(z, arc.complement()) == pytest.approx(2 * math.pi, abs=1e-12)


def test_key_domain_kinds():
    assert cg.key_domain(ArcSegment.from_start_length(0, 1.0)).kind == "disk"
    half = cg.key_domain(ArcSegment.from_start_length(0, math.pi))
    assert half.kind == "halfplane" and half.contains(0.5j) and not half.contains(-0.5j)
    assert cg.key_domain(ArcSegment.from_start_length(0, 4.0)).kind == "exterior"


@settings(max_examples=50, deadline=None)
@given(inside, angles, inside, angles, inside)
def test_moebius_compose_inverse(c1, a1, c2, a2, w):
    f = cg.disk_automorphism(c1, a1)
    g = cg.disk_automorphism(c2, a2)
    assert f.compose(g)(w) == pytest.approx(f(g(w)), abs=1e-10)
    assert f.inverse()(f(w)) == pytest.approx(w, abs=1e-10)
    assert f.preserves_circle()


@settings(max_examples=40, deadline=None)
@given(inside, angles, inside)
def test_moebius_derivative_fd(c, a, w):
    f = cg.disk_automorphism(c, a)
    h = 1e-6
    fd = (f(w + h) - f(w - h)) / (2 * h)
    assert f.derivative(w) == pytest.approx(fd, rel=1e-6, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(inside, angles, angles, lengths)
def test_image_arc_matches_mu(c, a, start, length):
    arc = ArcSegment.from_start_length(start, length)
    f = cg.disk_automorphism(c, a)
    img = f.image_arc(arc)
    # f sends c to 0, and harmonic measure is conformally invariant
    assert img.length == pytest.approx(cg.mu_z(complex(c), arc), abs=1e-9)


def test_moebius_singular():
    with pytest.raises(ValueError):
        MoebiusMap(1, 2, 2, 4)
