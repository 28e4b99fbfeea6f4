import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from siegel_lab import blaschke as bl
from siegel_lab import linearize as lz
from siegel_lab.cfrac import parse_theta
from siegel_lab.circlegeo import TWO_PI, ArcSegment, disk_automorphism
from siegel_lab.errors import NoConvergence, OrderMismatch
from siegel_lab.verify import tuned_douady_ghys

GOLDEN = parse_theta("golden")


@pytest.fixture(scope="module")
def tuned():
    return tuned_douady_ghys()


@pytest.fixture(scope="module")
def lift(tuned):
    return bl.CircleLift(tuned.B)


def test_measure_validation():
    with pytest.raises(ValueError):
        lz.EmpiricalCircleMeasure(np.array([0.0, 1.0]), np.array([0.5, 0.4]))
    with pytest.raises(ValueError):
        lz.EmpiricalCircleMeasure(np.array([0.0, 1.0]), np.array([1.5, -0.5]))
    mu = lz.EmpiricalCircleMeasure.uniform_atoms([0.0, 1.0, 2.0, 3.0])
    assert mu.mass(ArcSegment(0.5, 2.5)) == pytest.approx(0.5)
    assert mu.mass(ArcSegment(0.0, 1.0)) == pytest.approx(0.5)  # closed arcs


def test_invariant_measure(lift):
    N = 2**14
    mu = lz.empirical_invariant_measure(lift, N)
    rng = np.random.default_rng(0)
    for arc in lz.random_arcs(rng, 30):
        pulled = bl.pullback_arc(lift, arc, 1)
        assert abs(mu.mass(arc) - mu.mass(pulled)) <= 2.0 / N


def test_uniform_barycenter():
    mu = lz.EmpiricalCircleMeasure.uniform_atoms(np.arange(1000) * TWO_PI / 1000)
    assert abs(lz.barycenter(mu).z) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 0.85), st.floats(0, TWO_PI), st.floats(0, TWO_PI))
def test_barycenter_of_moved_uniform(r, arg, rot):
    # oracle: the barycenter of g_* (uniform) is g(0)
    g = disk_automorphism(r * np.exp(1j * arg), rot)
    mu = lz.EmpiricalCircleMeasure.uniform_atoms(np.arange(512) * TWO_PI / 512).pushforward(g)
    assert lz.barycenter(mu).z == pytest.approx(complex(g(0j)), abs=1e-9)


def test_barycenter_symmetric_measure_is_real():
    ang = np.array([0.3, 1.0, 2.5])
    mu = lz.EmpiricalCircleMeasure(np.concatenate([ang, -ang]), np.array([0.1, 0.2, 0.2, 0.1, 0.2, 0.2]))
    z = lz.barycenter(mu).z
    assert abs(z.imag) < 1e-13 and abs(mu.field(z)) < 1e-13


def test_barycenter_no_convergence():
    mu = lz.EmpiricalCircleMeasure(np.array([0.0, 0.1]), np.array([0.5, 0.5]))
    with pytest.raises(NoConvergence):
        lz.barycenter(mu, max_steps=1)


def test_centered_arc_bound_values():
    assert lz.centered_arc_bound(0.0) == pytest.approx(math.pi)
    assert lz.centered_arc_bound(0.49999999) == pytest.approx(0.0, abs=1e-3)
    vals = lz.centered_arc_bound(np.linspace(0, 0.49, 50))
    assert np.all(np.diff(vals) < 0)


def test_centering(tuned):
    cen = lz.center(tuned.B, 2**15)
    assert abs(cen.moment) <= 1e-2
    # the centered measure's barycenter is the origin up to sampling error
    assert abs(lz.barycenter(cen.measure).z) < 1e-3
    assert cen.g(cen.z_B) == pytest.approx(0, abs=1e-14)
    n = 2**14
    d = bl.rotation_number(bl.CircleLift(cen.B), n) - bl.rotation_number(bl.CircleLift(tuned.B), n)
    assert min(d % 1, 1 - d % 1) <= 2 / n
    assert lz.centered_arc_bound_check(cen.measure, lz.random_arcs(np.random.default_rng(1), 100)) == 0


def test_identity_table():
    t = lz.identity_table(1024)
    assert lz.qs_constant(t) == 1.0
    x = np.linspace(-2, 3, 41)
    np.testing.assert_array_equal(t.h(x), x)


def test_rotation_table_is_identity():
    N = 4096
    t = lz.linearization_table(bl.RigidRotation(GOLDEN.value), GOLDEN.value, N)
    np.testing.assert_allclose(t.sources, t.targets, atol=1e-12)
    assert lz.qs_constant(t) == pytest.approx(1.0, abs=1e-8)


def test_tuned_table(lift):
    t = lz.linearization_table(lift, GOLDEN.value, 2**12)
    x = np.linspace(-1, 2, 301)
    hx = t.h(x)
    assert np.all(np.diff(hx) >= 0)
    np.testing.assert_allclose(t.h(x + 1), hx + 1, atol=1e-14)
    # h conjugates F to the rotation on the orbit nodes
    fr, _ = lift.iterate(t.sources[:50], 1)
    np.testing.assert_allclose(np.mod(t.h(fr), 1.0), np.mod(t.targets[:50] + GOLDEN.value, 1.0), atol=1e-12)
    z = np.exp(1j * TWO_PI * t.sources[:10])
    np.testing.assert_allclose(t.h_eval(z), np.exp(1j * TWO_PI * t.targets[:10]), atol=1e-12)
    assert 1.0 < lz.qs_constant(t) < 20.0


def test_order_mismatch():
    L = bl.CircleLift(bl.BlaschkeProduct.douady_ghys(0.1))
    with pytest.raises(OrderMismatch):
        lz.linearization_table(L, GOLDEN.value, 1000)


def _covered(starts, lengths, x):
    return any(((x - s) % 1) <= l for s, l in zip(starts, lengths))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 63), st.integers(1, 20)), min_size=1, max_size=8))
def test_arc_helpers_against_grid(arcs):
    # arcs on the 1/64 lattice; the oracle checks midpoints and lattice points
    starts = [Fraction(s, 64) for s, _ in arcs]
    lengths = [Fraction(l, 64) for _, l in arcs]
    grid = [Fraction(2 * k + 1, 128) for k in range(64)]
    cover = all(_covered(starts, lengths, x) for x in grid)
    assert lz._covers_mod1(starts, lengths) == cover
    overlap = any(sum(0 < ((x - s) % 1) < l for s, l in zip(starts, lengths)) > 1 for x in grid)
    assert lz._disjoint_mod1(starts, lengths) == (not overlap)


@pytest.mark.parametrize("n", range(5, 11))
def test_partition_rotation_exact(n):
    c = lz.pullback_partition_check_rotation(GOLDEN, n)
    assert c.disjoint and c.covers
    assert c.n_disjoint == GOLDEN.q[n - 2] and c.n_cover == GOLDEN.q[n] + GOLDEN.q[n + 1]


@pytest.mark.parametrize("n", range(5, 9))
def test_partition_float_path(n, lift):
    assert lz.pullback_partition_check(bl.RigidRotation(GOLDEN.value), GOLDEN, n).covers
    c = lz.pullback_partition_check(lift, GOLDEN, n)
    assert c.disjoint and c.covers


def test_partition_detects_wrong_family():
    # with a family too long for the level, the pullbacks of I overlap
    c = lz.pullback_partition_check_rotation(GOLDEN, 6)
    assert c.disjoint
    th = Fraction(GOLDEN.value)
    fam = [Fraction(0) - k * th for k in range(GOLDEN.q[6])]
    assert not lz._disjoint_mod1(fam, [Fraction(1, 10)] * len(fam))


def test_swiatek_rotation_isometry():
    R = bl.RigidRotation(GOLDEN.value)
    for n in (6, 7):
        scan = lz.swiatek_scan(R, GOLDEN, n)
        assert len(scan.records) == GOLDEN.q[n - 2]
        assert abs(scan.max_length_ratio - 1) <= 1e-9
        Cs = np.array([r[5] for r in scan.records])
        np.testing.assert_allclose(Cs, Cs[0], rtol=1e-9)
        assert scan.shadow_bound == 0
    with pytest.raises(ValueError):
        lz.swiatek_scan(R, GOLDEN, 4)


def test_swiatek_tuned(lift):
    scan = lz.swiatek_scan(lift, GOLDEN, 6)
    assert np.isfinite(scan.max_length_ratio) and np.isfinite(scan.max_cross_ratio)
    assert scan.shadow_bound == 9
    lengths = [r[-1] for r in scan.records]
    assert all(l > 0 for l in lengths)


def test_df_ratios_rotation():
    R = bl.RigidRotation(GOLDEN.value)
    xs = np.arange(16) / 16
    for d in lz.df_ratios(R, GOLDEN, [5, 6, 7], xs):
        assert d.cp1_min == pytest.approx(1.0, abs=1e-9) and d.cp1_max == pytest.approx(1.0, abs=1e-9)
        expect = GOLDEN.closest_return(d.n + 1) / GOLDEN.closest_return(d.n)
        assert d.cp2_min == pytest.approx(expect, rel=1e-8) and d.cp2_max == pytest.approx(expect, rel=1e-8)


def test_df_ratios_tuned(lift):
    out = lz.df_ratios(lift, GOLDEN, [6, 8], np.arange(32) / 32)
    for d in out:
        assert 1.0 <= d.J < 50.0
