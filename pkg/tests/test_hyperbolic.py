import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hyperdioph.errors import NotDisjointError
from hyperdioph.exactmath import INF, RealQuadratic, UnimodularMatrix
from hyperdioph.hyperbolic import (
    Geodesic,
    Horoball,
    PointH2,
    act_on_body,
    act_on_point,
    busemann,
    dist_h2,
    ford_horoball,
    geodesic_of_qi,
    meets_horoball,
    meets_horoball_geometric,
    perp_length,
)

from perp_oracle import numeric_perp

PHI = RealQuadratic(Fraction(1, 2), Fraction(1, 2), 5)

points = st.builds(PointH2, st.floats(-5, 5), st.floats(0.05, 5))


def test_distance_examples():
    i = PointH2(0, 1)
    assert dist_h2(i, i) == 0
    assert dist_h2(i, PointH2(0, 2)) == pytest.approx(math.log(2), abs=1e-15)
    assert dist_h2(i, PointH2(1, 1)) == pytest.approx(math.acosh(1.5), abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(points, points, points)
def test_distance_is_a_metric(p, q, r):
    assert dist_h2(p, q) == pytest.approx(dist_h2(q, p), abs=1e-12)
    assert dist_h2(p, r) <= dist_h2(p, q) + dist_h2(q, r) + 1e-9


def test_busemann_examples():
    i, two_i = PointH2(0, 1), PointH2(0, 2)
    assert busemann(INF, i, two_i) == pytest.approx(math.log(2), abs=1e-15)
    assert Horoball(INF, 1.0).contains(two_i)
    x = PointH2(0.3, 0.7)
    assert busemann(INF, x, x) == 0
    assert busemann(0, i, PointH2(0, 0.5)) == pytest.approx(math.log(2), abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), points, points, points)
def test_busemann_cocycle(xi, x, y, z):
    assert busemann(xi, x, z) == pytest.approx(busemann(xi, x, y) + busemann(xi, y, z), abs=1e-9)


def test_perp_examples():
    assert perp_length(Horoball(INF, 1.0), Geodesic(0, 1)) == pytest.approx(math.log(2), abs=1e-15)
    assert perp_length(Geodesic(-1, 1), Geodesic(-math.e, math.e)) == pytest.approx(1.0, abs=1e-14)
    assert perp_length(PointH2(0, 1), PointH2(0, 2)) == pytest.approx(math.log(2), abs=1e-15)
    # order of the arguments does not matter
    assert perp_length(Geodesic(0, 1), Horoball(INF, 1.0)) == perp_length(Horoball(INF, 1.0), Geodesic(0, 1))


def test_perp_errors():
    with pytest.raises(NotDisjointError):
        perp_length(Geodesic(-1, 1), Geodesic(0, 2))
    with pytest.raises(NotDisjointError):
        perp_length(Geodesic(0, 1), Geodesic(1, 2))
    with pytest.raises(NotDisjointError):
        perp_length(Horoball(INF, 1.0), Geodesic(0, INF))
    with pytest.raises(NotDisjointError):
        perp_length(Horoball(INF, 0.5), Geodesic(0, 1))  # tangent


@pytest.mark.parametrize(
    "A,B",
    [
        (Horoball(INF, 1.0), Geodesic(0, 1)),
        (Horoball(INF, 2.0), Geodesic(-0.3, 0.1)),
        (Horoball(0.0, 0.5), Horoball(1.0, 0.25)),
        (Horoball(0.5, 0.2), Geodesic(1, 3)),
        (Horoball(INF, 3.0), PointH2(0.2, 0.4)),
        (Geodesic(-1, 1), Geodesic(2, 5)),
        (Geodesic(0, 1), PointH2(3, 0.5)),
        (Horoball(2.0, 1.0), PointH2(0, 1)),
    ],
)
def test_perp_closed_forms_match_numeric_minimisation(A, B):
    assert perp_length(A, B) == pytest.approx(numeric_perp(A, B), abs=1e-6)


def test_ford_horoballs():
    hb = ford_horoball(Fraction(0), 1)
    assert (hb.center, hb.size) == (0, 1.0)
    assert ford_horoball(Fraction(1, 2), 1).size == 0.25
    assert ford_horoball(Fraction(3, 7), 2).size == ford_horoball(Fraction(3, 7), 1).size / 2
    with pytest.raises(ValueError):
        ford_horoball(Fraction(1, 2), 0.5)


def test_meets_horoball_examples():
    # |phi - 1| = 0.618 > 1/2 and |phi - 2| = 0.382 <= 1/2
    assert not meets_horoball(PHI, Fraction(1))
    assert meets_horoball(PHI, Fraction(2))
    x = Fraction(3, 5) + Fraction(99, 100) / (2 * 3 * 25)
    assert meets_horoball(x, Fraction(3, 5), 3)


@settings(max_examples=300, deadline=None)
@given(st.floats(-2, 2, allow_nan=False), st.integers(-20, 20), st.integers(1, 20), st.integers(1, 4))
def test_meets_horoball_agrees_with_geometry(x, p, q, psi):
    r = Fraction(p, q)
    margin = abs(abs(x - float(r)) - 1 / (2 * psi * q * q))
    assume(margin > 1e-12)
    assert meets_horoball(x, r, psi) == meets_horoball_geometric(x, r, psi)


def test_geodesic_of_qi():
    g = geodesic_of_qi(PHI)
    assert sorted(map(float, g.endpoints)) == pytest.approx([(1 - 5 ** 0.5) / 2, (1 + 5 ** 0.5) / 2])


def test_actions_fix_expected_bodies():
    T = UnimodularMatrix(1, 1, 0, 1)
    hb = act_on_body(T, Horoball(INF, 2.5))
    assert hb.center is INF and hb.size == pytest.approx(2.5)
    g = Geodesic(0, 1)
    assert act_on_body(UnimodularMatrix.identity(), g) == g


words = st.lists(st.sampled_from([(1, 1, 0, 1), (1, -1, 0, 1), (0, -1, 1, 0)]), max_size=8)


def _matrix(word):
    m = UnimodularMatrix.identity()
    for e in word:
        m = m @ UnimodularMatrix(*e)
    return m


@settings(max_examples=100, deadline=None)
@given(words, points, points)
def test_action_is_isometric(word, p, q):
    m = _matrix(word)
    assert dist_h2(act_on_point(m, p), act_on_point(m, q)) == pytest.approx(dist_h2(p, q), rel=1e-7, abs=1e-7)


@settings(max_examples=60, deadline=None)
@given(words)
def test_perp_is_invariant(word):
    m = _matrix(word)
    A, B = Horoball(Fraction(1, 3), 0.1), Geodesic(Fraction(1, 2), 2)
    gA, gB = act_on_body(m, A), act_on_body(m, B)
    assert perp_length(gA, gB) == pytest.approx(perp_length(A, B), rel=1e-8)
