import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdioph.errors import DegenerateInputError, UndefinedHeightError, UnsupportedInputError
from hyperdioph.exactmath import (
    INF,
    BinaryQuadraticForm,
    CycleClass,
    ImagQuadInteger,
    RealQuadratic,
    UnimodularMatrix,
    cf_expand,
    convergents,
    cross_ratio,
    egcd,
    form_of_qi,
    fundamental_unit,
    galois_conjugate,
    gcd_ideal,
    height_qi,
    mobius_apply,
    norm_one_unit,
    pell_unit,
    properly_equivalent,
    regulator_of_lattice,
    relative_height,
    relative_height_exact,
    relative_height_numeric,
    root_of_form,
    stabilizer_regulator,
    trace_qi,
    unit_count,
    units,
    zeta_constants,
)

PHI = RealQuadratic(Fraction(1, 2), Fraction(1, 2), 5)
SQRT2 = RealQuadratic.sqrt(2)
SQRT5 = RealQuadratic.sqrt(5)


def unimodular():
    """Random SL2(Z) matrices as short words in the two standard generators."""
    T = UnimodularMatrix(1, 1, 0, 1)
    Ti = UnimodularMatrix(1, -1, 0, 1)
    S = UnimodularMatrix(0, -1, 1, 0)

    def build(word):
        m = UnimodularMatrix.identity()
        for g in word:
            m = m @ (T, Ti, S)[g]
        return m

    return st.lists(st.integers(0, 2), max_size=12).map(build)


# real quadratic arithmetic --------------------------------------------------------

def test_mobius_examples():
    assert mobius_apply(UnimodularMatrix.identity(), PHI) == PHI
    assert mobius_apply(UnimodularMatrix(1, 1, 0, 1), PHI) == RealQuadratic(Fraction(3, 2), Fraction(1, 2), 5)
    assert mobius_apply(UnimodularMatrix(0, -1, 1, 0), 2) == Fraction(-1, 2)
    assert mobius_apply(UnimodularMatrix(0, -1, 1, 0), INF) == 0


def test_conjugate_trace_height():
    assert galois_conjugate(PHI) == RealQuadratic(Fraction(1, 2), Fraction(-1, 2), 5)
    assert galois_conjugate(SQRT2) == -SQRT2
    assert galois_conjugate(3 + 2 * SQRT5) == 3 - 2 * SQRT5
    assert trace_qi(PHI) == 1
    assert trace_qi(SQRT5) == 0
    assert trace_qi(RealQuadratic(Fraction(3, 2), Fraction(1, 2), 5)) == 3
    assert height_qi(PHI) == pytest.approx(2 / math.sqrt(5), abs=1e-15)
    assert height_qi(SQRT2) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    with pytest.raises(UndefinedHeightError):
        height_qi(RealQuadratic(1, 0, 5))


@pytest.mark.parametrize("form", [(1, -1, -1), (-1, 1, 1), (1, 3, 1), (5, 5, 1), (-19, 9, -1), (29, 11, 1)])
def test_height_from_leading_coefficient(form):
    # a root of a disc-5 form A x^2 + B x + C has height 2|A|/sqrt5
    f = BinaryQuadraticForm(*form)
    assert f.disc == 5
    assert height_qi(root_of_form(f)) == pytest.approx(2 * abs(form[0]) / math.sqrt(5), rel=1e-14)


def test_cross_ratio_examples():
    assert cross_ratio(0, 1, 2, 3) == Fraction(4, 3)
    x = Fraction(7, 3)
    assert cross_ratio(0, 1, INF, x) == (x - 1) / x
    with pytest.raises(DegenerateInputError):
        cross_ratio(0, 0, 1, 2)


@settings(max_examples=60, deadline=None)
@given(unimodular())
def test_cross_ratio_projective_invariance(m):
    pts = [Fraction(-3, 2), Fraction(1, 3), Fraction(5, 4), Fraction(7)]
    img = [mobius_apply(m, p) for p in pts]
    assert cross_ratio(*img) == cross_ratio(*pts)


def test_relative_height_paths_agree():
    beta = PHI + 1
    exact = relative_height_exact(PHI, beta)
    assert float(exact) > 0
    assert float(relative_height_numeric(PHI, beta)) == pytest.approx(float(exact), rel=1e-12)
    far = mobius_apply(UnimodularMatrix(13, 8, 21, 13) @ UnimodularMatrix(2, 1, 1, 1), PHI)
    assert relative_height(PHI, far) == pytest.approx(float(relative_height_numeric(PHI, far, dps=30)), rel=1e-12)
    with pytest.raises(UndefinedHeightError):
        relative_height(PHI, PHI.conjugate())


@settings(max_examples=40, deadline=None)
@given(unimodular())
def test_relative_height_invariant_under_stabiliser(m):
    beta = mobius_apply(m, SQRT5)
    if beta in (PHI, PHI.conjugate()) or beta.b == 0:
        return
    stab = UnimodularMatrix(2, 1, 1, 1)  # fixes phi and its conjugate
    assert mobius_apply(stab, PHI) == PHI
    assert relative_height_exact(PHI, mobius_apply(stab, beta)) == relative_height_exact(PHI, beta)


# continued fractions and forms -------------------------------------------------------

def test_cf_examples():
    assert cf_expand(Fraction(355, 113)).terms(10) == [3, 7, 16]
    e = cf_expand(PHI)
    assert (e.preperiod, e.period) == ((1,), (1,))
    e = cf_expand(SQRT2)
    assert (e.preperiod, e.period) == ((1,), (2,))


@settings(max_examples=60, deadline=None)
@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_cf_of_rationals_roundtrip(p, q):
    x = Fraction(p, q)
    conv = list(convergents(cf_expand(x).terms(10**4)))
    assert Fraction(*conv[-1]) == x


def test_convergents_against_float_recursion():
    terms = cf_expand(SQRT2).terms(20)
    for p, q in convergents(terms):
        assert abs(p * p - 2 * q * q) == 1


def test_form_of_qi_and_roots():
    assert form_of_qi(PHI).coefficients() == (1, -1, -1)
    assert root_of_form(BinaryQuadraticForm(1, -1, -1)) == PHI
    assert root_of_form(BinaryQuadraticForm(-1, 1, 1)) == PHI.conjugate()


def test_cycle_classes():
    assert properly_equivalent(BinaryQuadraticForm(1, -1, -1), BinaryQuadraticForm(1, 1, -1))
    assert not properly_equivalent(BinaryQuadraticForm(1, 0, -2), BinaryQuadraticForm(1, -1, -1))
    # class number 2 at discriminant 40: x^2 - 10y^2 and 2x^2 - 5y^2
    assert not properly_equivalent(BinaryQuadraticForm(1, 0, -10), BinaryQuadraticForm(2, 0, -5))


@settings(max_examples=60, deadline=None)
@given(unimodular())
def test_cycle_invariant_under_change_of_variables(m):
    f = BinaryQuadraticForm(2, 1, -5)
    a, b, c, d = m.entries()
    assert f.act(a, b, c, d) in CycleClass(f)


# units ----------------------------------------------------------------------------------

def test_regulators():
    assert regulator_of_lattice(PHI) == pytest.approx(0.4812118250596034, abs=1e-15)
    assert regulator_of_lattice(SQRT2) == pytest.approx(math.log(1 + math.sqrt(2)), abs=1e-15)
    assert regulator_of_lattice(1 + SQRT2) == regulator_of_lattice(SQRT2)
    # the norm-one unit of Z[phi] is phi^2
    assert stabilizer_regulator(PHI) == pytest.approx(2 * math.log((1 + math.sqrt(5)) / 2), abs=1e-15)
    with pytest.raises(UnsupportedInputError):
        regulator_of_lattice(PHI / 2)


@pytest.mark.parametrize("D", [5, 8, 12, 13, 21, 28, 40, 41, 60, 61, 117])
def test_fundamental_unit_against_pell_search(D):
    x, y = pell_unit(D)
    eps = fundamental_unit(D)
    assert float(eps) == pytest.approx((x + y * math.sqrt(D)) / 2, rel=1e-12)
    assert norm_one_unit(D).norm() == 1


# imaginary quadratic ------------------------------------------------------------------

@pytest.mark.parametrize("D,w", [(-4, 4), (-3, 6), (-8, 2)])
def test_units(D, w):
    assert unit_count(D) == w
    us = units(D)
    assert len(us) == w and all(u.norm() == 1 for u in us)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([-3, -4, -8]), st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_gcd_is_a_bezout_generator(D, a, b, c, d):
    x, y = ImagQuadInteger(a, b, D), ImagQuadInteger(c, d, D)
    if not x and not y:
        return
    g = gcd_ideal(*[e for e in (x, y) if e])
    assert all(g.divides(e) for e in (x, y) if e)
    if x and y:
        g2, s, t = egcd(x, y)
        assert s * x + t * y == g2
        assert g2.norm() == g.norm()


def test_zeta_constants():
    assert zeta_constants("rational", 2) == pytest.approx(math.pi ** 2 / 6, abs=1e-14)
    assert zeta_constants(-4, 2) == pytest.approx(1.5067030099229850, abs=1e-13)
    # L(3, chi_-4) = pi^3 / 32
    assert zeta_constants(-4, 3) == pytest.approx(float(mpmath.zeta(3)) * math.pi ** 3 / 32, abs=1e-14)
    assert zeta_constants(-4, 3) == pytest.approx(1.1647284, abs=1e-7)
    # independent route: L(2, chi_-3) from mpmath's Hurwitz zeta
    L = (mpmath.zeta(2, mpmath.mpf(1) / 3) - mpmath.zeta(2, mpmath.mpf(2) / 3)) / 9
    assert zeta_constants(-3, 2) == pytest.approx(float(mpmath.zeta(2) * L), abs=1e-13)
    with pytest.raises(UnsupportedInputError):
        zeta_constants(-4, 4)
