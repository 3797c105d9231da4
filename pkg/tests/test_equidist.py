import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from hyperdioph.equidist import (
    EmpiricalMeasure,
    TargetDensity,
    binned_total_variation,
    discrepancy,
    fit_power_law,
    histogram,
    ks_statistic,
    theoretical_constant,
)
from hyperdioph.errors import DegenerateInputError, EmptyInputError, UnsupportedInputError
from hyperdioph.exactmath import RealQuadratic
from hyperdioph.orbits import enumerate_farey

UNIT = TargetDensity.uniform_interval(0, 1)


@pytest.mark.parametrize("n", [1, 7, 50, 333])
def test_midpoint_grid_discrepancy(n):
    mu = EmpiricalMeasure((np.arange(n) + 0.5) / n)
    # a bin of width 1/b >= 1/n holds n/b points up to one
    for bins in {1, 3, 10, 64}:
        if bins <= n:
            assert discrepancy(mu, UNIT, bins) <= 1 / n + 1e-12
    assert discrepancy(mu, UNIT, n) == pytest.approx(0, abs=1e-12)


def test_farey_points_are_close_to_uniform():
    mu = EmpiricalMeasure(enumerate_farey(100).values)
    assert discrepancy(mu, UNIT, 20) <= 0.02


def test_point_mass():
    mu = EmpiricalMeasure([0.05])
    assert discrepancy(mu, UNIT, 10) == pytest.approx(0.9)
    assert binned_total_variation(mu, UNIT, 10) == pytest.approx(1.8)


def test_sup_discrepancy_can_drop_under_refinement():
    mu = EmpiricalMeasure([0.1, 0.3])
    assert discrepancy(mu, UNIT, 2) == pytest.approx(0.5)
    assert discrepancy(mu, UNIT, 4) == pytest.approx(0.25)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=60), st.integers(1, 12), st.integers(2, 4))
def test_total_variation_grows_under_refinement(xs, n, k):
    mu = EmpiricalMeasure(xs)
    assert binned_total_variation(mu, UNIT, n) <= binned_total_variation(mu, UNIT, n * k) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=60), st.integers(1, 30))
def test_histogram_masses_sum_to_one(xs, n):
    rows = histogram(EmpiricalMeasure(xs), UNIT, n)
    assert math.fsum(r[-2] for r in rows) == pytest.approx(1)
    assert math.fsum(r[-1] for r in rows) == pytest.approx(1)


def test_weights_and_errors():
    mu = EmpiricalMeasure([0.1, 0.9], [3, 1])
    rows = histogram(mu, UNIT, 2)
    assert [r[-2] for r in rows] == [0.75, 0.25]
    with pytest.raises(ValueError):
        EmpiricalMeasure([0.1], [0])
    with pytest.raises(EmptyInputError):
        discrepancy(EmpiricalMeasure(np.zeros(0)), UNIT, 3)
    with pytest.raises(UnsupportedInputError):
        TargetDensity("gaussian", [(0, 1)])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 2), min_size=1, max_size=80))
def test_ks_matches_scipy(xs):
    mu = EmpiricalMeasure(xs)
    target = TargetDensity.uniform_interval(0, 1)
    ref = stats.kstest(xs, "uniform").statistic
    assert ks_statistic(mu, target) == pytest.approx(ref, abs=1e-12)


def test_reciprocal_form_density():
    form = (1, -1, -1)
    window = [(-2, -0.818), (-0.418, 1.418), (1.818, 2)]
    t = TargetDensity.reciprocal_form(form, window)
    f = lambda x: 1 / abs(x * x - x - 1)  # noqa: E731
    total = sum(integrate.quad(f, a, b)[0] for a, b in window)
    assert t.mass((0, 1)) == pytest.approx(integrate.quad(f, 0, 1)[0] / total, rel=1e-9)
    assert t.mass((-5, 5)) == pytest.approx(1)
    with pytest.raises(ValueError):
        TargetDensity.reciprocal_form(form, [(1, 2)])


def test_box_targets():
    t = TargetDensity.planar_box(0, 1, 0, 2)
    assert t.mass((0, 0.5), (0, 1)) == pytest.approx(0.25)
    h = TargetDensity.heisenberg_box([(0, 1), (0, 1), (0, 2)])
    assert h.mass((0, 1), (0, 1), (1, 3)) == pytest.approx(0.5)
    mu = EmpiricalMeasure([0.25 + 0.5j, 0.75 + 1.5j])
    assert discrepancy(mu, t, 2) == pytest.approx(0.25)


def test_fit_power_law():
    f = fit_power_law([(s, 7 * s ** 3) for s in (2, 5, 10, 40)])
    assert f.exponent == pytest.approx(3, abs=1e-12)
    assert f.constant == pytest.approx(7, rel=1e-10)
    assert f.r_squared == pytest.approx(1)
    g = fit_power_law([(s, s ** 4 * (1 + 1 / s)) for s in (10, 20, 40, 80)])
    assert 3.9 <= g.exponent <= 4.1


@pytest.mark.parametrize(
    "samples",
    [[(1, 1), (2, 2)], [(1, 1), (2, 0), (3, 4)], [(1, 1), (1, 2), (3, 4)], [(2, 1), (1, 2), (3, 4)]],
)
def test_fit_rejects_degenerate_samples(samples):
    with pytest.raises(DegenerateInputError):
        fit_power_law(samples)


def test_theoretical_constants():
    assert theoretical_constant("farey_mertens") == pytest.approx(3 / math.pi ** 2)
    assert theoretical_constant("heis_mertens") == pytest.approx(0.0205320, abs=1e-6)
    assert theoretical_constant("relative_count_slope") == pytest.approx(1.12620, abs=1e-4)
    assert theoretical_constant("relative_count_slope", regulator="norm_one") == pytest.approx(4 * 1.1261962, abs=1e-6)
    assert theoretical_constant("heis_gauss_ball") == pytest.approx(math.pi ** 2 / 8)
    # the Z[i] lattice has covolume 1: 2 pi / (4 * 4 * zeta_K(2))
    assert theoretical_constant("gaussian_mertens") == pytest.approx(math.pi / (8 * 1.5067030099229850))
    lp = math.log((3 + math.sqrt(5)) / 2)
    assert theoretical_constant("quad_trace_density", alpha0=RealQuadratic(Fraction(1, 2), Fraction(1, 2), 5), regulator="norm_one") == pytest.approx(3 * lp / math.pi ** 2)
    assert theoretical_constant("closed_geodesic_pair", ell_minus=1, ell_plus=1, volume=1) == pytest.approx(math.pi)
    assert theoretical_constant("closed_geodesic_pair", n=3, ell_minus=2, ell_plus=3, volume=6) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        theoretical_constant("closed_geodesic_pair", n=1, ell_minus=1, ell_plus=1, volume=1)
    with pytest.raises(UnsupportedInputError):
        theoretical_constant("nope")
