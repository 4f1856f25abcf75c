"""Parameter plane: dimensionless groups, branch curves, regions, speed scalings."""

import math
from fractions import Fraction

import numpy as np
import pytest

from intwave.errors import ParameterError, SubcriticalSpeedError
from intwave.params import (
    NonDimParams,
    PhysicalParams,
    bifurcation_curve,
    classify_region,
    first_branch_end,
    nondimensionalize,
    require_supercritical,
    speed_to_scaling,
)


def test_demo_configuration_groups(p0, nd0):
    assert nd0.varrho == 0.5
    assert nd0.h == 2.0
    assert nd0.beta0 == pytest.approx(5.0 / 6.0, abs=1e-15)
    assert nd0.lambda0 == 1.0
    assert nd0.beta == pytest.approx(1.0, abs=1e-5)
    assert nd0.lam == pytest.approx(1.01, abs=1e-5)


def test_critical_constants_match_rational_arithmetic():
    for varrho, h in ((Fraction(1, 2), Fraction(2)), (Fraction(0), Fraction(1)),
                      (Fraction(3, 4), Fraction(7, 2))):
        nd = NonDimParams.from_ratios(1.0, 1.0, float(varrho), float(h))
        assert nd.beta0 == pytest.approx(float((varrho + h) / 3), rel=1e-15)
        assert nd.lambda0 == pytest.approx(float(varrho + 1 / h), rel=1e-15)
        assert nd.gamma_quartic == pytest.approx(float((varrho + h ** 3) / 45), rel=1e-15)
        assert nd.gamma_printed == pytest.approx(float((varrho + h) / 45), rel=1e-15)


def test_gamma_variants_agree_only_at_unit_depth_ratio():
    equal = NonDimParams.from_ratios(1.0, 1.0, 0.3, 1.0)
    assert equal.gamma_quartic == equal.gamma_printed
    other = NonDimParams.from_ratios(1.0, 1.0, 0.3, 2.0)
    assert other.gamma_quartic != other.gamma_printed


def test_physical_params_validation():
    good = dict(rho_plus=1.0, rho_minus=2.0, d_plus=1.0, d_minus=2.0,
                sigma=1.0, g=1.0, c=0.5)
    PhysicalParams(**good)
    for key, bad in (("rho_minus", 0.0), ("rho_plus", 3.0), ("d_plus", -1.0),
                     ("d_minus", 0.0), ("sigma", 0.0), ("g", -9.8), ("c", 0.0)):
        with pytest.raises(ParameterError):
            PhysicalParams(**{**good, key: bad})


def test_single_fluid_limit_is_admissible():
    p = PhysicalParams(rho_plus=0.0, rho_minus=1.0, d_plus=1.0, d_minus=1.0,
                       sigma=1.0, g=1.0, c=0.5)
    nd = nondimensionalize(p)
    assert nd.varrho == 0.0
    assert nd.lambda0 == 1.0


def test_round_trip_dict(p0):
    again = PhysicalParams.from_dict(p0.to_dict())
    assert again == p0


# --- branch curves ---------------------------------------------------------


def test_curves_meet_at_the_critical_point(nd0):
    for which in ("Gamma2", "Gamma3"):
        beta, lam = bifurcation_curve(which, 1e-4, nd0)
        assert abs(beta - nd0.beta0) < 1e-6
        assert abs(lam - nd0.lambda0) < 1e-6


def test_curve_values_at_unit_parameter(nd0):
    # frozen regression anchors for varrho = 0.5, h = 2
    b2, l2 = bifurcation_curve("Gamma2", 1.0, nd0)
    assert (b2, l2) == pytest.approx((1.630826792119, 1.494215545726), abs=1e-9)
    b3, l3 = bifurcation_curve("Gamma3", 1.0, nd0)
    assert (b3, l3) == pytest.approx((0.589878936659, 1.103953426818), abs=1e-9)
    # the trig branch climbs in beta, the hyperbolic one descends
    assert b2 > nd0.beta0 > b3


def test_hyperbolic_branch_is_the_imaginary_continuation(nd0):
    """Evaluating the trig formulas at a complex argument i*xi must land on
    the hyperbolic branch, real part only."""
    xi = 0.8
    b3, l3 = bifurcation_curve("Gamma3", xi, nd0)
    z = 1j * xi
    beta = 0.0
    lam_sum = 0.0
    for r, a in ((nd0.varrho, 1.0), (1.0, nd0.h)):
        s = np.sin(a * z)
        beta += r * (a * z - s * np.cos(a * z)) / (2.0 * z * s * s)
        lam_sum += r * z * np.cos(a * z) / s
    lam = beta * z ** 2 + lam_sum
    assert abs(beta.imag) < 1e-12 and abs(lam.imag) < 1e-12
    assert beta.real == pytest.approx(b3, abs=1e-12)
    assert lam.real == pytest.approx(l3, abs=1e-12)


def test_series_window_is_continuous(nd0):
    # Either side of the Taylor switch agrees to the cancellation noise the
    # switch exists to suppress (the direct form loses ~7 digits at xi=1e-3).
    for which in ("Gamma2", "Gamma3"):
        lo = bifurcation_curve(which, 0.999e-3, nd0)
        hi = bifurcation_curve(which, 1.001e-3, nd0)
        assert lo == pytest.approx(hi, abs=5e-9)


def test_curve_rejects_bad_arguments(nd0):
    with pytest.raises(ParameterError):
        bifurcation_curve("Gamma2", -0.1, nd0)
    with pytest.raises(ParameterError):
        bifurcation_curve("Gamma1", 1.0, nd0)
    # float sin never lands exactly on zero near pi, so the trig branch blows
    # up instead of raising there
    beta, lam = bifurcation_curve("Gamma2", math.pi / nd0.h, nd0)
    assert abs(beta) > 1e10 and abs(lam) > 1e10


def test_first_branch_end(nd0):
    assert first_branch_end(nd0) == pytest.approx(math.pi / 2.0)


# --- region classification -------------------------------------------------


def test_classification_examples():
    a = classify_region(NonDimParams.from_ratios(1.0, 1.01, 0.5, 2.0), c_width=0.01)
    assert a.label == "A"
    c = classify_region(NonDimParams.at_critical(0.5, 2.0))
    assert c.label == "C"
    other = classify_region(NonDimParams.from_ratios(5 / 6 - 0.5, 0.5, 0.5, 2.0))
    assert other.label == "Other"


def test_region_b_between_the_curves():
    nd = NonDimParams.from_ratios(0.80, 1.01, 0.5, 2.0)
    label = classify_region(nd, c_width=0.01)
    assert label.label == "B"
    d1, d2, d3 = label.distances
    assert d1 > 0 and d2 < -0.01 and d3 > 0


def test_distances_are_nan_below_lambda0():
    label = classify_region(NonDimParams.from_ratios(1.0, 0.9, 0.5, 2.0))
    assert label.label == "Other"
    assert math.isnan(label.distances[1]) and math.isnan(label.distances[2])


def test_c_width_must_be_positive(nd0):
    with pytest.raises(ParameterError):
        classify_region(nd0, c_width=0.0)


# --- speed scalings --------------------------------------------------------


def test_speed_scaling_demo_values(p0):
    sc = speed_to_scaling(p0, p0.c)
    assert sc.beta_c == pytest.approx(1.0, abs=1e-5)
    assert sc.lambda_c == pytest.approx(1.01, abs=1e-5)
    assert sc.epsilon_A == pytest.approx(0.1, abs=1e-4)
    assert sc.kappa_A == pytest.approx(0.25 / sc.epsilon_A, rel=1e-10)


def test_epsilon_c_fourth_root(p0):
    nd = nondimensionalize(p0)
    lam_target = nd.lambda0 + nd.gamma_quartic * 1e-4
    c = math.sqrt(p0.g * p0.d_plus / (2.0 * lam_target))
    sc = speed_to_scaling(p0, c)
    assert sc.epsilon_C == pytest.approx(0.1, rel=1e-9)


def test_delta_c_inverse_construction():
    """Choose sigma and g so that the scaling lands on epsilon_C = 0.1 and
    delta_c = 1/6 at c = 0.5, then read them back."""
    varrho, h, c = 0.5, 2.0, 0.5
    probe = NonDimParams.from_ratios(0.0, 0.0, varrho, h)
    gamma = probe.gamma_quartic
    beta_c = probe.beta0 + 2.0 * gamma * 0.1 ** 2 * (7.0 / 6.0)
    lam_c = probe.lambda0 + gamma * 0.1 ** 4
    base = PhysicalParams(rho_plus=1.0, rho_minus=2.0, d_plus=1.0, d_minus=2.0,
                          sigma=beta_c * 2.0 * c ** 2, g=lam_c * 2.0 * c ** 2, c=c)
    sc = speed_to_scaling(base, c)
    assert sc.epsilon_C == pytest.approx(0.1, rel=1e-9)
    assert sc.delta_c == pytest.approx(1.0 / 6.0, rel=1e-8)


def test_subcritical_fields_absent(p0):
    slow = speed_to_scaling(p0, 2.0)
    assert slow.epsilon_A is None and slow.epsilon_C is None
    with pytest.raises(SubcriticalSpeedError):
        require_supercritical(slow)
    fast = require_supercritical(speed_to_scaling(p0, p0.c))
    assert fast.epsilon_A is not None


def test_ray_property(p0):
    sc1 = speed_to_scaling(p0, 0.4)
    sc2 = speed_to_scaling(p0, 1.7)
    assert sc1.beta_c / sc1.lambda_c == pytest.approx(sc2.beta_c / sc2.lambda_c, abs=1e-12)


def test_scaling_monotone_in_speed(p0):
    cs = np.linspace(0.3, 0.7, 25)
    eps = [speed_to_scaling(p0, c).epsilon_A for c in cs]
    assert all(e is not None for e in eps)
    assert all(b > a for a, b in zip(eps[1:], eps))  # decreasing in c
    cbeta = [c * speed_to_scaling(p0, c).beta_c for c in cs]
    assert all(b > a for a, b in zip(cbeta[1:], cbeta))
