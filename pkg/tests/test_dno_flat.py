"""Flat-interface operator algebra in Fourier space."""

import math

import numpy as np
import pytest

from intwave import dno
from intwave.errors import MeanZeroError, ParameterError
from intwave.grids import GridProfile, grid_points
from intwave.params import PhysicalParams


L, N = math.pi, 256


def _profile(fn):
    return GridProfile.from_function(L, N, fn)


def test_g_minus_multiplier_on_unit_depth():
    p = PhysicalParams(rho_plus=1.0, rho_minus=2.0, d_plus=1.0, d_minus=1.0,
                       sigma=1.0, g=1.0, c=1.0)
    f = _profile(lambda x: np.cos(2 * x))
    out = dno.apply_flat_multiplier("Gminus", f, p)
    factor = 2.0 * math.tanh(2.0)
    assert factor == pytest.approx(1.928055, abs=5e-7)
    assert np.allclose(out.values, factor * f.values, atol=1e-12)


def test_a_inverse_multiplier_demo(p0):
    f = _profile(np.sin)
    out = dno.apply_flat_multiplier("Ainv", f, p0)
    expected = 1.0 / math.tanh(1.0) + 2.0 / math.tanh(2.0)
    assert expected == pytest.approx(3.387664, abs=1e-6)
    assert np.allclose(out.values, expected * f.values, atol=1e-12)


def test_b_multiplier_value(p0):
    f = _profile(np.sin)
    out = dno.apply_flat_multiplier("B", f, p0)
    expected = 1.0 * math.tanh(2.0) + 2.0 * math.tanh(1.0)
    assert np.allclose(out.values, expected * f.values, atol=1e-12)


def test_zero_in_zero_out(p0):
    z = _profile(np.zeros_like)
    for kind in ("Gplus", "Gminus", "B", "Binv", "A", "Ainv"):
        assert np.all(dno.apply_flat_multiplier(kind, z, p0).values == 0.0)


def test_singular_kinds_reject_nonzero_mean(p0):
    f = _profile(lambda x: 1.0 + np.cos(x))
    for kind in ("A", "Ainv", "Binv"):
        with pytest.raises(MeanZeroError):
            dno.apply_flat_multiplier(kind, f, p0)
    # G and B tolerate a mean and annihilate it
    out = dno.apply_flat_multiplier("Gplus", f, p0)
    assert abs(float(np.mean(out.values))) < 1e-14


def test_unknown_kind_rejected(p0):
    with pytest.raises(ParameterError):
        dno.apply_flat_multiplier("Gsideways", _profile(np.sin), p0)


def test_flat_operators_self_adjoint(p0):
    rng = np.random.default_rng(3)
    f = _profile(lambda x: 0.0 * x)
    g = _profile(lambda x: 0.0 * x)
    fv = rng.standard_normal(N)
    gv = rng.standard_normal(N)
    f = f.with_values(fv - fv.mean())
    g = g.with_values(gv - gv.mean())
    for kind in ("Gplus", "Gminus", "B", "A"):
        lhs = float(np.sum(f.values * dno.apply_flat_multiplier(kind, g, p0).values))
        rhs = float(np.sum(dno.apply_flat_multiplier(kind, f, p0).values * g.values))
        assert lhs == pytest.approx(rhs, abs=1e-12 * max(1.0, abs(lhs)))


def test_flat_g_positive(p0):
    rng = np.random.default_rng(11)
    fv = rng.standard_normal(N)
    f = _profile(np.zeros_like).with_values(fv - fv.mean())
    for kind in ("Gplus", "Gminus"):
        quad = float(np.sum(f.values * dno.apply_flat_multiplier(kind, f, p0).values))
        assert quad >= 0.0


def test_composition_order_commutes(p0):
    """A = G_- B^{-1} G_+ agrees with the opposite order at roundoff."""
    f = _profile(np.sin)
    path1 = dno.apply_flat_multiplier(
        "Gminus", dno.apply_flat_multiplier(
            "Binv", dno.apply_flat_multiplier("Gplus", f, p0), p0), p0)
    path2 = dno.apply_flat_multiplier(
        "Gplus", dno.apply_flat_multiplier(
            "Binv", dno.apply_flat_multiplier("Gminus", f, p0), p0), p0)
    direct = dno.apply_flat_multiplier("A", f, p0)
    assert np.allclose(path1.values, path2.values, atol=1e-14)
    assert np.allclose(path1.values, direct.values, atol=1e-12)


def test_a_and_ainv_invert(p0):
    rng = np.random.default_rng(5)
    fv = rng.standard_normal(N)
    f = _profile(np.zeros_like).with_values(fv - fv.mean())
    back = dno.apply_flat_multiplier("A", dno.apply_flat_multiplier("Ainv", f, p0), p0)
    assert np.allclose(back.values, f.values, atol=1e-10)


def test_layer_symbol_values():
    k = np.array([0.0, 1.0, 3.0])
    sym = dno.layer_symbol(k, 2.0)
    assert sym[0] == 0.0
    assert sym[1] == pytest.approx(math.tanh(2.0), rel=1e-14)
    assert sym[2] == pytest.approx(3.0 * math.tanh(6.0), rel=1e-14)
