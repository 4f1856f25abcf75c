"""Energy functionals, moment-of-instability derivatives, and verdicts."""

import math

import numpy as np
import pytest

from intwave import stability
from intwave.errors import ParameterError, SubcriticalSpeedError
from intwave.grids import GridProfile
from intwave.params import PhysicalParams, nondimensionalize, speed_to_scaling
from intwave.stability import (
    canonical_family,
    dprime_leading,
    functionals,
    gardner_momentum_closed_form,
    kdv_reconstruction,
    psistar,
    region_verdict,
    steady_residual,
    trivial_flow_verdict,
)

L = math.pi
N = 256


@pytest.fixture(scope="module")
def base_c():
    """Parameter ray sitting near the critical-tension corner.

    Chosen so that the quartic scaling at c = 0.5 lands at delta_c ~ 0.30
    and epsilon_C = 0.25, inside the asymptotic gate.
    """
    return PhysicalParams(
        rho_plus=1.0, rho_minus=2.0, d_plus=1.0, d_minus=2.0,
        sigma=0.432014, g=0.500369, c=0.5,
    )


def _cos_eta(amp=0.01):
    return GridProfile.from_function(L, N, lambda x: amp * np.cos(x))


class TestPsistar:
    def test_flat_multiplier_value(self, p0):
        # -c A^{-1} eta' for eta = 0.01 cos(x) is 0.01 * (coth(1) + 2 coth(2))
        # times sin(x); the multiplier is 3.387664 at k = 1
        eta = _cos_eta()
        psi = psistar(eta, 1.0, p0)
        x = -L + 2 * L * np.arange(N) / N
        assert np.max(np.abs(psi.values - 0.0338766 * np.sin(x))) < 1e-6

    def test_zero_profile(self, p0):
        eta = GridProfile(L, N, np.zeros(N))
        assert not np.any(psistar(eta, 1.0, p0).values)

    def test_speed_sign_flip_exact(self, p0):
        eta = _cos_eta()
        forward = psistar(eta, 0.7, p0)
        backward = psistar(eta, -0.7, p0)
        assert np.array_equal(backward.values, -forward.values)


class TestFunctionals:
    @pytest.fixture()
    def state(self):
        eta = _cos_eta(0.01)
        psi = GridProfile.from_function(L, N, lambda x: 0.02 * np.sin(x))
        return eta, psi

    def test_momentum_pure_modes(self, p0, state):
        f = functionals(*state, p0)
        assert f.P == pytest.approx(0.01 * 0.02 * math.pi, rel=1e-12)

    def test_kinetic_flat_multiplier(self, p0, state):
        # K = (1/2)(0.02)^2 (1/3.387664) pi for the single-mode stream
        f = functionals(*state, p0)
        assert f.K == pytest.approx(1.8547e-4, abs=1e-8)
        assert f.K == pytest.approx(1.854725e-4, rel=1e-5)

    def test_potential_value(self, p0, state):
        f = functionals(*state, p0)
        assert f.V == pytest.approx(3.126011e-4, rel=1e-5)

    def test_energy_identity_and_positivity(self, p0, state):
        f = functionals(*state, p0)
        assert f.E == f.K + f.V
        assert f.K >= 0.0

    def test_quiescent_state(self, p0):
        z = GridProfile(L, N, np.zeros(N))
        f = functionals(z, z, p0)
        assert (f.K, f.V, f.E, f.P) == (0.0, 0.0, 0.0, 0.0)

    def test_translation_invariance(self, p0, state):
        eta, psi = state
        f = functionals(eta, psi, p0)
        shifted = functionals(
            eta.with_values(np.roll(eta.values, 37)),
            psi.with_values(np.roll(psi.values, 37)),
            p0,
        )
        for a, b in zip(f.to_dict().values(), shifted.to_dict().values()):
            assert abs(a - b) < 1e-12


@pytest.mark.parametrize("seed", [7, 23])
def test_critical_point_property(p0, seed):
    """psi* minimizes K - cP over psi at fixed eta.

    K is quadratic and P linear in psi, so the centered difference in t
    isolates the first derivative exactly; on the small-amplitude path the
    trace equation is solved by an exact multiplier and the derivative
    vanishes to roundoff.
    """
    eta = _cos_eta(0.01)
    c = p0.c
    psi = psistar(eta, c, p0)
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal(N)
    phi -= phi.mean()

    def augmented(t):
        f = functionals(eta, psi.with_values(psi.values + t * phi), p0)
        return f.K - c * f.P

    t = 1e-3
    der = (augmented(t) - augmented(-t)) / (2.0 * t)
    assert abs(der) < 1e-8 * abs(augmented(0.0))


class TestSteadyResidual:
    def test_trivial_state_exactly_steady(self, p0):
        z = GridProfile(L, N, np.zeros(N))
        assert steady_residual(z, z, 1.0, p0) == (0.0, 0.0)

    def test_random_state_far_from_steady(self, p0):
        rng = np.random.default_rng(11)
        ev = 0.005 * rng.standard_normal(N)
        pv = 0.005 * rng.standard_normal(N)
        eta = GridProfile(L, N, ev - ev.mean())
        psi = GridProfile(L, N, pv - pv.mean())
        res_eta, res_psi = steady_residual(eta, psi, 1.0, p0)
        state_norm = math.sqrt(eta.norm_l2() ** 2 + psi.norm_l2() ** 2)
        # rough interfaces feed the curvature term, so the gradient is huge
        # compared to the state itself
        assert res_eta + res_psi > 1e-2 * state_norm

    def test_long_wave_residual_scaling(self, p0):
        """Model error of the leading-order reconstruction shrinks with eps.

        On the small-amplitude operator path the psi equation is satisfied
        identically and the eta residual is pure truncation error of the
        long-wave expansion; halving eps should cut it by far more than
        half.
        """
        res = []
        for eps in (0.2, 0.1, 0.05):
            eta, psi, pc = kdv_reconstruction(eps, p0, force="flat")
            res_eta, res_psi = steady_residual(eta, psi, pc.c, pc, force="flat")
            assert res_psi < 1e-12
            res.append(res_eta)
        assert res == pytest.approx([1.400443e-2, 1.149124e-3, 9.903064e-5], rel=1e-3)
        assert res[1] / res[0] <= 0.5
        assert res[2] / res[1] <= 0.5


class TestDprimeLeading:
    def test_kdv_anchor(self, p0):
        d = dprime_leading(0.7035976, "A_KdV", p0)
        assert d == pytest.approx(-0.0100068, abs=1e-5)
        assert d == pytest.approx(-0.010006473, rel=1e-6)

    def test_antisymmetry_in_speed(self, p0):
        d = dprime_leading(0.7035976, "a_kdv", p0)
        assert dprime_leading(-0.7035976, "a_kdv", p0) == pytest.approx(-d, rel=1e-12)

    def test_gardner_branch_pair(self, p0):
        dp = dprime_leading(0.7035976, "a_gardnerplus", p0, kappa=1.0, A=0.625)
        dm = dprime_leading(0.7035976, "a_gardnerminus", p0, kappa=1.0, A=0.625)
        assert dp < 0.0 and dm < 0.0
        # the momentum ratio of the two branches, 7.520408 / 1.162271
        assert dm / dp == pytest.approx(6.470440, rel=1e-5)

    def test_critical_tension_value(self, base_c):
        d = dprime_leading(0.5, "c_kawahara", base_c)
        assert d == pytest.approx(-1.181076907e-4, rel=1e-6)

    def test_asymptotic_gate(self, p0):
        # at c = 0.5 the long-wave amplitude parameter reaches 1
        with pytest.raises(ParameterError):
            dprime_leading(0.5, "a_kdv", p0)

    def test_subcritical_speed(self, p0):
        with pytest.raises(SubcriticalSpeedError):
            dprime_leading(0.8, "a_kdv", p0)


def test_canonical_family():
    assert canonical_family("A_KdV") == "a_kdv"
    assert canonical_family("a-gardner-plus".replace("-", "_")) == "a_gardnerplus"
    assert canonical_family(" C-Kawahara ") == "c_kawahara"
    with pytest.raises(ParameterError):
        canonical_family("b_benjamin")


class TestGardnerMomentum:
    def test_depression_branch(self):
        gm = gardner_momentum_closed_form(1.0, 0.625, -1)
        assert gm.quadrature == pytest.approx(7.5201, abs=1e-3)
        assert abs(gm.quadrature - gm.closed_form) < 1e-12
        assert gm.difference == gm.quadrature - gm.closed_form
        # the circulating arctan expression is off by two orders here
        assert gm.printed == pytest.approx(0.06452495, rel=1e-6)
        assert gm.printed_suspect

    def test_elevation_branch(self):
        gm = gardner_momentum_closed_form(1.0, 0.625, +1)
        assert gm.quadrature == pytest.approx(1.1623, abs=1e-3)
        assert abs(gm.quadrature - gm.closed_form) < 1e-12
        assert math.isnan(gm.printed)
        assert gm.printed_suspect

    def test_pure_cubic_limit(self):
        # kappa -> 0 collapses both branches onto 1/(sqrt(A) cosh x), whose
        # squared integral is 2/A; the printed expression limits to a
        # negative number instead
        gm = gardner_momentum_closed_form(0.0, 0.625, -1)
        assert gm.closed_form == pytest.approx(3.2, rel=1e-12)
        assert gm.quadrature == pytest.approx(3.2, rel=1e-10)
        assert gm.printed == pytest.approx(-0.8, rel=1e-12)
        assert gm.printed_suspect

    def test_kappa_reflection(self):
        # flipping the branch sign is the same as negating kappa
        dep = gardner_momentum_closed_form(1.0, 0.625, -1)
        elev = gardner_momentum_closed_form(-1.0, 0.625, +1)
        assert dep.quadrature == pytest.approx(elev.quadrature, rel=1e-13)
        assert dep.closed_form == pytest.approx(elev.closed_form, rel=1e-13)

    @pytest.mark.parametrize("bad", [dict(A=0.0), dict(A=-1.0), dict(sign=2)])
    def test_validation(self, bad):
        kwargs = dict(kappa=1.0, A=0.625, sign=-1)
        kwargs.update(bad)
        with pytest.raises(ParameterError):
            gardner_momentum_closed_form(kwargs["kappa"], kwargs["A"], kwargs["sign"])


class TestRegionVerdict:
    def test_long_wave_conditionally_stable(self, p0):
        verdict, curve = region_verdict(0.7035976, "a_kdv", p0, dc=0.002, n=5)
        assert verdict.conclusion == stability.CONDITIONALLY_STABLE
        # four of the eleven requested speeds sit past the supercritical
        # threshold and carry no wave; they are reported, not sampled
        skipped = verdict.evidence["skipped"]
        assert len(skipped) == 4
        assert all(row["reason"] == "subcritical" for row in skipped)
        assert len(curve.samples) == 7
        cs = [c for (c, _, _) in curve.samples]
        assert cs == sorted(cs)
        assert curve.monotone_increasing == "yes"
        assert curve.second_difference_sign == -1.0
        diffs = verdict.evidence["forward_differences"]
        bars = verdict.evidence["three_sigma"]
        assert all(d > b for d, b in zip(diffs, bars))
        assert verdict.evidence["statistic"] == "dprime"

    def test_epsilon_matches_speed_scaling(self, p0):
        _, curve = region_verdict(0.7035976, "a_kdv", p0, dc=0.002, n=2)
        for c, _, eps in curve.samples:
            assert eps == pytest.approx(speed_to_scaling(p0, c).epsilon_A, rel=1e-12)

    @pytest.mark.parametrize("family", ["a_gardnerplus", "a_gardnerminus"])
    def test_gardner_branches_conditionally_stable(self, p0, family):
        verdict, _ = region_verdict(0.7035976, family, p0, dc=0.002, n=5)
        assert verdict.conclusion == stability.CONDITIONALLY_STABLE

    def test_step_halving_keeps_verdict(self, p0):
        verdict, _ = region_verdict(0.7035976, "a_kdv", p0, dc=0.001, n=5)
        assert verdict.conclusion == stability.CONDITIONALLY_STABLE

    def test_critical_tension_conditionally_stable(self, base_c):
        verdict, curve = region_verdict(0.5, "c_kawahara", base_c, dc=2e-5, n=3)
        assert verdict.conclusion == stability.CONDITIONALLY_STABLE
        assert verdict.evidence["skipped"] == []
        assert verdict.evidence["statistic"] == "signed momentum of the scaled profile"
        assert curve.monotone_increasing == "yes"

    def test_null_evidence_is_inconclusive(self, base_c):
        # a step of 1e-13 leaves the sampled momenta equal to solver noise,
        # which the three-sigma rule must not promote to a sign
        verdict, _ = region_verdict(0.5, "c_kawahara", base_c, dc=1e-13, n=2)
        assert verdict.conclusion == stability.INCONCLUSIVE

    def test_bad_window_parameters(self, p0):
        with pytest.raises(ParameterError):
            region_verdict(0.7035976, "a_kdv", p0, dc=-0.001)
        with pytest.raises(ParameterError):
            region_verdict(0.7035976, "a_kdv", p0, n=0)

    def test_window_with_no_waves(self, p0):
        with pytest.raises(ParameterError):
            region_verdict(0.72, "a_kdv", p0, dc=1e-4, n=2)


class TestTrivialFlowVerdict:
    def test_supercritical_base(self, p0):
        verdict = trivial_flow_verdict(p0)
        assert verdict.conclusion == stability.CONDITIONALLY_STABLE
        assert verdict.evidence["nu_star_dimless"] == pytest.approx(0.01, abs=1e-6)
        assert verdict.evidence["region"] == "A"
        assert not verdict.evidence["region_b"]

    def test_critical_speed(self, p0):
        verdict = trivial_flow_verdict(p0.with_speed(0.7071068))
        assert verdict.conclusion == stability.INCONCLUSIVE
        assert abs(verdict.evidence["nu_star_dimless"]) < 1e-6

    def test_fast_flow_negative_edge(self, p0):
        verdict = trivial_flow_verdict(p0.with_speed(0.75))
        assert verdict.conclusion == stability.INCONCLUSIVE
        assert verdict.evidence["nu_star_dimless"] == pytest.approx(-1.0 / 9.0, rel=1e-9)


class TestKdvReconstruction:
    def test_speed_placement(self, p0):
        _, _, pc = kdv_reconstruction(0.2, p0, N=64)
        nd = nondimensionalize(pc)
        base = nondimensionalize(p0)
        assert nd.lam == pytest.approx(base.lambda0 + 0.04, rel=1e-12)

    def test_momentum_consistency(self, p0):
        """-P of the reconstructed wave tracks the moment derivative.

        The comparison removes the profile-width factor sqrt(beta_c -
        beta0) carried by the quadrature convention.  The window grows
        like 1/eps^2 so the hump's dc offset on the periodic cell stays
        subdominant to the genuine long-wave error.
        """
        devs = []
        for eps, n in ((0.2, 8192), (0.1, 65536), (0.05, 524288)):
            eta, psi, pc = kdv_reconstruction(eps, p0, Ly=12.0 / eps ** 2, N=n, force="flat")
            f = functionals(eta, psi, pc, force="flat")
            d1 = dprime_leading(pc.c, "a_kdv", p0)
            nd = nondimensionalize(pc)
            target = d1 / math.sqrt(nd.beta - nd.beta0)
            devs.append(abs(-f.P - target) / abs(target))
        assert devs == pytest.approx([0.02850, 0.00889, 0.00236], rel=2e-2)
        assert devs[1] / devs[0] <= 0.6
        assert devs[2] / devs[1] <= 0.6

    def test_degenerate_density_ratio(self):
        # varrho = 1/h^2 kills the quadratic coefficient of the long-wave
        # balance, so no leading-order wave exists on that ray
        bad = PhysicalParams(
            rho_plus=0.25, rho_minus=1.0, d_plus=1.0, d_minus=2.0,
            sigma=0.5, g=1.0, c=0.5,
        )
        with pytest.raises(ParameterError):
            kdv_reconstruction(0.1, bad)
