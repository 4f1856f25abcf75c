"""Energy functionals, the moment of instability, and stability verdicts.

The traveling-wave problem is the critical-point equation of E - cP.  This
module evaluates those functionals and their gradients on grid states,
computes the leading-order derivative d'(c) of the moment of instability
for the four near-critical wave families, and turns sampled monotonicity
into a three-sigma verdict.  Uniform flows get their own verdict from the
sign of the continuous-spectrum edge.
"""

import concurrent.futures
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import dispersion, dno, profiles
from .errors import ParameterError
from .grids import GridProfile, require_same_grid, spectral_derivative
from .params import (
    PhysicalParams,
    classify_region,
    nondimensionalize,
    require_supercritical,
    speed_to_scaling,
)

log = logging.getLogger(__name__)

FAMILIES = ("a_kdv", "a_gardnerplus", "a_gardnerminus", "c_kawahara")

CONDITIONALLY_STABLE = "ConditionallyStable"
UNSTABLE = "Unstable"
INCONCLUSIVE = "Inconclusive"

_EPS_GATE = 0.3
# relative numerical-error model for the sampled statistics: the profile
# quadratures are spectrally accurate and the scaling maps are closed-form,
# so a part in 1e9 is already generous
_STAT_RELERR = 1e-9


def canonical_family(family):
    key = str(family).strip().lower().replace("-", "").replace("_", "")
    table = {
        "akdv": "a_kdv",
        "agardnerplus": "a_gardnerplus",
        "agardnerminus": "a_gardnerminus",
        "ckawahara": "c_kawahara",
    }
    if key not in table:
        raise ParameterError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return table[key]


@dataclass(frozen=True)
class StateFunctionals:
    """Kinetic, potential, total energy, and momentum of a grid state."""

    K: float
    V: float
    E: float
    P: float

    def to_dict(self):
        return {"K": self.K, "V": self.V, "E": self.E, "P": self.P}


@dataclass(eq=False)
class MomentCurve:
    """Sampled d'(c) values around a target speed.

    samples holds (c, dprime, epsilon) triples sorted in c.
    monotone_increasing is the raw sign pattern of the forward differences
    ("yes", "no", or "mixed"); second_difference_sign the sign of their mean
    centered second difference.
    """

    samples: list
    monotone_increasing: str
    second_difference_sign: float

    def to_dict(self):
        return {
            "samples": [
                {"c": c, "dprime": d, "epsilon": e} for (c, d, e) in self.samples
            ],
            "monotone_increasing": self.monotone_increasing,
            "second_difference_sign": self.second_difference_sign,
        }


@dataclass(eq=False)
class Verdict:
    conclusion: str
    criterion: str
    evidence: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "conclusion": self.conclusion,
            "criterion": self.criterion,
            "evidence": self.evidence,
        }


def psistar(eta: GridProfile, c, p: PhysicalParams, ny=dno.DEFAULT_NY, force=None) -> GridProfile:
    """Trace difference psi* = -c A(eta)^{-1} eta' of the steady stream.

    eta' is mean-zero by periodicity, so the inverse is well defined even
    for profiles carrying net mass (e.g. a solitary hump on a long window).
    """
    suite = dno.operator_suite(eta, p, ny, force)
    etap = spectral_derivative(eta.values, eta.L, 1)
    return eta.with_values(-c * suite.solve_A(etap))


def functionals(eta: GridProfile, psi: GridProfile, p: PhysicalParams, ny=dno.DEFAULT_NY, force=None) -> StateFunctionals:
    """Energy and momentum: K = (1/2) int psi A psi, V from gravity plus
    surface area excess, P = -int eta' psi."""
    require_same_grid(eta, psi)
    suite = dno.operator_suite(eta, p, ny, force)
    dx = eta.dx
    etap = spectral_derivative(eta.values, eta.L, 1)
    K = 0.5 * dx * float(np.sum(psi.values * suite.apply_A(psi.values)))
    V = -0.5 * p.g * p.jump_rho * dx * float(np.sum(eta.values ** 2))
    V += p.sigma * dx * float(np.sum(np.sqrt(1.0 + etap ** 2) - 1.0))
    P = -dx * float(np.sum(etap * psi.values))
    return StateFunctionals(K=K, V=V, E=K + V, P=P)


def steady_residual(eta: GridProfile, psi: GridProfile, c, p: PhysicalParams, ny=dno.DEFAULT_NY, force=None):
    """Discrete L2 norms of the two components of E'(u) - c P'(u).

    The psi gradient is A psi + c eta'.  The eta gradient combines the
    quadratic kinetic terms (through the layer traces theta = G^{-1} A psi),
    the hydrostatic term, and the curvature term, minus c psi'.  Interface
    variations preserve the enclosed mass, so the eta component is projected
    onto mean-zero fields; the discarded constant is the Bernoulli level of
    the stream.
    """
    require_same_grid(eta, psi)
    suite = dno.operator_suite(eta, p, ny, force)
    L = eta.L
    dx = eta.dx
    etap = spectral_derivative(eta.values, L, 1)
    w = np.sqrt(1.0 + etap ** 2)

    Apsi = suite.apply_A(psi.values)
    res_psi = Apsi + c * etap

    acc = -p.g * p.jump_rho * eta.values - p.sigma * spectral_derivative(etap / w, L, 1)
    for side, sgn, rho in dno._rho_sides(p):
        theta = suite.solve_G(Apsi, side)
        a1, a2 = dno._a1_a2(sgn, etap, theta, Apsi, L)
        acc += 0.5 * rho * (a1 * spectral_derivative(theta, L, 1) + a2 * Apsi)
    res_eta = acc - c * spectral_derivative(psi.values, L, 1)
    res_eta = res_eta - np.mean(res_eta)

    def nrm(v):
        return float(math.sqrt(dx * float(np.sum(v * v))))

    return nrm(res_eta), nrm(res_psi)


def _rho_depth_sum(p: PhysicalParams):
    return p.rho_plus + p.rho_minus * p.d_plus / p.d_minus


def _profile_l2sq(values, dx):
    return dx * float(np.sum(values ** 2))


def dprime_leading(c, family, base: PhysicalParams, gamma="quartic", kappa=None, A=None, grid=None):
    """Leading-order d'(c) for one bound-state family.

    Region A (long-wave families, amplitude exponent m):
        d' = -c eps^(2m-1) d+^2 sqrt(beta_c - beta0) sum rho (d+/d-) int etatilde^2
    Region C (critical tension):
        d' = -c eps^7 d+^2 gamma_coeff sum rho (d+/d-) int Z^2

    kappa overrides the Gardner mixed coefficient (default: the physical
    kappa of the speed scaling); A the cubic coefficient.
    """
    family = canonical_family(family)
    sc = require_supercritical(speed_to_scaling(base, c, gamma))
    nd_ratios = nondimensionalize(base.with_speed(c))
    dsum = _rho_depth_sum(base)

    if family in ("a_kdv", "a_gardnerplus", "a_gardnerminus"):
        eps = sc.epsilon_A
        if eps > _EPS_GATE:
            raise ParameterError(f"epsilon = {eps:.3f} outside the asymptotic gate {_EPS_GATE}")
        root = math.sqrt(sc.beta_c - nd_ratios.beta0)
        if family == "a_kdv":
            m = 2
            L = grid[0] if grid else 40.0 * root
            N = grid[1] if grid else 1024
            prof = profiles.closed_profile(
                profiles.ProfileSpec(
                    "KdV", {"varrho": nd_ratios.varrho, "h": nd_ratios.h, "beta": sc.beta_c}
                ),
                (L, N),
            )
        else:
            m = 1
            kap = sc.kappa_A if kappa is None else float(kappa)
            pr = {"kappa": kap}
            if A is not None:
                pr["A"] = float(A)
            else:
                pr.update(varrho=nd_ratios.varrho, h=nd_ratios.h)
            kind = "GardnerElevation" if family == "a_gardnerplus" else "GardnerDepression"
            prof = profiles.closed_profile(profiles.ProfileSpec(kind, pr), grid or (40.0, 1024))
        I2 = _profile_l2sq(prof.values, prof.dx)
        return -c * eps ** (2 * m - 1) * base.d_plus ** 2 * root * dsum * I2

    # critical-tension family
    eps = sc.epsilon_C
    if eps is None:
        raise ParameterError("speed scaling has no critical-tension branch here")
    if eps > _EPS_GATE:
        raise ParameterError(f"epsilon = {eps:.3f} outside the asymptotic gate {_EPS_GATE}")
    gval = nd_ratios.gamma_quartic if gamma == "quartic" else nd_ratios.gamma_printed
    sol = profiles.kawahara_solve(sc.delta_c, grid)
    I2 = _profile_l2sq(sol.profile.values, sol.profile.dx)
    return -c * eps ** 7 * base.d_plus ** 2 * gval * dsum * I2


@dataclass(frozen=True)
class GardnerMomentum:
    """Momentum integral of a Gardner branch, three ways.

    quadrature is adaptive integration of the squared profile (ground
    truth), closed_form the antiderivative-based exact value, printed the
    arctan expression circulating for the depression branch (NaN for
    elevation, and negative in the kappa -> 0 limit, hence the flag).
    """

    quadrature: float
    closed_form: float
    printed: float
    difference: float
    printed_suspect: bool


def gardner_momentum_closed_form(kappa, A, sign) -> GardnerMomentum:
    """int u^2 dx for u = 1/(p + sign q cosh x), p = kappa/2, q = sqrt(kappa^2/4 + A)."""
    if A <= 0:
        raise ParameterError(f"need cubic coefficient A > 0, got {A}")
    if sign not in (+1, -1):
        raise ParameterError("sign must be +1 (elevation) or -1 (depression)")
    p = 0.5 * kappa
    q = 0.5 * math.sqrt(kappa * kappa + 4.0 * A)

    def usq(x):
        return 1.0 / (p + sign * q * math.cosh(x)) ** 2

    quadrature = 2.0 * quad(usq, 0.0, 60.0, epsabs=1e-13, epsrel=1e-13)[0]

    # antiderivative route: int dx/(a + b cosh x)^2 over the line equals
    # 2/(b^2-a^2) - 4a (b^2-a^2)^{-3/2} arctan(sqrt((b-a)/(b+a))) for b > |a|
    a = sign * p
    T = math.sqrt((q - a) / (q + a))
    closed = 2.0 / A - 4.0 * a * A ** -1.5 * math.atan(T)

    if sign == -1:
        printed = (
            kappa
            * math.atan((kappa + math.sqrt(kappa * kappa + 4.0 * A)) / (4.0 * A))
            / (2.0 * A ** 1.5)
            - 1.0 / (2.0 * A)
        )
    else:
        printed = float("nan")
    suspect = (not math.isfinite(printed)) or abs(printed - closed) > 1e-6 * max(1.0, abs(closed))
    if suspect and sign == -1:
        log.info(
            "printed depression momentum %.6g disagrees with antiderivative %.6g",
            printed,
            closed,
        )
    return GardnerMomentum(
        quadrature=quadrature,
        closed_form=closed,
        printed=printed,
        difference=quadrature - closed,
        printed_suspect=suspect,
    )


def _worker_count(njobs):
    env = os.environ.get("INTWAVE_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(njobs, cap))


def region_verdict(c_star, family, base: PhysicalParams, dc=0.002, n=5, gamma="quartic", kappa=None, A=None):
    """Sample d'(c) on [c* - n dc, c* + n dc] and pass a three-sigma verdict.

    The monotonicity statistic is d' itself for the Region A families and
    sign(c) * int Z^2 for the critical-tension family (its d' differs from
    that only by the strictly increasing factor -c eps^7).  Strictly
    increasing beyond error bars means ConditionallyStable; strictly
    decreasing is judged Unstable for the critical-tension family only;
    anything else is Inconclusive.
    """
    family = canonical_family(family)
    if dc < 0 or n < 1:
        raise ParameterError("need dc >= 0 and n >= 1")
    cs = [c_star + k * dc for k in range(-n, n + 1)]

    # the monotonicity window should stay supercritical and inside the
    # asymptotic gate; samples that fall off that range carry no wave and
    # are dropped rather than poisoning the whole verdict
    usable, skipped = [], []
    for c in cs:
        sc = speed_to_scaling(base, c, gamma)
        eps = sc.epsilon_C if family == "c_kawahara" else sc.epsilon_A
        if eps is None:
            skipped.append({"c": c, "reason": "subcritical"})
        elif eps > _EPS_GATE:
            skipped.append({"c": c, "reason": "outside asymptotic gate"})
        else:
            usable.append(c)
    if len(usable) < 2:
        raise ParameterError(
            f"fewer than two usable speeds in [{cs[0]:.6g}, {cs[-1]:.6g}]"
        )
    if skipped:
        log.warning("dropping %d of %d speeds outside the admissible window", len(skipped), len(cs))
    cs = usable

    def sample(c):
        sc = require_supercritical(speed_to_scaling(base, c, gamma))
        if family == "c_kawahara":
            nd = nondimensionalize(base.with_speed(c))
            gval = nd.gamma_quartic if gamma == "quartic" else nd.gamma_printed
            sol = profiles.kawahara_solve(sc.delta_c)
            I2 = _profile_l2sq(sol.profile.values, sol.profile.dx)
            eps = sc.epsilon_C
            d = -c * eps ** 7 * base.d_plus ** 2 * gval * _rho_depth_sum(base) * I2
            stat = math.copysign(1.0, c) * I2
        else:
            eps = sc.epsilon_A
            d = dprime_leading(c, family, base, gamma=gamma, kappa=kappa, A=A)
            stat = d
        return c, d, eps, stat

    with concurrent.futures.ThreadPoolExecutor(max_workers=_worker_count(len(cs))) as ex:
        rows = list(ex.map(sample, cs))

    samples = [(c, d, e) for (c, d, e, _) in rows]
    stats = [s for (_, _, _, s) in rows]
    diffs = [s2 - s1 for s1, s2 in zip(stats, stats[1:])]
    errs = [_STAT_RELERR * abs(s) + 1e-16 for s in stats]
    bars = [3.0 * math.hypot(e1, e2) for e1, e2 in zip(errs, errs[1:])]

    dvals = [d for (_, d, _) in samples]
    ddiffs = [d2 - d1 for d1, d2 in zip(dvals, dvals[1:])]
    if all(d > 0 for d in ddiffs):
        mono = "yes"
    elif all(d < 0 for d in ddiffs):
        mono = "no"
    else:
        mono = "mixed"
    second = [ddiffs[i + 1] - ddiffs[i] for i in range(len(ddiffs) - 1)]
    curve = MomentCurve(
        samples=samples,
        monotone_increasing=mono,
        second_difference_sign=float(np.sign(np.mean(second))) if second else 0.0,
    )

    statistic = "dprime" if family != "c_kawahara" else "signed momentum of the scaled profile"
    evidence = {
        "family": family,
        "statistic": statistic,
        "forward_differences": diffs,
        "three_sigma": bars,
        "skipped": skipped,
    }
    if all(d > b for d, b in zip(diffs, bars)):
        conclusion = CONDITIONALLY_STABLE
    elif family == "c_kawahara" and all(d < -b for d, b in zip(diffs, bars)):
        conclusion = UNSTABLE
    else:
        conclusion = INCONCLUSIVE
    return Verdict(conclusion, f"monotonicity of {statistic}", evidence), curve


def trivial_flow_verdict(p: PhysicalParams) -> Verdict:
    """Stability verdict for the uniform flow from the symbol minimum.

    The conclusion rests on positivity of the dimensionless edge alone; the
    region classification is reported alongside so the strong-tension
    hypothesis can be checked separately.
    """
    edge = dispersion.cont_spec_edge(p)
    nd = nondimensionalize(p)
    label = classify_region(nd)
    err = 1e-10 * max(1.0, abs(nd.lam), nd.beta)
    evidence = {
        "nu_star_dimless": edge.nu_star_dimless,
        "nu_star_dimensional": edge.nu_star_dimensional,
        "argmin_xi": edge.argmin_xi,
        "numerical_error": err,
        "region": label.label,
        "region_b": label.label == "B",
    }
    if edge.nu_star_dimless > 3.0 * err:
        return Verdict(CONDITIONALLY_STABLE, "positive continuous-spectrum edge", evidence)
    return Verdict(INCONCLUSIVE, "positive continuous-spectrum edge", evidence)


def kdv_reconstruction(eps, base: PhysicalParams, Ly=None, N=2048, ny=dno.DEFAULT_NY, force=None):
    """Leading-order long-wave traveling wave at amplitude parameter eps.

    Picks the speed on the base parameter ray with lambda_c = lambda0 +
    eps^2, builds eta(x) = eps^2 d+ etatilde(eps x / d+) on a dimensional
    grid covering a fixed window of the scaled variable, and pairs it with
    psi*.  Returns (eta, psi, params at that speed).
    """
    nd0 = nondimensionalize(base)
    lam_c = nd0.lambda0 + eps ** 2
    c = math.sqrt(-base.g * base.jump_rho * base.d_plus / (base.rho_minus * lam_c))
    p_c = base.with_speed(c)
    nd = nondimensionalize(p_c)
    mixed = nd.varrho - 1.0 / nd.h ** 2
    if mixed == 0.0:
        raise ParameterError("long-wave reconstruction undefined when varrho = 1/h^2")
    root = math.sqrt(nd.beta - nd.beta0)
    if Ly is None:
        Ly = 40.0 * root
    Ldim = Ly * base.d_plus / eps

    def etafun(x):
        y = eps * x / base.d_plus
        s = profiles._sech(y / (2.0 * root))
        return eps ** 2 * base.d_plus * s * s / mixed

    eta = GridProfile.from_function(Ldim, N, etafun)
    psi = psistar(eta, c, p_c, ny=ny, force=force)
    return eta, psi, p_c
