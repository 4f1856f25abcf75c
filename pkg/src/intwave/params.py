"""Physical parameters, dimensionless groups, and the parameter-plane geometry.

The configuration is two immiscible layers of depths d_plus (upper, lighter,
density rho_plus) and d_minus (lower, density rho_minus) with interfacial
tension sigma, gravity g, and a steady translation speed c.  The dimensionless
plane is (beta, lambda) with

    beta   = sigma / (d_plus * rho_minus * c**2)
    lambda = -g * (rho_plus - rho_minus) * d_plus / (rho_minus * c**2)

and the critical point (beta0, lambda0) = ((varrho + h)/3, varrho + 1/h),
where varrho = rho_plus/rho_minus and h = d_minus/d_plus.

Two curves organize the plane above lambda = lambda0.  This module evaluates
both from the double-root conditions on the linear symbol: the oscillatory
branch (double real spatial eigenvalues, written with trig functions) and the
hyperbolic branch (double imaginary eigenvalues).  Both meet at the critical
point with matching curvature coefficients, which is what the series fallback
below encodes.
"""

import json
import math
from dataclasses import dataclass, asdict, replace

import numpy as np
from scipy.optimize import brentq

from .errors import ParameterError

# Region tags for the (beta, lambda) plane.
REGION_A = "A"
REGION_B = "B"
REGION_C = "C"
REGION_OTHER = "Other"

# Half-width of the strip around the oscillatory branch that is labelled C.
DEFAULT_C_WIDTH = 0.02

# Below this |xi| the closed curve formulas lose digits to cancellation and
# the series expansions take over.
_SERIES_CUTOFF = 1e-3


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional configuration of the two-layer channel.

    rho_plus may be zero (single fluid under a vacuum half-layer) but the
    stable stratification rho_plus <= rho_minus is required throughout.
    """

    rho_plus: float
    rho_minus: float
    d_plus: float
    d_minus: float
    sigma: float
    g: float
    c: float

    def __post_init__(self):
        if not (self.rho_minus > 0):
            raise ParameterError("rho_minus must be positive")
        if not (0 <= self.rho_plus <= self.rho_minus):
            raise ParameterError("need 0 <= rho_plus <= rho_minus")
        if not (self.d_plus > 0 and self.d_minus > 0):
            raise ParameterError("layer depths must be positive")
        if not (self.sigma > 0):
            raise ParameterError("sigma must be positive")
        if not (self.g > 0):
            raise ParameterError("g must be positive")
        if not (self.c != 0 and math.isfinite(self.c)):
            raise ParameterError("c must be nonzero and finite")

    @property
    def jump_rho(self):
        """Density jump rho_plus - rho_minus, nonpositive here."""
        return self.rho_plus - self.rho_minus

    def with_speed(self, c):
        return replace(self, c=float(c))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        keys = ("rho_plus", "rho_minus", "d_plus", "d_minus", "sigma", "g", "c")
        missing = [k for k in keys if k not in d]
        if missing:
            raise ParameterError(f"parameter file missing keys: {missing}")
        return cls(**{k: float(d[k]) for k in keys})

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class NonDimParams:
    """Dimensionless groups plus cached critical constants.

    gamma_quartic is the quartic Taylor coefficient of the symbol residual at
    criticality, (varrho + h**3)/45.  gamma_printed is the commonly quoted
    variant (varrho + h)/45; the two agree only when h = 1.  Both are carried
    so reports can show the discrepancy; the quartic value is what the series
    actually produces and is the default everywhere a gamma is consumed.
    """

    beta: float
    lam: float
    varrho: float
    h: float
    beta0: float
    lambda0: float
    gamma_printed: float
    gamma_quartic: float

    @classmethod
    def from_ratios(cls, beta, lam, varrho, h):
        if not (0 <= varrho <= 1):
            raise ParameterError("varrho = rho_plus/rho_minus must lie in [0, 1]")
        if not (h > 0):
            raise ParameterError("depth ratio h must be positive")
        return cls(
            beta=float(beta),
            lam=float(lam),
            varrho=float(varrho),
            h=float(h),
            beta0=(varrho + h) / 3.0,
            lambda0=varrho + 1.0 / h,
            gamma_printed=(varrho + h) / 45.0,
            gamma_quartic=(varrho + h ** 3) / 45.0,
        )

    @classmethod
    def at_critical(cls, varrho, h):
        """The critical point itself, beta = beta0 and lam = lambda0."""
        probe = cls.from_ratios(0.0, 0.0, varrho, h)
        return replace(probe, beta=probe.beta0, lam=probe.lambda0)

    def to_dict(self):
        d = asdict(self)
        # external spelling of the gravity group
        d["lambda"] = d.pop("lam")
        return d


def nondimensionalize(p: PhysicalParams) -> NonDimParams:
    """Map a dimensional configuration to the (beta, lambda) plane."""
    denom = p.rho_minus * p.c ** 2
    beta = p.sigma / (p.d_plus * denom)
    lam = -p.g * p.jump_rho * p.d_plus / denom
    return NonDimParams.from_ratios(beta, lam, p.rho_plus / p.rho_minus, p.d_minus / p.d_plus)


def _layers(nd):
    """Weights and depth scales of the two layers in units of the upper one."""
    return ((nd.varrho, 1.0), (1.0, nd.h))


def bifurcation_curve(which, xi, nd: NonDimParams):
    """Point (beta, lambda) on one of the two branch curves at parameter xi >= 0.

    which = "Gamma2" gives the oscillatory branch (trig form, singular where
    sin(a xi) vanishes); which = "Gamma3" the hyperbolic branch, defined for
    all xi >= 0.  Near xi = 0 both are evaluated by their series through
    sixth order to avoid cancellation; the leading corrections are
    +-2 gamma_quartic xi**2 in beta and +gamma_quartic xi**4 in lambda.
    """
    xi = float(xi)
    if xi < 0 or not math.isfinite(xi):
        raise ParameterError(f"xi must be finite and >= 0, got {xi}")

    g4 = nd.gamma_quartic
    g6 = (nd.varrho + nd.h ** 5)

    if which == "Gamma2":
        if xi < _SERIES_CUTOFF:
            beta = nd.beta0 + 2.0 * g4 * xi ** 2 + (2.0 / 315.0) * g6 * xi ** 4
            lam = nd.lambda0 + g4 * xi ** 4 + (4.0 / 945.0) * g6 * xi ** 6
            return beta, lam
        beta = 0.0
        lam_sum = 0.0
        for r, a in _layers(nd):
            s = math.sin(a * xi)
            if s == 0.0:
                raise ParameterError(f"Gamma2 is singular at xi = {xi} (sin({a}*xi) = 0)")
            beta += r * (a * xi - s * math.cos(a * xi)) / (2.0 * xi * s * s)
            lam_sum += r * xi * math.cos(a * xi) / s
        return beta, beta * xi ** 2 + lam_sum

    if which == "Gamma3":
        if xi < _SERIES_CUTOFF:
            beta = nd.beta0 - 2.0 * g4 * xi ** 2 + (2.0 / 315.0) * g6 * xi ** 4
            lam = nd.lambda0 + g4 * xi ** 4 - (4.0 / 945.0) * g6 * xi ** 6
            return beta, lam
        beta = 0.0
        lam_sum = 0.0
        for r, a in _layers(nd):
            sh = math.sinh(a * xi)
            beta += r * (sh * math.cosh(a * xi) - a * xi) / (2.0 * xi * sh * sh)
            lam_sum += r * xi * math.cosh(a * xi) / sh
        return beta, -beta * xi ** 2 + lam_sum

    raise ParameterError(f"unknown curve {which!r}, expected 'Gamma2' or 'Gamma3'")


def first_branch_end(nd):
    """Largest xi on which the trig branch is smooth: pi over the larger depth scale."""
    return math.pi / max(1.0, nd.h)


def _curve_beta_at_lambda(which, lam, nd):
    """Invert lambda(xi) on the first branch of a curve and return beta there.

    Both branch curves have lambda increasing from lambda0, the trig one
    blowing up at the end of its first branch, the hyperbolic one growing
    linearly, so a bracketing root find is enough.
    """
    target = lam - nd.lambda0
    if target < 0:
        raise ParameterError("curve inversion needs lam >= lambda0")
    if target < 1e-30:
        return nd.beta0

    def f(xi):
        return bifurcation_curve(which, xi, nd)[1] - lam

    if which == "Gamma2":
        end = first_branch_end(nd)
        lo, hi = 1e-8, end * (1.0 - 1e-10)
        # lambda -> +infinity at the branch end, so the bracket always closes
        if f(hi) < 0:
            raise ParameterError("lambda target beyond the first trig branch")
    else:
        lo, hi = 1e-8, 1.0
        while f(hi) < 0:
            hi *= 2.0
            if hi > 1e6:
                raise ParameterError("failed to bracket the hyperbolic branch")
    xi_star = brentq(f, lo, hi, xtol=1e-13, rtol=8.9e-16)
    return bifurcation_curve(which, xi_star, nd)[0]


@dataclass(frozen=True)
class RegionLabel:
    """Classification of a point of the (beta, lambda) plane.

    distances holds signed offsets (lam - lambda0, beta - beta_Gamma2(lam),
    beta - beta_Gamma3(lam)); the curve offsets are NaN below lambda0 where
    the curves do not reach.
    """

    label: str
    distances: tuple

    def to_dict(self):
        return {"label": self.label, "distances": list(self.distances)}


def classify_region(nd: NonDimParams, c_width=DEFAULT_C_WIDTH) -> RegionLabel:
    """Label a parameter point A, B, C, or Other.

    C is a strip of half-width c_width around the oscillatory branch and wins
    ties; A lies to the right of that strip; B is the remaining part of the
    wedge above the hyperbolic branch where the linear symbol stays positive.
    Everything below lambda0 is Other.
    """
    if c_width <= 0:
        raise ParameterError("c_width must be positive")
    d1 = nd.lam - nd.lambda0
    if d1 < 0:
        return RegionLabel(REGION_OTHER, (d1, float("nan"), float("nan")))

    d2 = nd.beta - _curve_beta_at_lambda("Gamma2", nd.lam, nd)
    d3 = nd.beta - _curve_beta_at_lambda("Gamma3", nd.lam, nd)
    if abs(d2) <= c_width:
        label = REGION_C
    elif d2 > c_width:
        label = REGION_A
    elif d3 > 0:
        label = REGION_B
    else:
        label = REGION_OTHER
    return RegionLabel(label, (d1, d2, d3))


@dataclass(frozen=True)
class SpeedScaling:
    """Slow-speed expansion data for a configuration driven at speed c.

    The epsilon fields exist only for supercritical speeds (lambda_c above
    lambda0); for subcritical ones they are None and consumers raise.
    epsilon_A feeds the long-wave families at fixed beta > beta0, epsilon_C
    and delta_c the near-critical family, kappa_A and kappa_C the mixed
    quadratic coefficient in the respective scalings.
    """

    beta_c: float
    lambda_c: float
    epsilon_A: float | None
    epsilon_C: float | None
    delta_c: float | None
    kappa_A: float | None
    kappa_C: float | None


def speed_to_scaling(base: PhysicalParams, c, gamma="quartic") -> SpeedScaling:
    """Expansion parameters at speed c, holding the rest of base fixed.

    gamma selects which quartic coefficient normalizes the near-critical
    fields: "quartic" (default, the series value) or "printed".
    """
    nd = nondimensionalize(base.with_speed(c))
    if gamma == "quartic":
        g = nd.gamma_quartic
    elif gamma == "printed":
        g = nd.gamma_printed
    else:
        raise ParameterError(f"gamma must be 'quartic' or 'printed', got {gamma!r}")

    gap = nd.lam - nd.lambda0
    if gap < 0:
        return SpeedScaling(nd.beta, nd.lam, None, None, None, None, None)

    eps_a = math.sqrt(gap)
    eps_c = (gap / g) ** 0.25
    mixed = nd.varrho - 1.0 / nd.h ** 2
    kappa_a = mixed / eps_a if eps_a > 0 else None
    kappa_c = mixed / eps_c ** 2 if eps_c > 0 else None
    delta_c = (nd.beta - nd.beta0) / (2.0 * g * eps_c ** 2) - 1.0 if eps_c > 0 else None
    return SpeedScaling(nd.beta, nd.lam, eps_a, eps_c, delta_c, kappa_a, kappa_c)


def require_supercritical(scaling: SpeedScaling):
    from .errors import SubcriticalSpeedError

    if scaling.epsilon_A is None:
        raise SubcriticalSpeedError(
            f"lambda_c = {scaling.lambda_c} is not above critical; no expansion parameters"
        )
    return scaling
