"""Discretizations of the linearized operators and their spectra.

Seven operator kinds are assembled as dense symmetric matrices: the four
limiting operators of the near-critical regimes (Schrodinger-type for the
long-wave families, quartic for the critical-tension ones), the rescaled
operator with its exact transcendental symbol, the quartic-model
linearization, and the full dimensional second-variation operator at a
given interface.  Spectra come from a dense symmetric eigensolver; the
continuous-spectrum edge is reported analytically from the kind, never
estimated from discrete clusters.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import dispersion, dno, profiles
from .errors import GridError, ParameterError
from .grids import (
    GridProfile,
    diff_matrix,
    grid_points,
    multiplier_matrix,
    spectral_derivative,
    wavenumbers,
)
from .params import NonDimParams, PhysicalParams, nondimensionalize

log = logging.getLogger(__name__)

KINDS = (
    "qtilde0_a_kdv",
    "qtilde0_a_gardner",
    "qtilde0_c",
    "qtilde0_c_cubic",
    "qeps",
    "qdelta",
    "qc_eta",
)

_TAIL_FRACTION = 1e-10


def canonical_kind(kind):
    key = str(kind).strip().lower().replace("-", "_").replace(" ", "_")
    if key not in KINDS:
        raise ParameterError(f"unknown operator kind {kind!r}; expected one of {KINDS}")
    return key


@dataclass(eq=False)
class OperatorMatrix:
    """Dense symmetric discretization of one linearized operator.

    asymmetry is the max entry deviation from symmetry before the final
    (M + M^T)/2 clean-up; ess_edge the analytic onset of continuous spectrum.
    """

    n: int
    entries: np.ndarray = field(repr=False)
    grid: tuple
    kind: str
    ess_edge: float
    asymmetry: float
    params: dict = field(default_factory=dict)


@dataclass(eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    n_negative: int
    zero_modes: list
    ess_edge: float
    lowest_vectors: np.ndarray = field(repr=False)
    tol: float

    def to_dict(self):
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "n_negative": self.n_negative,
            "zero_modes": [float(v) for v in self.zero_modes],
            "ess_edge": float(self.ess_edge),
            "tol": float(self.tol),
        }


def _tail_check(values, what):
    peak = float(np.max(np.abs(values)))
    edge = max(abs(float(values[0])), abs(float(values[-1])))
    if peak == 0.0 or edge > _TAIL_FRACTION * peak:
        raise GridError(
            f"{what} does not decay on this grid (edge/peak = {edge / peak if peak else 'inf'});"
            " enlarge L or refine N"
        )


def _gamma(params):
    g = params.get("gamma")
    if g is not None:
        return float(g)
    return (params["varrho"] + params["h"] ** 3) / 45.0


def _kdv_potential(params, grid):
    prof = profiles.closed_profile(
        profiles.ProfileSpec("KdV", {k: params[k] for k in ("varrho", "h", "beta")}), grid
    )
    _tail_check(prof.values, "KdV profile")
    return prof


def _gardner_profile(params, grid):
    branch = params.get("branch", "elevation")
    kind = "GardnerElevation" if branch == "elevation" else "GardnerDepression"
    pr = {"kappa": params["kappa"]}
    if "A" in params:
        pr["A"] = params["A"]
    else:
        pr.update(varrho=params["varrho"], h=params["h"])
    prof = profiles.closed_profile(profiles.ProfileSpec(kind, pr), grid)
    _tail_check(prof.values, "Gardner profile")
    return prof


def _kawahara_profile(delta, grid):
    sol = profiles.kawahara_solve(delta, grid)
    _tail_check(sol.profile.values, "quartic-model profile")
    return sol.profile


def assemble_operator(kind, params, grid) -> OperatorMatrix:
    """Build the dense symmetric matrix for one operator kind.

    params carries the coefficients the kind needs (varrho, h, beta, kappa,
    A, delta, gamma, eps, family, branch) or, for the dimensional operator
    at an interface, the keys "p" (PhysicalParams) and "eta" (GridProfile,
    same grid).  Differential parts are spectral, multiplier parts
    transform-diagonal, potentials pointwise.  The result is symmetrized
    with the measured pre-symmetrization asymmetry stored and logged.
    """
    kind = canonical_kind(kind)
    L, N = float(grid[0]), int(grid[1])
    x = grid_points(L, N)

    if kind == "qtilde0_a_kdv":
        varrho, h, beta = params["varrho"], params["h"], params["beta"]
        prof = _kdv_potential(params, (L, N))
        M = -(beta - (varrho + h) / 3.0) * diff_matrix(L, N, 2)
        M += np.eye(N)
        M -= 3.0 * (varrho - 1.0 / h ** 2) * np.diag(prof.values)
        edge = 1.0

    elif kind == "qtilde0_a_gardner":
        varrho, h = params["varrho"], params["h"]
        prof = _gardner_profile(params, (L, N))
        A = params.get("A", profiles.gardner_cubic_default(varrho, h))
        M = -diff_matrix(L, N, 2) + np.eye(N)
        M -= np.diag(3.0 * params["kappa"] * prof.values + 6.0 * A * prof.values ** 2)
        edge = 1.0

    elif kind == "qtilde0_c":
        gamma = _gamma(params)
        Z = _kawahara_profile(params["delta"], (L, N))
        M = gamma * (
            diff_matrix(L, N, 4)
            - 2.0 * (1.0 + params["delta"]) * diff_matrix(L, N, 2)
            + np.eye(N)
            - 2.0 * np.diag(Z.values)
        )
        edge = gamma

    elif kind == "qtilde0_c_cubic":
        varrho, h = params["varrho"], params["h"]
        gamma = _gamma(params)
        kappa, delta = params["kappa"], params["delta"]
        sol = profiles.cubic_kawahara_solve(
            delta, kappa, varrho, h, gamma=gamma, branch=params.get("branch", "elevation"), grid=(L, N)
        )
        _tail_check(sol.profile.values, "cubic quartic-model profile")
        eta = np.sqrt(gamma) * sol.profile.values
        etapp = spectral_derivative(eta, L, 2)
        D1 = diff_matrix(L, N, 1)
        M = gamma * (diff_matrix(L, N, 4) - 2.0 * (1.0 + delta) * diff_matrix(L, N, 2) + np.eye(N))
        M -= np.diag(3.0 * kappa * eta + 6.0 * (varrho + 1.0 / h ** 3) * eta ** 2)
        M += (1.0 - varrho) * (D1 @ np.diag(eta) @ D1 + np.diag(etapp))
        edge = gamma

    elif kind == "qeps":
        family = str(params.get("family", "a_kdv")).lower().replace("-", "_")
        eps = float(params["eps"])
        if not 0.0 < eps <= 0.3:
            raise ParameterError(f"eps must lie in (0, 0.3], got {eps}")
        varrho, h = params["varrho"], params["h"]
        k = wavenumbers(L, N)
        if family == "a_kdv":
            beta = params["beta"]
            nd = NonDimParams.from_ratios(beta=beta, lam=varrho + 1.0 / h + eps ** 2, varrho=varrho, h=h)
            sym = dispersion.symbol_qtilde(eps * k, nd) / eps ** 2
            prof = _kdv_potential(params, (L, N))
            M = multiplier_matrix(L, N, sym)
            M -= 3.0 * (varrho - 1.0 / h ** 2) * np.diag(prof.values)
            edge = 1.0
        elif family == "c_kawahara":
            gamma = _gamma(params)
            delta = params["delta"]
            nd = NonDimParams.from_ratios(
                beta=(varrho + h) / 3.0 + 2.0 * gamma * eps ** 2 * (1.0 + delta),
                lam=varrho + 1.0 / h + gamma * eps ** 4,
                varrho=varrho,
                h=h,
            )
            sym = dispersion.symbol_qtilde(eps * k, nd) / eps ** 4
            Z = _kawahara_profile(delta, (L, N))
            M = multiplier_matrix(L, N, sym) - 2.0 * gamma * np.diag(Z.values)
            edge = gamma
        else:
            raise ParameterError(f"unknown qeps family {params.get('family')!r}")

    elif kind == "qdelta":
        delta = params["delta"]
        Z = _kawahara_profile(delta, (L, N))
        M = (
            diff_matrix(L, N, 4)
            - 2.0 * (1.0 + delta) * diff_matrix(L, N, 2)
            + np.eye(N)
            - 2.0 * np.diag(Z.values)
        )
        edge = 1.0

    elif kind == "qc_eta":
        p: PhysicalParams = params["p"]
        eta: GridProfile = params["eta"]
        if (eta.L, eta.N) != (L, N):
            raise GridError("grid argument must match the interface profile grid")
        rv = dno.relative_velocity(eta, p)
        etap = spectral_derivative(eta.values, L, 1)
        w = np.sqrt(1.0 + etap ** 2)
        D1 = diff_matrix(L, N, 1)
        M = -D1 @ np.diag(p.sigma / w ** 3) @ D1
        mid = p.g * p.jump_rho * np.ones(N)
        third = np.zeros((N, N))
        for side, sgn, rho, b1, b2 in (
            ("plus", +1.0, p.rho_plus, rv.b1_plus, rv.b2_plus),
            ("minus", -1.0, p.rho_minus, rv.b1_minus, rv.b2_minus),
        ):
            if rho == 0.0:
                continue
            mid += sgn * rho * b1.values * spectral_derivative(b2.values, L, 1)
            Ginv = _ginv_matrix(eta, side, p, rv.path)
            Bmat = np.diag(b1.values)
            third += rho * (Bmat @ D1 @ Ginv @ D1 @ Bmat)
        M -= np.diag(mid)
        M += third
        edge = dispersion.cont_spec_edge(p).nu_star_dimensional

    asym = float(np.max(np.abs(M - M.T)))
    if asym > 1e-10:
        log.warning("operator %s asymmetry %.3e exceeds 1e-10", kind, asym)
    else:
        log.debug("operator %s asymmetry %.3e", kind, asym)
    M = 0.5 * (M + M.T)
    clean = {k: v for k, v in params.items() if k not in ("p", "eta")}
    return OperatorMatrix(N, M, (L, N), kind, float(edge), asym, clean)


def _ginv_matrix(eta, side, p, path):
    """Dense G^{-1} on the grid: flat multiplier, or oracle column by column."""
    L, N = eta.L, eta.N
    if path == "flat":
        k = wavenumbers(L, N)
        _, depth = dno._side_data(side, p)
        s = dno.layer_symbol(k, depth)
        s[0] = 1.0
        inv = 1.0 / s
        inv[0] = 0.0
        return multiplier_matrix(L, N, inv)
    layer = dno.LayerDN(eta, side, p)
    cols = np.empty((N, N))
    basis = np.eye(N)
    for j in range(N):
        cols[:, j] = layer.solve_values(basis[:, j] - 1.0 / N)
    return cols


def eigensolve(M: OperatorMatrix, k=6) -> SpectrumReport:
    """Full dense symmetric eigensolve; report the lowest k pairs.

    The zero-mode tolerance is 1e-4 of the spectral range, taken over the
    physically meaningful part [lowest eigenvalue, continuum edge]: the top
    of the raw discrete spectrum only reflects the k^4 growth of the grid
    and would drown the bound states for the fourth-order kinds.
    Translation modes are only approximately zero on a truncated domain,
    hence a tolerance at all.
    """
    vals, vecs = np.linalg.eigh(M.entries)
    spread = float(M.ess_edge) - float(vals[0])
    if spread <= 0.0:
        spread = float(vals[-1] - vals[0]) or 1.0
    tol = 1e-4 * spread
    n_negative = int(np.count_nonzero(vals < -tol))
    zero_modes = [float(v) for v in vals[np.abs(vals) <= tol]]
    k = min(int(k), M.n)
    return SpectrumReport(
        eigenvalues=vals[:k].copy(),
        n_negative=n_negative,
        zero_modes=zero_modes,
        ess_edge=M.ess_edge,
        lowest_vectors=vecs[:, :2].copy(),
        tol=tol,
    )


def rescaled_convergence_study(family, eps_list, grid, params):
    """Eigenvalue convergence of the rescaled operator toward its limit.

    Returns a list of rows {eps, nu1, nu2}; the eps = 0 row is the limiting
    operator itself.  Non-monotone convergence of |nu1(eps) - nu1(0)| is
    flagged in the returned dict.
    """
    eps_list = list(eps_list)
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise ParameterError("eps_list must be strictly decreasing")
    family = str(family).lower().replace("-", "_")
    if family == "a_kdv":
        limit_kind = "qtilde0_a_kdv"
    elif family == "c_kawahara":
        limit_kind = "qtilde0_c"
    else:
        raise ParameterError(f"unknown family {family!r}")

    rows = []
    for eps in eps_list:
        op = assemble_operator("qeps", dict(params, family=family, eps=eps), grid)
        rep = eigensolve(op, k=2)
        rows.append({"eps": float(eps), "nu1": float(rep.eigenvalues[0]), "nu2": float(rep.eigenvalues[1])})
    op0 = assemble_operator(limit_kind, params, grid)
    rep0 = eigensolve(op0, k=2)
    rows.append({"eps": 0.0, "nu1": float(rep0.eigenvalues[0]), "nu2": float(rep0.eigenvalues[1])})

    errs = [abs(r["nu1"] - rows[-1]["nu1"]) for r in rows[:-1]]
    monotone = all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))
    if not monotone:
        log.warning("rescaled convergence non-monotone: errors %s", errs)
    return {"rows": rows, "errors": errs, "monotone": monotone}
