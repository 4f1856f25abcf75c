"""Command-line front end writing flat-file artifacts for each experiment.

CSV for curves, JSON for reports; no plotting here.  Every JSON payload
embeds the resolved physical parameters, the seed, and the package and
numpy/scipy versions, so a report file is self-describing.  With
--no-timestamp the artifact names and payloads are stable, which makes
reruns byte-identical and diffable.

Exit codes: 0 success, 2 when a verdict comes back Inconclusive, 1 for any
error.  Error messages are prefixed by category (config / io / compute).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import dispersion, dno, profiles, spectra, stability
from . import params as params_mod
from .errors import IntwaveError
from .grids import GridProfile, grid_points

# Worked two-layer configuration used whenever no parameter file is given:
# water over brine at unit scales, speed just inside the supercritical range.
DEFAULT_PARAMS = {
    "d_plus": 1.0,
    "d_minus": 2.0,
    "rho_plus": 1.0,
    "rho_minus": 2.0,
    "sigma": 0.990099,
    "g": 1.0,
    "c": 0.7035976,
}

_PROFILE_KINDS = (
    "kdv",
    "gardner-elevation",
    "gardner-depression",
    "kawahara-explicit",
    "kawahara",
    "cubic-kawahara",
)


class ConfigError(Exception):
    """Bad command line, parameter file, or flag combination."""


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; 2 is reserved for
    Inconclusive verdicts here, so route usage problems to status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"config error: {message}", file=sys.stderr)
        raise SystemExit(1)


def load_params(path=None):
    """Resolve a PhysicalParams from the defaults plus an optional JSON file."""
    vals = dict(DEFAULT_PARAMS)
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"params file {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"params file {path}: expected a JSON object")
        unknown = sorted(set(raw) - set(DEFAULT_PARAMS))
        if unknown:
            raise ConfigError(
                f"params file {path}: unknown keys {unknown}; "
                f"allowed: {sorted(DEFAULT_PARAMS)}"
            )
        vals.update(raw)
    try:
        return params_mod.PhysicalParams(**{k: float(v) for k, v in vals.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameter values: {exc}") from None


def parse_grid(text, default):
    if text is None:
        return default
    try:
        left, right = text.split(",")
        return float(left), int(right)
    except ValueError:
        raise ConfigError(f"--grid expects 'L,N', got {text!r}") from None


def artifact_path(args, ext):
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    name = args.name
    if not args.no_timestamp:
        name = f"{name}-{time.strftime('%Y%m%dT%H%M%SZ', time.gmtime())}"
    return outdir / f"{name}.{ext}"


def write_table(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def read_table(path):
    """Read back a curve CSV: (header, rows) with numeric cells as floats."""
    with open(path, newline="", encoding="utf-8") as fh:
        raw = list(csv.reader(fh))
    if not raw:
        raise ConfigError(f"{path}: empty table")
    header, body = raw[0], raw[1:]
    rows = []
    for line in body:
        cells = []
        for cell in line:
            try:
                cells.append(float(cell))
            except ValueError:
                cells.append(cell)
        rows.append(cells)
    return header, rows


def write_report(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_report(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def base_payload(args, p):
    payload = {
        "command": args.name,
        "params": dataclasses.asdict(p),
        "seed": args.seed,
        "versions": {
            "intwave": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    if not args.no_timestamp:
        payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return payload


def _emit_report(args, p, body):
    payload = base_payload(args, p)
    payload.update(body)
    path = artifact_path(args, "json")
    write_report(path, payload)
    print(f"wrote {path}")
    return path


def _emit_curve(args, p, header, rows, extra=None):
    """A CSV curve plus a small JSON sidecar recording how it was made."""
    csv_path = artifact_path(args, "csv")
    write_table(csv_path, header, rows)
    print(f"wrote {csv_path}")
    body = {"table": csv_path.name, "columns": list(header), "rows": len(rows)}
    if extra:
        body.update(extra)
    _emit_report(args, p, body)
    return csv_path


# ---------------------------------------------------------------- subcommands


def _cmd_classify(args):
    p = load_params(args.params)
    nd = params_mod.nondimensionalize(p)
    label = params_mod.classify_region(nd)
    scaling = dataclasses.asdict(params_mod.speed_to_scaling(p, p.c))
    _emit_report(args, p, {
        "beta": nd.beta,
        "lambda": nd.lam,
        "beta0": nd.beta0,
        "lambda0": nd.lambda0,
        "varrho": nd.varrho,
        "h": nd.h,
        "region": label.to_dict(),
        "scaling": scaling,
    })
    print(f"region: {label.label}")
    return 0


def _cmd_bifurcation(args):
    p = load_params(args.params)
    nd = params_mod.nondimensionalize(p)
    xs = np.linspace(0.0, args.xi_max, args.samples)
    rows = []
    skipped = 0
    for which in ("Gamma2", "Gamma3"):
        for xi in xs:
            try:
                beta, lam = params_mod.bifurcation_curve(which, float(xi), nd)
            except IntwaveError:
                skipped += 1
                continue
            rows.append([which, f"{xi:.6f}", repr(beta), repr(lam)])
    rows.append(["origin", "0.000000", repr(nd.beta0), repr(nd.lambda0)])
    _emit_curve(args, p, ["curve", "xi", "beta", "lambda"], rows,
                extra={"skipped_singular": skipped,
                       "first_branch_end": params_mod.first_branch_end(nd)})
    return 0


def _cmd_dispersion(args):
    p = load_params(args.params)
    nd = params_mod.nondimensionalize(p)
    xs = np.linspace(0.0, args.k, args.samples)
    rows = [[repr(float(xi)), repr(float(dispersion.symbol_qtilde(xi, nd)))]
            for xi in xs]
    edge = dispersion.cont_spec_edge(p)
    _emit_curve(args, p, ["xi_hat", "q_tilde"], rows,
                extra={"edge": {"nu_star_dimless": edge.nu_star_dimless,
                                "nu_star_dimensional": edge.nu_star_dimensional,
                                "argmin_xi": edge.argmin_xi}})
    return 0


def _cmd_dn_check(args):
    p = load_params(args.params)
    L, N = parse_grid(args.grid, (math.pi, 256))
    report = dno.flat_agreement_report(p, L=L, base_N=N, base_ny=args.ny)

    # One seeded random smooth trace on the flat interface, checked against
    # the exact multiplier, so independent runs can vary the probe.
    rng = np.random.default_rng(args.seed)
    coeffs = rng.standard_normal(8) / (1.0 + np.arange(8)) ** 2
    eta0 = GridProfile.from_function(L, N, np.zeros_like)
    x = grid_points(L, N)
    f = sum(c * np.cos((j + 1) * x) for j, c in enumerate(coeffs))
    random_trace = {"coefficients": [float(c) for c in coeffs]}
    for side in ("plus", "minus"):
        depth = p.d_plus if side == "plus" else p.d_minus
        exact = sum(
            c * (j + 1) * math.tanh(depth * (j + 1)) * np.cos((j + 1) * x)
            for j, c in enumerate(coeffs)
        )
        got = dno.apply_G_eta(eta0, eta0.with_values(f), side, p, ny=args.ny)
        random_trace[side] = float(
            np.linalg.norm(got.values - exact) / np.linalg.norm(exact)
        )
    report["random_trace"] = random_trace
    _emit_report(args, p, {"agreement": report})
    return 0


def _resolved_kappa(args, p):
    if args.kappa is not None:
        return args.kappa
    scaling = params_mod.require_supercritical(params_mod.speed_to_scaling(p, p.c))
    return scaling.kappa_A


def _cmd_profile(args):
    p = load_params(args.params)
    nd = params_mod.nondimensionalize(p)
    kind = args.kind
    meta = {"kind": kind}

    if kind == "kdv":
        coeffs = {"varrho": nd.varrho, "h": nd.h,
                  "beta": nd.beta if args.beta is None else args.beta}
        prof = profiles.closed_profile(profiles.ProfileSpec("KdV", coeffs),
                                       parse_grid(args.grid, None))
        meta["residual"] = profiles.steady_ode_residual(prof, "KdV", coeffs)
    elif kind in ("gardner-elevation", "gardner-depression"):
        spec_kind = "GardnerElevation" if kind.endswith("elevation") else "GardnerDepression"
        coeffs = {"kappa": _resolved_kappa(args, p), "varrho": nd.varrho, "h": nd.h}
        prof = profiles.closed_profile(profiles.ProfileSpec(spec_kind, coeffs),
                                       parse_grid(args.grid, None))
        meta["residual"] = profiles.steady_ode_residual(prof, spec_kind, coeffs)
    elif kind == "kawahara-explicit":
        prof = profiles.closed_profile(profiles.ProfileSpec("KawaharaExplicit"),
                                       parse_grid(args.grid, None))
        delta = 1.0 / 6.0 if args.delta is None else args.delta
        coeffs = {"delta": delta}
        meta["residual"] = profiles.steady_ode_residual(prof, "KawaharaExplicit", coeffs)
    elif kind == "kawahara":
        if args.delta is None:
            raise ConfigError("--delta is required for kind 'kawahara'")
        grid = parse_grid(args.grid, profiles.default_grid(args.delta))
        sol = profiles.kawahara_solve(args.delta, grid)
        prof, coeffs = sol.profile, {"delta": args.delta}
        meta.update(residual=sol.residual_norm, decay_rate_fit=sol.decay_rate_fit,
                    continuation_steps=len(sol.history))
    elif kind == "cubic-kawahara":
        if args.delta is None or args.kappa is None:
            raise ConfigError("kind 'cubic-kawahara' needs --delta and --kappa")
        grid = parse_grid(args.grid, profiles.default_grid(args.delta))
        sol = profiles.cubic_kawahara_solve(args.delta, args.kappa, nd.varrho,
                                            nd.h, branch=args.branch, grid=grid)
        prof = sol.profile
        coeffs = {"delta": args.delta, "kappa": args.kappa,
                  "varrho": nd.varrho, "h": nd.h, "branch": args.branch}
        meta.update(residual=sol.residual_norm, decay_rate_fit=sol.decay_rate_fit)
    else:
        raise ConfigError(f"unknown profile kind {kind!r}")

    meta.update(coefficients=coeffs, grid=[prof.L, prof.N],
                max_abs=prof.norm_inf(), mass=prof.integral(),
                int_z2=prof.dx * float(np.sum(prof.values ** 2)))
    rows = [[repr(float(a)), repr(float(b))] for a, b in zip(prof.x, prof.values)]
    _emit_curve(args, p, ["x", "z"], rows, extra=meta)
    return 0


def _cmd_spectrum(args):
    p = load_params(args.params)
    nd = params_mod.nondimensionalize(p)
    kind = spectra.canonical_kind(args.kind)
    if kind == "qc_eta":
        raise ConfigError(
            "kind 'qc-eta' needs an interface profile and is only reachable "
            "through the library API"
        )
    op_params = {"varrho": nd.varrho, "h": nd.h, "beta": nd.beta}
    for key in ("delta", "kappa", "eps", "family", "branch"):
        value = getattr(args, key, None)
        if value is not None:
            op_params[key] = value
    if kind == "qtilde0_a_gardner" and "kappa" not in op_params:
        op_params["kappa"] = _resolved_kappa(args, p)
    grid = parse_grid(args.grid, (40.0, 512))
    matrix = spectra.assemble_operator(kind, op_params, grid)
    report = spectra.eigensolve(matrix, k=args.k)
    xs = grid_points(*grid)
    vecs = report.lowest_vectors
    csv_path = artifact_path(args, "csv")
    write_table(csv_path, ["x", "v1", "v2"],
                [[repr(float(x)), repr(float(a)), repr(float(b))]
                 for x, (a, b) in zip(xs, vecs)])
    print(f"wrote {csv_path}")
    coeffs = {k: v for k, v in op_params.items() if isinstance(v, (int, float, str))}
    _emit_report(args, p, {
        "kind": kind,
        "grid": list(grid),
        "coefficients": coeffs,
        "asymmetry": matrix.asymmetry,
        "spectrum": report.to_dict(),
        "eigenvector_table": csv_path.name,
    })
    print("lowest eigenvalues:", " ".join(f"{v:.6f}" for v in report.eigenvalues[:4]))
    return 0


def _cmd_verdict(args):
    p = load_params(args.params)
    verdict, curve = stability.region_verdict(
        args.cstar, args.family, p, dc=args.dc, n=args.n,
        gamma=args.gamma, kappa=args.kappa,
    )
    csv_path = artifact_path(args, "csv")
    write_table(csv_path, ["c", "dprime", "epsilon"],
                [[repr(float(c)), repr(float(d)), repr(float(e))]
                 for c, d, e in curve.samples])
    print(f"wrote {csv_path}")
    _emit_report(args, p, {
        "family": stability.canonical_family(args.family),
        "c_star": args.cstar,
        "dc": args.dc,
        "n": args.n,
        "verdict": verdict.to_dict(),
        "moment_curve": curve.to_dict(),
        "moment_curve_table": csv_path.name,
    })
    print(f"verdict: {verdict.conclusion}")
    return 2 if verdict.conclusion == stability.INCONCLUSIVE else 0


def _cmd_trivial(args):
    p = load_params(args.params)
    verdict = stability.trivial_flow_verdict(p)
    _emit_report(args, p, {"verdict": verdict.to_dict()})
    print(f"verdict: {verdict.conclusion}")
    return 2 if verdict.conclusion == stability.INCONCLUSIVE else 0


# --------------------------------------------------------------------- parser


def build_parser():
    parser = _Parser(
        prog="intwave",
        description="Two-layer internal wave experiments: curves to CSV, reports to JSON.",
    )
    parser.add_argument("--version", action="version", version=f"intwave {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", metavar="FILE",
                        help="JSON file overriding the built-in parameter set")
    common.add_argument("--output-dir", default=".", metavar="DIR",
                        help="directory for artifact files (default: current)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized probes (default 0)")
    common.add_argument("--no-timestamp", action="store_true",
                        help="stable artifact names and payloads, for diffing")

    sub = parser.add_subparsers(dest="name", required=True, metavar="SUBCOMMAND")

    sp = sub.add_parser("classify", parents=[common],
                        help="parameter-plane region and slow-speed scaling")
    sp.set_defaults(handler=_cmd_classify)

    sp = sub.add_parser("bifurcation", parents=[common],
                        help="sample both branch curves in the (beta, lambda) plane")
    sp.add_argument("--xi-max", type=float, default=5.0)
    sp.add_argument("--samples", type=int, default=101)
    sp.set_defaults(handler=_cmd_bifurcation)

    sp = sub.add_parser("dispersion", parents=[common],
                        help="sample the linear symbol over wavenumbers")
    sp.add_argument("--k", type=float, default=5.0, help="largest wavenumber")
    sp.add_argument("--samples", type=int, default=256)
    sp.set_defaults(handler=_cmd_dispersion)

    sp = sub.add_parser("dn-check", parents=[common],
                        help="flat-interface operator against the exact multiplier")
    sp.add_argument("--grid", metavar="L,N", help="base grid (default pi,256)")
    sp.add_argument("--ny", type=int, default=64, help="vertical resolution")
    sp.set_defaults(handler=_cmd_dn_check)

    sp = sub.add_parser("profile", parents=[common],
                        help="solitary-wave profile of one reduced model")
    sp.add_argument("--kind", required=True, choices=_PROFILE_KINDS)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--kappa", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--branch", choices=("elevation", "depression"),
                    default="elevation")
    sp.add_argument("--grid", metavar="L,N")
    sp.set_defaults(handler=_cmd_profile)

    sp = sub.add_parser("spectrum", parents=[common],
                        help="lowest eigenvalues of one linearized operator")
    sp.add_argument("--kind", required=True)
    sp.add_argument("--grid", metavar="L,N", help="default 40,512")
    sp.add_argument("--k", type=int, default=6, help="how many eigenvalues")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--kappa", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--family")
    sp.add_argument("--branch", choices=("elevation", "depression"))
    sp.set_defaults(handler=_cmd_spectrum)

    sp = sub.add_parser("verdict", parents=[common],
                        help="moment-curve stability verdict near a speed")
    sp.add_argument("--family", required=True,
                    help="a-kdv, a-gardner-plus, a-gardner-minus, or c-kawahara")
    sp.add_argument("--cstar", type=float, required=True)
    sp.add_argument("--dc", type=float, default=0.002)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--gamma", choices=("quartic", "printed"), default="quartic")
    sp.add_argument("--kappa", type=float)
    sp.set_defaults(handler=_cmd_verdict)

    sp = sub.add_parser("trivial", parents=[common],
                        help="continuous-spectrum edge check for the flat state")
    sp.set_defaults(handler=_cmd_trivial)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except IntwaveError as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
