"""Command-line interface.

Subcommands: ``closed-form`` (evaluate the minimizer's radius, energy,
and multiplier), ``verify-el`` (grid check of the sufficiency
conditions), ``convexity`` (second differences of the convexity
combination), ``simulate`` (particle descent with CSV/JSON artifacts),
and ``phase-scan`` (regime map over an (alpha, beta) rectangle).

Exit codes: 0 success, 2 for parameters outside a mathematical domain
or supported regime, 3 when a verification or iteration fails, 64 for
usage errors.  All JSON carries a top-level ``"schema": "aggremin/1"``;
floats are serialized by ``repr`` so they round-trip bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import flow
from .closed_form import beta_star, classify, energy, eta, radius
from .errors import (
    DomainError,
    IllConditioned,
    NonConvergence,
    QuadratureFailure,
    RegimeError,
    StallError,
)
from .params import KernelParams
from .verify import convexity_report, verify_euler_lagrange

SCHEMA = "aggremin/1"

__all__ = ["main"]


class _UsageError(Exception):
    """A well-formed invocation with values outside CLI preconditions."""


class _Parser(argparse.ArgumentParser):
    # BSD convention: malformed command lines exit 64, not argparse's 2,
    # which this tool reserves for domain errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


def _emit(payload: dict, out_path) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params_from(args) -> KernelParams:
    alpha = args.alpha
    if args.log_alpha and alpha is None:
        alpha = 0.0
    beta = args.beta
    if args.log_beta and beta is None:
        beta = 0.0
    if alpha is None:
        raise _UsageError("--alpha is required (or pass --log-alpha)")
    if beta is None:
        raise _UsageError("--beta is required (or pass --log-beta)")
    return KernelParams(
        d=args.d,
        alpha=alpha,
        beta=beta,
        alpha_is_log=args.log_alpha,
        beta_is_log=args.log_beta,
    )


def _beta_star_or_none(params: KernelParams):
    if params.d < 2 or params.alpha_is_log or params.alpha < 2:
        return None
    return beta_star(params.d, params.alpha)


def _density_description(params: KernelParams, tag: str) -> str:
    r = radius(params)
    if tag in ("SphereTheorem1", "Boundary"):
        return f"uniform probability measure on the sphere of radius {r!r}"
    expo = (2.0 - params.beta - params.d) / 2.0
    return (
        f"radial density proportional to (R^2 - r^2)^{expo!r} "
        f"on the ball of radius {r!r}"
    )


def cmd_closed_form(args) -> int:
    params = _params_from(args)
    tag = classify(params)
    if tag.tag == "OutOfScope":
        raise RegimeError(tag.detail)
    report = {
        "schema": SCHEMA,
        "regime": tag.tag,
        "detail": tag.detail,
        "d": params.d,
        "alpha": params.alpha,
        "beta": params.beta,
        "alpha_is_log": params.alpha_is_log,
        "beta_is_log": params.beta_is_log,
        "beta_star": _beta_star_or_none(params),
        "R": radius(params),
        "E": energy(params),
        "eta": eta(params),
        "density_description": _density_description(params, tag.tag),
    }
    _emit(report, args.out)
    return 0


def cmd_verify_el(args) -> int:
    params = _params_from(args)
    report = verify_euler_lagrange(
        params,
        rho_max=args.rho_max,
        n_grid=args.grid,
        force_sphere=args.force_sphere,
    )
    payload = {"schema": SCHEMA, "report": "euler-lagrange"}
    payload.update(report.to_dict())
    _emit(payload, args.out)
    return 0 if report.passed else 3


def cmd_convexity(args) -> int:
    params = _params_from(args)
    report = convexity_report(params, rho_max=args.rho_max, n_grid=args.grid)
    payload = {"schema": SCHEMA, "report": "convexity"}
    payload.update(report.to_dict())
    _emit(payload, args.out)
    return 0 if report.passed else 3


def _write_positions_csv(path: str, positions: np.ndarray) -> None:
    d = positions.shape[1]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(f"x{k}" for k in range(d)) + "\n")
        for row in positions:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _write_trace_csv(path: str, sys_state: flow.ParticleSystem) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("iteration,energy,step_size\n")
        for k, (e, h) in enumerate(zip(sys_state.energy_trace, sys_state.step_trace)):
            fh.write(f"{k},{float(e)!r},{float(h)!r}\n")


def cmd_simulate(args) -> int:
    params = _params_from(args)
    if args.n < 16:
        raise _UsageError(f"--n must be at least 16, got {args.n}")
    if not args.tol > 0:
        raise _UsageError(f"--tol must be positive, got {args.tol}")
    if args.max_iter < 1:
        raise _UsageError(f"--max-iter must be at least 1, got {args.max_iter}")
    converged = True
    try:
        state, stats = flow.run_to_convergence(
            params, args.n, args.seed, tol=args.tol, max_iter=args.max_iter
        )
    except NonConvergence as exc:
        if not args.allow_partial:
            raise
        state, stats = exc.partial
        converged = False

    _write_positions_csv(f"{args.out}_positions.csv", state.positions)
    _write_trace_csv(f"{args.out}_trace.csv", state)

    payload = {
        "schema": SCHEMA,
        "d": params.d,
        "alpha": params.alpha,
        "beta": params.beta,
        "alpha_is_log": params.alpha_is_log,
        "beta_is_log": params.beta_is_log,
        "n_particles": args.n,
        "seed": args.seed,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "converged": converged,
        "iterations": state.iteration,
        "final_energy": state.energy_trace[-1],
        "final_max_force": flow.max_force(state),
    }
    payload.update(stats.to_dict())
    tag = classify(params)
    if tag.tag != "OutOfScope":
        r_ref = radius(params)
        e_ref = energy(params)
        sphere_like = tag.tag in ("SphereTheorem1", "Boundary")
        measured = stats.mean_radius if sphere_like else stats.max_radius
        payload["regime"] = tag.tag
        payload["R"] = r_ref
        payload["E"] = e_ref
        payload["radius_rel_err"] = abs(measured - r_ref) / r_ref
        payload["energy_rel_err"] = abs(state.energy_trace[-1] - e_ref) / abs(e_ref)
    else:
        payload["regime"] = "OutOfScope"
    _emit(payload, f"{args.out}_stats.json")
    return 0


def cmd_phase_scan(args) -> int:
    d = args.d
    if args.alpha_min > args.alpha_max or args.beta_min > args.beta_max:
        raise _UsageError("inverted range: min exceeds max")
    if args.alpha_steps < 1 or args.beta_steps < 1:
        raise _UsageError("step counts must be at least 1")
    if args.alpha_min < 2.0 or args.alpha_max > 4.0:
        raise _UsageError("alpha range must lie within [2, 4]")
    if not (-d < args.beta_min and args.beta_max <= 2.0):
        raise _UsageError(f"beta range must lie within (-{d}, 2]")
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps)
    betas = np.linspace(args.beta_min, args.beta_max, args.beta_steps)
    rows = []
    for a in alphas:
        a = float(a)
        bs = beta_star(d, a) if d >= 2 else None
        for b in betas:
            b = float(b)
            if b >= a:
                continue
            params = KernelParams(d, a, b, beta_is_log=(b == 0.0))
            tag = classify(params)
            label = tag.tag
            if bs is not None and a == 2.0 and abs(b - bs) <= 1e-12:
                # Junction where the two closed-form regimes meet.
                label = "Boundary/Sphere"
            if tag.tag == "OutOfScope":
                r_val, e_val = None, None
            else:
                r_val, e_val = radius(params), energy(params)
            rows.append(
                {
                    "alpha": a,
                    "beta": b,
                    "regime": label,
                    "beta_star": bs,
                    "R": r_val,
                    "E": e_val,
                }
            )
    if args.format == "json":
        _emit({"schema": SCHEMA, "d": d, "rows": rows}, args.out)
        return 0
    lines = ["alpha,beta,regime,beta_star,R,E"]
    for row in rows:
        cells = [repr(row["alpha"]), repr(row["beta"]), row["regime"]]
        for key in ("beta_star", "R", "E"):
            cells.append("" if row[key] is None else repr(row[key]))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_param_flags(sp) -> None:
    sp.add_argument("--d", type=int, required=True, help="ambient dimension")
    sp.add_argument("--alpha", type=float, help="attraction exponent")
    sp.add_argument("--beta", type=float, help="repulsion exponent")
    sp.add_argument(
        "--log-alpha",
        action="store_true",
        help="logarithmic attraction (alpha = 0)",
    )
    sp.add_argument(
        "--log-beta",
        action="store_true",
        help="logarithmic repulsion (beta = 0)",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="aggremin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser(
        "closed-form", help="radius, energy, and multiplier of the minimizer"
    )
    _add_param_flags(sp)
    sp.add_argument("--out", help="write JSON here instead of stdout")
    sp.set_defaults(func=cmd_closed_form)

    sp = sub.add_parser("verify-el", help="grid check of the sufficiency conditions")
    _add_param_flags(sp)
    sp.add_argument("--rho-max", type=float, default=25.0, help="grid upper end")
    sp.add_argument("--grid", type=int, default=2000, help="number of grid nodes")
    sp.add_argument(
        "--force-sphere",
        action="store_true",
        help="test the sphere candidate even off its regime",
    )
    sp.add_argument("--out", help="write JSON here instead of stdout")
    sp.set_defaults(func=cmd_verify_el)

    sp = sub.add_parser("convexity", help="second differences of the combination Psi")
    _add_param_flags(sp)
    sp.add_argument("--rho-max", type=float, default=10.0, help="grid upper end")
    sp.add_argument("--grid", type=int, default=400, help="number of grid nodes")
    sp.add_argument("--out", help="write JSON here instead of stdout")
    sp.set_defaults(func=cmd_convexity)

    sp = sub.add_parser("simulate", help="particle descent with CSV/JSON artifacts")
    _add_param_flags(sp)
    sp.add_argument("--n", type=int, required=True, help="particle count (>= 16)")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed")
    sp.add_argument("--tol", type=float, default=1e-8, help="force convergence target")
    sp.add_argument("--max-iter", type=int, default=2000, help="iteration budget")
    sp.add_argument("--out", required=True, help="output path prefix")
    sp.add_argument(
        "--allow-partial",
        action="store_true",
        help="write best-so-far artifacts instead of failing on non-convergence",
    )
    sp.add_argument(
        "--deterministic",
        action="store_true",
        help="bit-reproducible runs (always on; flag kept for interface stability)",
    )
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("phase-scan", help="regime map over an (alpha, beta) grid")
    sp.add_argument("--d", type=int, required=True, help="ambient dimension")
    sp.add_argument("--alpha-min", type=float, default=2.0)
    sp.add_argument("--alpha-max", type=float, default=4.0)
    sp.add_argument("--alpha-steps", type=int, default=21)
    sp.add_argument("--beta-min", type=float, required=True)
    sp.add_argument("--beta-max", type=float, default=2.0)
    sp.add_argument("--beta-steps", type=int, default=21)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", help="write here instead of stdout")
    sp.set_defaults(func=cmd_phase_scan)

    return parser


def _emit_error(exc: Exception) -> None:
    _emit(
        {
            "schema": SCHEMA,
            "error": {"type": type(exc).__name__, "reason": str(exc)},
        },
        None,
    )


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 64
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"aggremin: error: {exc}", file=sys.stderr)
        return 64
    except (DomainError, RegimeError, IllConditioned) as exc:
        _emit_error(exc)
        return 2
    except (NonConvergence, StallError, QuadratureFailure) as exc:
        _emit_error(exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
