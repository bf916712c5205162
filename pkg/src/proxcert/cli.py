"""Command-line surface: run solvers, certify traces, compare solvers.

Exit codes: 0 success, 1 certificate violation, 2 configuration error,
3 reference unavailable (or unusable).  The environment variable PROXCERT_SEED
overrides --seed when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .certificates import EnergyContext, certify_trace
from .errors import (
    ConfigurationError,
    DataCorruptionError,
    FitUnavailableError,
    ReferenceUnavailableError,
    RejectedInputError,
)
from .harness import (
    compare_solvers,
    random_box_quadratic,
    random_lasso,
    random_quadratic,
    reference_solution,
)
from .solvers import SolverConfig, run
from .traceio import TraceMeta, read_trace, write_report, write_trace

PROBLEM_NAMES = ("quadratic", "lasso", "box-quadratic")
SOLVER_NAMES = ("ista", "apm", "mapm", "strongly-convex-apm")


def _effective_seed(seed: int) -> int:
    env = os.environ.get("PROXCERT_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise ConfigurationError(f"PROXCERT_SEED must be an integer, got {env!r}")
    if not 0 <= seed < 2 ** 64:
        raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def build_problem_from_spec(spec: dict):
    """Instantiate a generated problem from its selector dict."""
    name = spec.get("name")
    seed = _effective_seed(int(spec.get("seed", 0)))
    if name == "quadratic":
        return random_quadratic(seed, int(spec["dim"]), int(spec.get("cond", 10)))
    if name == "lasso":
        rows = int(spec.get("rows", spec.get("dim", 20)))
        cols = int(spec.get("cols", rows))
        lam = spec.get("lam")
        return random_lasso(seed, rows, cols, lam=None if lam is None else float(lam))
    if name == "box-quadratic":
        return random_box_quadratic(seed, int(spec["dim"]))
    raise ConfigurationError(
        f"unknown problem {name!r}; valid options: {', '.join(PROBLEM_NAMES)}"
    )


def _problem_spec_from_args(args) -> dict:
    spec = {"name": args.problem, "seed": _effective_seed(args.seed)}
    if args.problem == "quadratic":
        spec.update(dim=args.dim, cond=args.cond)
    elif args.problem == "lasso":
        rows = args.rows if args.rows is not None else args.dim
        cols = args.cols if args.cols is not None else rows
        spec.update(rows=rows, cols=cols)
        if args.lam is not None:
            spec["lam"] = args.lam
    else:
        spec.update(dim=args.dim)
    return spec


def resolve_step(step_mode: str, lipschitz: float) -> float:
    """Map a step-mode string to a concrete s (validated later against 1/L)."""
    if lipschitz <= 0.0 and step_mode in ("half-inverse-L", "inverse-L"):
        raise ConfigurationError("L-relative step modes need L > 0")
    if step_mode == "half-inverse-L":
        return 0.5 / lipschitz
    if step_mode == "inverse-L":
        return 1.0 / lipschitz
    if step_mode.startswith("explicit:"):
        try:
            return float(step_mode.split(":", 1)[1])
        except ValueError:
            raise ConfigurationError(f"bad explicit step in {step_mode!r}")
    raise ConfigurationError(
        f"unknown step-mode {step_mode!r}; valid: half-inverse-L, inverse-L, "
        "explicit:<value>"
    )


def _solver_config(args, s: float) -> SolverConfig:
    return SolverConfig(
        variant=args.solver.replace("-", "_"),
        alpha=args.alpha,
        step=s,
        max_iters=args.max_iters,
        grad_map_tol=args.grad_map_tol,
    )


def cmd_run(args) -> int:
    spec = _problem_spec_from_args(args)
    problem = build_problem_from_spec(spec)
    s = resolve_step(args.step_mode, problem.smooth.lipschitz)
    config = _solver_config(args, s)
    records = run(problem, config, np.zeros(problem.dim))
    meta = TraceMeta(
        variant=config.variant,
        alpha=config.alpha,
        step=s,
        problem_hash=problem.content_hash,
        dim=problem.dim,
        max_iters=config.max_iters,
        grad_map_tol=config.grad_map_tol,
        seed=spec["seed"],
        iterates=not args.no_iterates,
        problem=spec,
    )
    write_trace(args.out, meta, records, args.format)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _reference_context(args, problem, meta) -> EnergyContext:
    x_star = f_star = None
    if args.x_star is not None:
        x_star = np.array([float(c) for c in args.x_star.split(",")])
    if args.f_star is not None:
        f_star = args.f_star
    if x_star is None or f_star is None:
        ref = reference_solution(problem, budget=args.ref_budget)
        x_star = ref.x_star if x_star is None else x_star
        f_star = ref.f_star if f_star is None else f_star
    return EnergyContext(
        alpha=meta.alpha,
        s=meta.step,
        mu=problem.smooth.strong_convexity,
        lipschitz=problem.smooth.lipschitz,
        x_star=x_star,
        f_star=f_star,
    )


def cmd_certify(args) -> int:
    meta, records = read_trace(args.trace)
    if not meta.iterates:
        raise ConfigurationError(
            "trace has no stored iterates; re-run with iterate recording enabled"
        )
    if args.problem is not None:
        spec = _problem_spec_from_args(args)
    elif meta.problem is not None:
        spec = meta.problem
    else:
        raise ConfigurationError("trace carries no problem spec; pass --problem")
    problem = build_problem_from_spec(spec)
    if meta.problem_hash is not None and meta.problem_hash != problem.content_hash:
        raise ConfigurationError(
            "trace was produced on a different problem (content hash mismatch)"
        )
    ctx = _reference_context(args, problem, meta)
    reports = certify_trace(ctx, records, variant=meta.variant)
    write_report(args.report, reports, args.format)
    failures = [r for r in reports if r.status == "ok" and not r.passed]
    print(f"wrote {len(reports)} certificate lines to {args.report}")
    if failures:
        worst = failures[0]
        print(f"FIRST VIOLATION at k={worst.k} name={worst.name} "
              f"lhs={worst.lhs!r} rhs={worst.rhs!r}")
        return 1
    return 0


def _specs_from_args(args) -> list:
    if args.spec:
        return [json.loads(s) for s in args.spec]
    if not args.solvers:
        raise ConfigurationError("compare needs --spec entries or --solvers")
    problem_spec = _problem_spec_from_args(args)
    return [{"problem": problem_spec, "solver": name, "alpha": args.alpha,
             "step_mode": args.step_mode}
            for name in args.solvers.split(",") if name]


def cmd_compare(args) -> int:
    specs = _specs_from_args(args)
    if len(specs) < 2:
        raise ConfigurationError("compare needs at least two solver specs")
    problems = [build_problem_from_spec(s["problem"]) for s in specs]
    hashes = {p.content_hash for p in problems}
    if len(hashes) != 1:
        raise ConfigurationError("compare specs name different problems")
    problem = problems[0]
    configs = []
    for spec in specs:
        solver = spec["solver"]
        if solver not in SOLVER_NAMES:
            raise ConfigurationError(
                f"unknown solver {solver!r}; valid options: {', '.join(SOLVER_NAMES)}"
            )
        s = resolve_step(spec.get("step_mode", "half-inverse-L"),
                         problem.smooth.lipschitz)
        configs.append(SolverConfig(
            variant=solver.replace("-", "_"),
            alpha=float(spec.get("alpha", 3.0)),
            step=s,
            max_iters=int(spec.get("max_iters", args.max_iters)),
            grad_map_tol=args.grad_map_tol,
        ))
    comparison = compare_solvers(problem, configs, np.zeros(problem.dim),
                                 budget=args.ref_budget)
    _write_comparison_table(args.table, comparison, args.format)
    summary = {
        "rho_hat": {label: (fit.rho_hat if fit else None)
                    for label, fit in comparison.fits.items()},
        "r_squared": {label: (fit.r_squared if fit else None)
                      for label, fit in comparison.fits.items()},
        "window": {label: (list(fit.window) if fit else None)
                   for label, fit in comparison.fits.items()},
        "rho_lower_bound": comparison.rho_lower_bound,
        "sqrt_mu_over_L": comparison.sqrt_mu_over_l,
        "problem_hash": comparison.problem_hash,
    }
    with open(args.summary, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"wrote comparison table to {args.table} and summary to {args.summary}")
    return 0


def _write_comparison_table(path, comparison, fmt: str) -> None:
    if fmt == "csv":
        with open(path, "w") as fh:
            fh.write(",".join(["k"] + [f"gap_{l}" for l in comparison.labels]) + "\n")
            for i, k in enumerate(comparison.ks):
                cells = [str(k)]
                for label in comparison.labels:
                    gap = comparison.gaps[label][i]
                    cells.append("" if gap is None else repr(float(gap)))
                fh.write(",".join(cells) + "\n")
    elif fmt == "jsonl":
        with open(path, "w") as fh:
            for i, k in enumerate(comparison.ks):
                row = {"k": k}
                for label in comparison.labels:
                    gap = comparison.gaps[label][i]
                    row[f"gap_{label}"] = None if gap is None else float(gap)
                fh.write(json.dumps(row) + "\n")
    else:
        raise ConfigurationError(f"unknown table format {fmt!r}; valid: csv, jsonl")


def _add_problem_flags(parser, required: bool) -> None:
    parser.add_argument("--problem", choices=PROBLEM_NAMES, required=required,
                        help="generated problem family")
    parser.add_argument("--dim", type=int, default=20)
    parser.add_argument("--cond", type=int, default=10,
                        help="condition number (quadratic families)")
    parser.add_argument("--rows", type=int, default=None, help="lasso rows")
    parser.add_argument("--cols", type=int, default=None, help="lasso cols")
    parser.add_argument("--lam", type=float, default=None, help="lasso l1 weight")
    parser.add_argument("--seed", type=int, default=0,
                        help="64-bit generator seed (PROXCERT_SEED overrides)")


def _add_solver_flags(parser) -> None:
    parser.add_argument("--alpha", type=float, default=3.0)
    parser.add_argument("--step-mode", default="half-inverse-L",
                        help="half-inverse-L | inverse-L | explicit:<value>")
    parser.add_argument("--max-iters", type=int, default=1000)
    parser.add_argument("--grad-map-tol", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxcert",
        description="Accelerated proximal gradient solvers with per-iteration "
                    "certificates of the proved inequalities and rate envelopes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a solver and write a trace file")
    _add_problem_flags(p_run, required=True)
    p_run.add_argument("--solver", choices=SOLVER_NAMES, required=True)
    _add_solver_flags(p_run)
    p_run.add_argument("--out", required=True, help="trace output path")
    p_run.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_run.add_argument("--no-iterates", action="store_true",
                       help="omit iterates from the trace (cannot be certified)")
    p_run.set_defaults(func=cmd_run)

    p_cert = sub.add_parser("certify", help="evaluate certificates on a trace")
    p_cert.add_argument("--trace", required=True)
    _add_problem_flags(p_cert, required=False)
    p_cert.add_argument("--report", required=True, help="report output path")
    p_cert.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_cert.add_argument("--ref-budget", type=int, default=100_000)
    p_cert.add_argument("--f-star", type=float, default=None,
                        help="externally supplied optimum (overrides the computed one)")
    p_cert.add_argument("--x-star", default=None,
                        help="externally supplied minimizer, comma-separated")
    p_cert.set_defaults(func=cmd_certify)

    p_cmp = sub.add_parser("compare", help="run several solvers on one problem")
    _add_problem_flags(p_cmp, required=False)
    p_cmp.add_argument("--solvers", default=None,
                       help="comma-separated solver names sharing the problem flags")
    p_cmp.add_argument("--spec", action="append", default=None,
                       help="full run spec as JSON; repeatable")
    _add_solver_flags(p_cmp)
    p_cmp.add_argument("--table", required=True, help="gap table output path")
    p_cmp.add_argument("--summary", required=True, help="JSON summary output path")
    p_cmp.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_cmp.add_argument("--ref-budget", type=int, default=100_000)
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports bad usage and exits 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigurationError, RejectedInputError, FitUnavailableError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ReferenceUnavailableError, DataCorruptionError) as exc:
        print(f"reference error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        # unreadable paths, truncated or non-proxcert files, bad numbers
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
