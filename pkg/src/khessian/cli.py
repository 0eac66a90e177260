"""Command line interface: ``cone classify``, ``seed``, ``solve``, ``verify``.

Machine-readable JSON goes to stdout; human summaries go to stderr.  Exit
codes: classify returns 0 for any cone/boundary verdict, 1 for Outside, 2 for
argument errors; seed returns 3 on construction failure; solve returns 0 only
when the iteration converged (2 for config errors, 4 for solver failures,
with the report still written); verify returns 1 when any property fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .config import ProblemConfig
from .cone import Region, classify_boundary
from .errors import (
    ConstructionError,
    DomainError,
    EllipticityError,
    SolverError,
    TuningError,
)
from .grids import write_grid_csv, write_sidecar
from .iterate import (
    IterationReport,
    PhysicalSolution,
    assemble_solution,
    certify_convexity,
    newton_loop,
    tune_epsilon,
)
from .presets import PRESETS, preset_config
from .grids import ScalarGrid, axis_coords, boundary_mask
from .seeds import certify_seed, seed_for_constant
from .verify import SUITES


def _emit(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True))


def _note(message: str) -> None:
    print(message, file=sys.stderr)


@dataclass
class SolveArtifacts:
    report: IterationReport
    solution: PhysicalSolution | None
    w: ScalarGrid
    out_dir: str


def run_solve(config: ProblemConfig, out_dir: str | None = None) -> SolveArtifacts:
    """Full pipeline: seed, tune, iterate, assemble, certify, write files."""
    config.validate()
    f = config.build_rhs()
    c = f.value_at_origin()
    seed = seed_for_constant(
        config.k, config.n, c, alpha=config.alpha, l=config.l,
        f_bound=max(1.0, f.coeff_bound()),
    )
    seed = tune_epsilon(seed, f, config.m, tol_lin=config.tol_lin)
    w, report = newton_loop(
        seed, f, config.m,
        tol_newton=config.tol_newton,
        max_iter=config.max_iter,
        tol_lin=config.tol_lin,
    )
    final_seed = seed.with_eps(report.eps_history[-1])
    solution = None
    if report.converged:
        solution = assemble_solution(w, final_seed)
        cert = certify_convexity(
            solution.hessian, config.k, ~boundary_mask(config.n, config.m)
        )
        report.convexity = cert.to_dict()

    target = out_dir if out_dir is not None else config.out_dir
    os.makedirs(target, exist_ok=True)
    _write_outputs(target, config, final_seed, w, report, solution)
    return SolveArtifacts(report=report, solution=solution, w=w, out_dir=target)


def _write_outputs(target: str, config: ProblemConfig, seed, w: ScalarGrid,
                   report: IterationReport, solution) -> None:
    x_axes = [axis_coords(config.m)] * config.n
    write_grid_csv(os.path.join(target, "w.csv"), w.values, x_axes)
    write_sidecar(
        os.path.join(target, "w.json"), config.n, config.m, w.h, seed.to_dict()
    )
    if solution is not None:
        write_grid_csv(os.path.join(target, "u.csv"), solution.u_values,
                       solution.axes)
        write_sidecar(
            os.path.join(target, "u.json"), config.n, config.m,
            solution.h_physical, seed.to_dict(),
        )
    doc = report.to_dict()
    doc["config"] = config.to_dict()
    with open(os.path.join(target, "report.json"), "w", encoding="ascii",
              newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    if config.emit_plots_csv:
        lines = ["iteration,g_inf,g_holder,rho_inf,min_margin"]
        for rec in report.iterations:
            lines.append(
                f"{rec.iteration},{rec.g_inf!r},{rec.g_holder!r},"
                f"{rec.rho_inf!r},{rec.min_margin!r}"
            )
        with open(os.path.join(target, "residuals.csv"), "w",
                  encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _cmd_cone_classify(args) -> int:
    try:
        lam = np.array([float(v) for v in args.lam.split(",")])
    except ValueError:
        _note(f"could not parse eigenvalue list {args.lam!r}")
        return 2
    try:
        verdict = classify_boundary(lam, args.k, tol=args.tol)
    except DomainError as err:
        _note(str(err))
        return 2
    _emit(verdict.to_dict())
    _note(f"classified as {verdict.kind.value} (margin {verdict.margin:.3e})")
    return 1 if verdict.kind is Region.OUTSIDE else 0


def _cmd_seed(args) -> int:
    l = args.l
    if l is not None and l != "full":
        l = int(l)
    try:
        seed = seed_for_constant(args.k, args.n, args.c, alpha=args.alpha, l=l)
    except (DomainError, ConstructionError) as err:
        _note(f"seed construction failed: {err}")
        return 3
    cert = certify_seed(seed)
    doc = seed.to_dict()
    doc["certificate"] = cert.to_dict()
    _emit(doc)
    _note(
        f"seed for c={args.c}: class {cert.convexity_class}, "
        f"ellipticity margin {cert.ellipticity_margin:.3e}"
    )
    return 0


def _cmd_solve(args) -> int:
    try:
        if args.preset:
            config = preset_config(args.preset)
        else:
            config = ProblemConfig.from_json_file(args.config)
    except (DomainError, OSError, KeyError, json.JSONDecodeError) as err:
        _note(f"invalid configuration: {err}")
        return 2
    try:
        artifacts = run_solve(config, out_dir=args.output)
    except (TuningError, SolverError, EllipticityError, DomainError) as err:
        _note(f"solver failed: {err}")
        target = args.output if args.output is not None else config.out_dir
        os.makedirs(target, exist_ok=True)
        doc = {
            "status": "Failed",
            "error": str(err),
            "config": config.to_dict(),
        }
        with open(os.path.join(target, "report.json"), "w", encoding="ascii",
                  newline="\n") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
        return 4
    doc = artifacts.report.to_dict()
    doc["config"] = config.to_dict()
    _emit(doc)
    _note(
        f"status {artifacts.report.status} after "
        f"{len(artifacts.report.iterations)} iterations; wrote "
        f"{artifacts.out_dir}"
    )
    return 0 if artifacts.report.converged else 4


def _cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    all_ok = True
    results = {}
    for name in names:
        fn = SUITES[name]
        kwargs = {"seed": args.seed}
        if name == "p2-ellipticity":
            kwargs["count"] = args.samples
        else:
            kwargs["samples"] = args.samples
        res = fn(**kwargs)
        results[name] = res.to_dict()
        _note(
            f"{name}: checked {res.checked}, excluded {res.excluded}, "
            f"failures {res.failures}"
        )
        all_ok &= res.passed
    _emit(results)
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="khessian",
        description="Construct and certify local solutions of k-Hessian equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cone_p = sub.add_parser("cone", help="cone membership and classification")
    cone_sub = cone_p.add_subparsers(dest="cone_command", required=True)
    classify_p = cone_sub.add_parser("classify", help="classify an eigenvalue vector")
    classify_p.add_argument("--lambda", dest="lam", required=True,
                            help="comma-separated eigenvalues; use "
                                 "--lambda=-1,2,... when the first is negative")
    classify_p.add_argument("--k", type=int, required=True)
    classify_p.add_argument("--tol", type=float, default=1e-9)
    classify_p.set_defaults(func=_cmd_cone_classify)

    seed_p = sub.add_parser("seed", help="construct a quadratic seed")
    seed_p.add_argument("--k", type=int, required=True)
    seed_p.add_argument("--n", type=int, required=True)
    seed_p.add_argument("--c", type=float, required=True)
    seed_p.add_argument("--l", default=None,
                        help="target convexity offset for c > 0, or 'full'")
    seed_p.add_argument("--alpha", type=float, default=0.5)
    seed_p.set_defaults(func=_cmd_seed)

    solve_p = sub.add_parser("solve", help="run the full solve pipeline")
    group = solve_p.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="path to a JSON problem configuration")
    group.add_argument("--preset", help=f"built-in preset: {sorted(PRESETS)}")
    solve_p.add_argument("--output", default=None,
                         help="override the output directory")
    solve_p.set_defaults(func=_cmd_solve)

    verify_p = sub.add_parser("verify", help="run randomized property sweeps")
    verify_p.add_argument("--suite", default="all",
                          choices=["all", *SUITES])
    verify_p.add_argument("--samples", type=int, default=10000)
    verify_p.add_argument("--seed", type=int, default=7)
    verify_p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
