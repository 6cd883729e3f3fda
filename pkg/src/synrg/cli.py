"""
Command line front end.

    synrg solve FILE.sl   solve one problem, print a define-fun per function
    synrg bench DIR       run every .sl file below DIR and print a summary

Exit codes: 0 solved and verified, 2 solved but unverified, 3 no solution,
4 unreadable input.
"""

import argparse
import logging
import os
import sys
from collections.abc import Sequence
from pathlib import Path

from .benchmarks import run_benchmarks
from .pipeline import SynrgPipeline
from .types.pipeline_types import PipelineConfig, RunReport
from .types.problem_types import BoundConfig, Problem
from .types.solver_types import SolverKind
from .utilities.config import solver_from_command, solver_from_env
from .utilities.constants import (
    DEFAULT_B_MAX,
    DEFAULT_B_START,
    DEFAULT_B_STEP,
    ENV_LOG_LEVEL,
    FAST_SYNTH_TIMEOUT,
    TEMPLATE_SYNTH_TIMEOUT,
    TOTAL_TIMEOUT,
    VERIFY_TIMEOUT,
)
from .utilities.exceptions import InputError
from .utilities.fragment import analyze_problem
from .utilities.restriction import restrict_spec
from .utilities.sygus.parser import parse_problem
from .utilities.sygus.printer import print_define_fun, print_sygus

logger = logging.getLogger(__name__)

EXIT_SOLVED = 0
EXIT_UNVERIFIED = 2
EXIT_FAILED = 3
EXIT_INPUT_ERROR = 4


def _add_pipeline_options(parser: argparse.ArgumentParser) -> None:
    bounds = parser.add_argument_group("bounds")
    bounds.add_argument("--bound-start", type=int, default=DEFAULT_B_START, metavar="N")
    bounds.add_argument("--bound-max", type=int, default=DEFAULT_B_MAX, metavar="N")
    bounds.add_argument("--bound-step", type=int, default=DEFAULT_B_STEP, metavar="N")

    budgets = parser.add_argument_group("timeouts (seconds)")
    budgets.add_argument("--fast-timeout", type=float, default=FAST_SYNTH_TIMEOUT, metavar="SECS")
    budgets.add_argument("--template-timeout", type=float, default=TEMPLATE_SYNTH_TIMEOUT, metavar="SECS")
    budgets.add_argument("--verify-timeout", type=float, default=VERIFY_TIMEOUT, metavar="SECS")
    budgets.add_argument("--total-timeout", type=float, default=TOTAL_TIMEOUT, metavar="SECS")

    backends = parser.add_argument_group("backends")
    backends.add_argument("--synth-solver", metavar="CMD", help="SyGuS solver name or command line")
    backends.add_argument("--smt-solver", metavar="CMD", help="SMT solver name or command line")
    backends.add_argument(
        "--internal-only", action="store_true", help="ignore configured solvers and use the built-in backends"
    )
    backends.add_argument("--no-fallback", action="store_true", help="fail instead of falling back to the built-in backends")

    parser.add_argument("--accept-unverified", action="store_true", help="report the first bounded solution if none verifies")
    parser.add_argument("--parallel-synthesis", action="store_true", help="run both bounded synthesis queries at once")
    parser.add_argument("--strict-matching", action="store_true", help="confirm generalization matches with the SMT backend")
    parser.add_argument("--json", action="store_true", help="also print the full report as JSON")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for detail")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synrg",
        description="Synthesize solutions to quantified array problems by bounding, synthesizing and generalizing.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve one SyGuS-IF problem")
    solve.add_argument("file", type=Path)
    _add_pipeline_options(solve)
    solve.add_argument("--emit-bounded", type=Path, metavar="PATH", help="write the first bounded problem to PATH")
    solve.add_argument("--fragment-report", action="store_true", help="print the array property fragment report")
    solve.add_argument("--trace-generalization", action="store_true", help="log every generalization step")

    bench = commands.add_parser("bench", help="run every .sl file below a directory")
    bench.add_argument("directory", type=Path)
    _add_pipeline_options(bench)
    bench.add_argument("--jobs", type=int, default=1, metavar="N")
    bench.add_argument("--mock-synthesis", action="store_true", help="generalize the sidecar bounded candidates")
    return parser


def _configure_logging(verbosity: int, trace_generalization: bool = False) -> None:
    if verbosity >= 2:
        level: int | str = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = os.environ.get(ENV_LOG_LEVEL, "WARNING").upper()
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    if trace_generalization:
        trace = logging.getLogger("synrg.utilities.generalization")
        trace.setLevel(logging.DEBUG)
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        trace.addHandler(handler)
        trace.propagate = False


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """Pipeline settings from parsed flags; solver flags win over the environment."""
    synth = smt = None
    if not args.internal_only:
        synth = solver_from_command(args.synth_solver, SolverKind.SYNTHESIS) if args.synth_solver else solver_from_env(SolverKind.SYNTHESIS)
        smt = solver_from_command(args.smt_solver, SolverKind.SMT) if args.smt_solver else solver_from_env(SolverKind.SMT)
    return PipelineConfig(
        bound=BoundConfig(b_start=args.bound_start, b_max=args.bound_max, step=args.bound_step),
        fast_synth_timeout=args.fast_timeout,
        template_synth_timeout=args.template_timeout,
        verify_timeout=args.verify_timeout,
        total_timeout=args.total_timeout,
        synth_backend=synth,
        smt_backend=smt,
        use_internal_fallback=not args.no_fallback,
        accept_unverified=args.accept_unverified,
        parallel_synthesis=args.parallel_synthesis,
        strict_matching=args.strict_matching,
    )


def _print_solution(problem: Problem, report: RunReport) -> None:
    for fn in problem.synth_funs:
        body = report.bindings.get(fn.name)
        if body is not None:
            print(print_define_fun(fn, body))


def run_solve(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    try:
        problem = parse_problem(args.file.read_text(encoding="utf-8"))
    except (OSError, InputError) as e:
        print(f"synrg: {args.file}: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.fragment_report:
        print(analyze_problem(problem).model_dump_json(indent=2), file=sys.stderr)
    if args.emit_bounded is not None:
        bounded = restrict_spec(problem, cfg.bound.b_start)
        args.emit_bounded.write_text(print_sygus(bounded.as_problem()), encoding="utf-8")
        logger.info("bounded problem for b=%s written to %s", bounded.bound, args.emit_bounded)

    report = SynrgPipeline(cfg).solve(problem)
    if report.solved:
        _print_solution(problem, report)
    else:
        print(f"synrg: no solution ({report.failure_reason})", file=sys.stderr)
    if args.json:
        print(report.model_dump_json(indent=2))

    if not report.solved:
        return EXIT_FAILED
    return EXIT_SOLVED if report.verified else EXIT_UNVERIFIED


def run_bench(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    if not args.directory.is_dir():
        print(f"synrg: {args.directory} is not a directory", file=sys.stderr)
        return EXIT_INPUT_ERROR
    report = run_benchmarks(args.directory, cfg, jobs=args.jobs, mock_synthesis=args.mock_synthesis)
    print(report.model_dump_json(indent=2) if args.json else report.to_table())
    return EXIT_SOLVED


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose, getattr(args, "trace_generalization", False))
    try:
        cfg = config_from_args(args)
    except ValueError as e:
        print(f"synrg: invalid settings: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.command == "solve":
        return run_solve(args, cfg)
    return run_bench(args, cfg)


if __name__ == "__main__":
    sys.exit(main())
