"""
Benchmark harness.

Every `.sl` file below a directory is solved with its own pipeline. An
optional JSON sidecar next to a file names its category and, for mocked
synthesis runs, the bounded candidate to generalize.
"""

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

from .pipeline import SynrgPipeline
from .types.pipeline_types import (
    BenchmarkReport,
    BenchmarkRow,
    CorpusCategory,
    FailureReason,
    PipelineConfig,
    RunReport,
)
from .utilities.exceptions import InputError
from .utilities.sygus.parser import parse_problem, parse_term

logger = logging.getLogger(__name__)


def _sidecar(path: Path) -> dict[str, Any]:
    sidecar = path.with_suffix(".json")
    if not sidecar.is_file():
        return {}
    return json.loads(sidecar.read_text(encoding="utf-8"))


def _category(path: Path, sidecar: dict[str, Any]) -> CorpusCategory | None:
    for candidate in (sidecar.get("category"), path.parent.name):
        if candidate in {c.value for c in CorpusCategory}:
            return CorpusCategory(candidate)
    return None


def _row(name: str, category: CorpusCategory | None, report: RunReport) -> BenchmarkRow:
    if report.solved:
        status = "solved" if report.verified else "unverified"
    elif report.failure_reason is FailureReason.TOTAL_TIMEOUT:
        status = "timeout"
    else:
        status = "failed"
    return BenchmarkRow(
        name=name,
        category=category,
        status=status,
        elapsed=report.elapsed,
        final_bound=report.final_bound,
        phase=report.phase,
        quantifier_profile=report.quantifier_profile,
        error=None if report.solved else str(report.failure_reason),
    )


def run_benchmark_file(path: Path, cfg: PipelineConfig, mock_synthesis: bool = False) -> BenchmarkRow:
    """Solve one file. Unreadable input becomes a parse_error row."""
    started = time.monotonic()
    name = path.stem
    try:
        sidecar = _sidecar(path)
        category = _category(path, sidecar)
        problem = parse_problem(path.read_text(encoding="utf-8"))
    except (OSError, ValueError, InputError) as e:
        logger.warning("skipping %s: %s", path, e)
        return BenchmarkRow(name=name, status="parse_error", elapsed=time.monotonic() - started, error=str(e))

    pipeline = SynrgPipeline(cfg)
    if not mock_synthesis:
        return _row(name, category, pipeline.solve(problem))

    bounded = sidecar.get("bounded_candidate")
    fn = problem.functions.get(sidecar.get("synth_fun", ""))
    if bounded is None or fn is None:
        return BenchmarkRow(
            name=name,
            category=category,
            status="failed",
            elapsed=time.monotonic() - started,
            error="no bounded candidate to generalize",
        )
    try:
        body = parse_term(bounded, dict(fn.params))
    except InputError as e:
        return BenchmarkRow(name=name, category=category, status="parse_error", error=str(e))
    bound = int(sidecar.get("expected_bound", cfg.bound.b_start))
    return _row(name, category, pipeline.solve_with_candidate(problem, bound, {fn.name: body}))


def run_benchmarks(
    directory: Path | str,
    cfg: PipelineConfig | None = None,
    jobs: int = 1,
    mock_synthesis: bool = False,
) -> BenchmarkReport:
    """
    Run every `.sl` file below `directory`, `jobs` files at a time.

    With `mock_synthesis` the bounded synthesis phase is skipped and the
    sidecar's `bounded_candidate` is generalized and verified instead.
    """
    cfg = cfg or PipelineConfig()
    paths = sorted(Path(directory).rglob("*.sl"))
    logger.info("running %s benchmarks from %s", len(paths), directory)
    if not paths:
        return BenchmarkReport()
    if jobs <= 1:
        rows = [run_benchmark_file(path, cfg, mock_synthesis) for path in paths]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_benchmark_file, paths, [cfg] * len(paths), [mock_synthesis] * len(paths)))
    return BenchmarkReport(rows=rows)
