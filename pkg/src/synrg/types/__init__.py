"""
Type definitions for synrg.

Expression trees are frozen dataclasses; problems, solver outcomes and
reports are pydantic models.
"""

from .expressions import Expression, Operator, QuantKind, Sort
from .pipeline_types import (
    BenchmarkReport,
    BenchmarkRow,
    CorpusCategory,
    FailureReason,
    GoldenCase,
    Phase,
    PipelineConfig,
    RunReport,
)
from .problem_types import (
    BoundConfig,
    BoundedProblem,
    FragmentReport,
    Grammar,
    IndexSet,
    MatchWitness,
    Problem,
    SynthFun,
)
from .solver_types import (
    ArrayValue,
    SolverKind,
    SolverSpec,
    SynthOutcome,
    SynthStatus,
    VerifyOutcome,
    VerifyStatus,
)

__all__ = [
    "ArrayValue",
    "BenchmarkReport",
    "BenchmarkRow",
    "BoundConfig",
    "BoundedProblem",
    "CorpusCategory",
    "Expression",
    "FailureReason",
    "FragmentReport",
    "GoldenCase",
    "Grammar",
    "IndexSet",
    "MatchWitness",
    "Operator",
    "Phase",
    "PipelineConfig",
    "Problem",
    "QuantKind",
    "RunReport",
    "Sort",
    "SolverKind",
    "SolverSpec",
    "SynthFun",
    "SynthOutcome",
    "SynthStatus",
    "VerifyOutcome",
    "VerifyStatus",
]
