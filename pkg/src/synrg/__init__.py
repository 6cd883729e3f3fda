"""
synrg - synthesis of quantified array problems.

Problems are SyGuS-IF files whose constraints quantify over array indices.
synrg restricts them to arrays of a small length, synthesizes a
quantifier-free solution, generalizes it back to a quantified one and
verifies the result against the original problem, growing the length
until a solution verifies.
"""

__version__ = "0.1.0"

from .benchmarks import run_benchmarks
from .corpus import load_corpus
from .pipeline import SynrgPipeline, solve
from .types.pipeline_types import BenchmarkReport, PipelineConfig, RunReport
from .types.problem_types import BoundConfig, Problem
from .utilities.generalization import syntactic_generalize
from .utilities.restriction import restrict_spec
from .utilities.sygus.parser import parse_problem

__all__ = [
    "BenchmarkReport",
    "BoundConfig",
    "PipelineConfig",
    "Problem",
    "RunReport",
    "SynrgPipeline",
    "__version__",
    "load_corpus",
    "parse_problem",
    "restrict_spec",
    "run_benchmarks",
    "solve",
    "syntactic_generalize",
]
