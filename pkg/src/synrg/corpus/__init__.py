"""
Benchmarks shipped with the package.

Each case is a SyGuS-IF file next to a JSON sidecar of the same name holding
the expected outcome. Cases are grouped by category: hand-written problems,
loop invariants in the style of software verification competitions, and
sketch-style function specifications.
"""

import json
from importlib.resources import files
from importlib.resources.abc import Traversable

from ..types.pipeline_types import CorpusCategory, GoldenCase
from ..types.problem_types import Problem
from ..utilities.sygus.parser import parse_problem


def _cases(category: CorpusCategory) -> list[GoldenCase]:
    root: Traversable = files(__package__).joinpath(category.value)
    cases = []
    for source in sorted(root.iterdir(), key=lambda t: t.name):
        if not source.name.endswith(".sl"):
            continue
        name = source.name.removesuffix(".sl")
        sidecar = json.loads(root.joinpath(f"{name}.json").read_text(encoding="utf-8"))
        cases.append(
            GoldenCase.model_validate(
                {"name": name, "category": category, "source": source.read_text(encoding="utf-8"), **sidecar}
            )
        )
    return cases


def load_corpus(category: CorpusCategory | str | None = None) -> list[GoldenCase]:
    """All cases of `category`, or of every category when it is None."""
    if category is None:
        return [case for c in CorpusCategory for case in _cases(c)]
    return _cases(CorpusCategory(category))


def load_problem(case: GoldenCase) -> Problem:
    return parse_problem(case.source)


__all__ = ["load_corpus", "load_problem"]
