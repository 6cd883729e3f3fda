from enum import StrEnum
from statistics import mean, median
from typing import Literal, Self

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    field_serializer,
    model_validator,
)

from ..utilities.constants import (
    ENUMERATION_WINDOW,
    FAST_SYNTH_TIMEOUT,
    GENERALIZATION_CANDIDATE_CAP,
    GENERALIZATION_SIZE_CAP,
    TEMPLATE_SYNTH_TIMEOUT,
    TOTAL_TIMEOUT,
    VERIFY_TIMEOUT,
)
from .expressions import Expression
from .problem_types import BoundConfig, FragmentReport
from .solver_types import SolverSpec


class PipelineConfig(BaseModel):
    """
    Knobs of one pipeline run.

    A backend of `None` means the built-in one: the enumerative synthesizer
    for synthesis and in-process z3 for verification.
    """

    model_config = ConfigDict(frozen=True)

    bound: BoundConfig = Field(default_factory=BoundConfig)
    fast_synth_timeout: PositiveFloat = FAST_SYNTH_TIMEOUT
    template_synth_timeout: PositiveFloat = TEMPLATE_SYNTH_TIMEOUT
    verify_timeout: PositiveFloat = VERIFY_TIMEOUT
    total_timeout: PositiveFloat = TOTAL_TIMEOUT
    synth_backend: SolverSpec | None = None
    smt_backend: SolverSpec | None = None
    use_internal_fallback: bool = True
    accept_unverified: bool = False
    parallel_synthesis: bool = False
    strict_matching: bool = False
    generalization_candidate_cap: PositiveInt = GENERALIZATION_CANDIDATE_CAP
    generalization_size_cap: PositiveInt = GENERALIZATION_SIZE_CAP
    enumeration_window: tuple[int, int] = ENUMERATION_WINDOW

    @model_validator(mode="after")
    def check_timeouts(self) -> Self:
        if not self.fast_synth_timeout <= self.template_synth_timeout <= self.total_timeout:
            msg = (
                "timeouts must satisfy fast <= template <= total, got "
                f"{self.fast_synth_timeout} / {self.template_synth_timeout} / {self.total_timeout}"
            )
            raise ValueError(msg)
        low, high = self.enumeration_window
        if low > high:
            msg = f"empty enumeration window {self.enumeration_window}"
            raise ValueError(msg)
        return self


class Phase(StrEnum):
    RESTRICT = "restrict"
    SYNTHESIZE_FAST = "synthesize_fast"
    SYNTHESIZE_TEMPLATE = "synthesize_template"
    SYNTACTIC = "syntactic"
    SYNTHESIS_BASED = "synthesis_based"


class PhaseRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    phase: Phase
    outcome: str
    elapsed: NonNegativeFloat = 0.0
    candidate: str | None = None
    detail: str | None = None


class IterationRecord(BaseModel):
    bound: PositiveInt
    phases: list[PhaseRecord] = Field(default_factory=list)


class FailureReason(StrEnum):
    BOUND_EXHAUSTED = "bound_exhausted"
    TOTAL_TIMEOUT = "total_timeout"
    BACKEND_UNAVAILABLE = "backend_unavailable"


class RunReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    outcome: Literal["solved", "failed"]
    bindings: dict[str, Expression] = Field(default_factory=dict)
    verified: bool = False
    failure_reason: FailureReason | None = None
    phase: Literal["syntactic", "synthesis_based"] | None = None
    final_bound: int | None = None
    iterations: list[IterationRecord] = Field(default_factory=list)
    fragment: FragmentReport | None = None
    quantifier_profile: Literal["none", "single", "alternating"] | None = None
    counterexamples: list[dict[str, str]] = Field(default_factory=list)
    elapsed: NonNegativeFloat = 0.0

    @model_validator(mode="after")
    def check_outcome(self) -> Self:
        if self.outcome == "failed" and self.failure_reason is None:
            msg = "a failed run needs a failure reason"
            raise ValueError(msg)
        if self.outcome == "solved" and not self.bindings:
            msg = "a solved run needs bindings"
            raise ValueError(msg)
        if self.verified and not any(
            p.outcome == "valid" for iteration in self.iterations for p in iteration.phases
        ):
            msg = "a verified run must record a valid verification"
            raise ValueError(msg)
        return self

    @field_serializer("bindings")
    def serialize_bindings(self, bindings: dict[str, Expression]) -> dict[str, str]:
        return {name: str(body) for name, body in bindings.items()}

    @property
    def solved(self) -> bool:
        return self.outcome == "solved"


class CorpusCategory(StrEnum):
    CRAFTED = "crafted"
    SVCOMP = "svcomp"
    SKETCHING = "sketching"


type RowStatus = Literal["solved", "unverified", "timeout", "failed", "parse_error"]


class BenchmarkRow(BaseModel):
    name: str
    category: CorpusCategory | None = None
    status: RowStatus
    elapsed: NonNegativeFloat = 0.0
    final_bound: int | None = None
    phase: Literal["syntactic", "synthesis_based"] | None = None
    quantifier_profile: Literal["none", "single", "alternating"] | None = None
    error: str | None = None


class BenchmarkReport(BaseModel):
    rows: list[BenchmarkRow] = Field(default_factory=list)

    def count(self, status: RowStatus, category: CorpusCategory | None = None) -> int:
        return sum(1 for r in self.rows if r.status == status and (category is None or r.category is category))

    def phase_counts(self) -> dict[str, int]:
        counts = {"syntactic": 0, "synthesis_based": 0}
        for row in self.rows:
            if row.phase is not None and row.status == "solved":
                counts[row.phase] += 1
        return counts

    def profile_counts(self) -> dict[str, dict[str, int]]:
        counts: dict[str, dict[str, int]] = {}
        for row in self.rows:
            if row.quantifier_profile is None:
                continue
            per_category = counts.setdefault(str(row.category or "uncategorized"), {})
            per_category[row.quantifier_profile] = per_category.get(row.quantifier_profile, 0) + 1
        return counts

    @property
    def median_time(self) -> float:
        return median(r.elapsed for r in self.rows) if self.rows else 0.0

    @property
    def average_time(self) -> float:
        return mean(r.elapsed for r in self.rows) if self.rows else 0.0

    def to_table(self) -> str:
        header = f"{'benchmark':<28} {'category':<10} {'status':<12} {'bound':>5} {'phase':<16} {'time':>8}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.name:<28} {r.category or '-':<10} {r.status:<12} "
                f"{'-' if r.final_bound is None else r.final_bound:>5} {r.phase or '-':<16} {r.elapsed:>8.2f}"
            )
        lines.append("-" * len(header))
        for category in CorpusCategory:
            if any(r.category is category for r in self.rows):
                lines.append(
                    f"{category}: {self.count('solved', category)} solved, "
                    f"{self.count('timeout', category)} timeout, {self.count('failed', category)} failed"
                )
        phases = self.phase_counts()
        lines.append(
            f"total: {len(self.rows)} benchmarks, {self.count('solved')} solved "
            f"({phases['syntactic']} syntactic, {phases['synthesis_based']} synthesis-based), "
            f"median {self.median_time:.2f}s, average {self.average_time:.2f}s"
        )
        return "\n".join(lines)


class GoldenCase(BaseModel):
    """One shipped benchmark with its expected outcome."""

    model_config = ConfigDict(frozen=True)

    name: str
    category: CorpusCategory
    source: str
    synth_fun: str
    expected_bound: PositiveInt
    expected_candidate: str
    expected_phase: Literal["syntactic", "synthesis_based"]
    bounded_candidate: str | None = None
    notes: str = ""
