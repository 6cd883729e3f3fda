from dataclasses import dataclass
from enum import StrEnum
from typing import Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveFloat,
    PositiveInt,
    field_serializer,
    field_validator,
)

from ..utilities.constants import ENUMERATION_CANDIDATE_CAP, ENUMERATION_SIZE_CAP, TEMPLATE_SYNTH_TIMEOUT
from .expressions import Expression, Sort


@dataclass(frozen=True, slots=True)
class ArrayValue:
    """A total map from integers to integers: finitely many entries over a default."""

    default: int = 0
    entries: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, values: dict[int, int], default: int = 0) -> "ArrayValue":
        return cls(default, tuple(sorted((k, v) for k, v in values.items() if v != default)))

    @classmethod
    def from_list(cls, values: list[int] | tuple[int, ...], default: int = 0) -> "ArrayValue":
        return cls.of(dict(enumerate(values)), default)

    def read(self, index: int) -> int:
        for key, value in self.entries:
            if key == index:
                return value
        return self.default

    def write(self, index: int, value: int) -> "ArrayValue":
        return ArrayValue.of(dict(self.entries) | {index: value}, self.default)


type Value = int | bool | ArrayValue
type Valuation = dict[str, Value]


def default_value(sort: Sort) -> Value:
    match sort:
        case Sort.BOOL:
            return False
        case Sort.INT:
            return 0
        case Sort.ARRAY:
            return ArrayValue()


class SolverKind(StrEnum):
    SYNTHESIS = "synthesis"
    SMT = "smt"


class SolverSpec(BaseModel):
    """How to launch an external solver: argv template, kind and wall-clock budget."""

    model_config = ConfigDict(frozen=True)

    command: tuple[str, ...]
    kind: SolverKind
    wall_timeout: PositiveFloat = 30.0

    @field_validator("command")
    @classmethod
    def validate_command(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if not v or not v[0]:
            msg = "solver command must name an executable"
            raise ValueError(msg)
        return v

    def argv(self, query_path: str) -> list[str]:
        """Substitute `{file}` in the template, or append the query path when absent."""
        if any("{file}" in part for part in self.command):
            return [part.replace("{file}", query_path) for part in self.command]
        return [*self.command, query_path]


class SynthStatus(StrEnum):
    SOLVED = "solved"
    INFEASIBLE = "infeasible"
    TIMED_OUT = "timed_out"
    UNKNOWN = "unknown"


class SynthOutcome(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: SynthStatus
    bindings: dict[str, Expression] = Field(default_factory=dict)
    candidates_tried: int = 0
    backend: str = "internal"

    @property
    def solved(self) -> bool:
        return self.status is SynthStatus.SOLVED

    @field_serializer("bindings")
    def serialize_bindings(self, bindings: dict[str, Expression]) -> dict[str, str]:
        return {name: str(body) for name, body in bindings.items()}


class VerifyStatus(StrEnum):
    VALID = "valid"
    COUNTEREXAMPLE = "counterexample"
    UNKNOWN = "unknown"
    TIMED_OUT = "timed_out"


class VerifyOutcome(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: VerifyStatus
    model: dict[str, int | bool | ArrayValue] | None = None
    reason: str | None = None

    @property
    def valid(self) -> bool:
        return self.status is VerifyStatus.VALID


class FiniteCheckResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: Literal["sat", "unsat_within_window"]
    witness: dict[str, int | bool | ArrayValue] | None = None
    explored: int = 0

    @property
    def satisfiable(self) -> bool:
        return self.status == "sat"


class FunctionDefinition(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    params: tuple[tuple[str, Sort], ...]
    return_sort: Sort
    body: Expression


class ParsedReply(BaseModel):
    """A solver answer, classified."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["define_funs", "sat", "unsat", "unknown", "malformed"]
    definitions: tuple[FunctionDefinition, ...] = ()
    model: dict[str, int | bool | ArrayValue] = Field(default_factory=dict)
    raw: str = ""
    reason: str | None = None


class EnumerationLimits(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_size: PositiveInt = ENUMERATION_SIZE_CAP
    max_candidates: PositiveInt = ENUMERATION_CANDIDATE_CAP
    timeout: PositiveFloat = TEMPLATE_SYNTH_TIMEOUT
