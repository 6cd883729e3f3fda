from collections.abc import Mapping
from typing import Self

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveInt,
    field_serializer,
    model_validator,
)

from ..utilities.constants import DEFAULT_B_MAX, DEFAULT_B_START, DEFAULT_B_STEP, DEFAULT_SYGUS_LOGIC
from .expressions import Expression, Quant, Sort, SynthApp, Var


def _walk(e: Expression) -> list[Expression]:
    stack, seen = [e], []
    while stack:
        node = stack.pop()
        seen.append(node)
        stack.extend(node.children())
    return seen


def _check_scoped(e: Expression, scope: Mapping[str, Sort], funs: Mapping[str, "SynthFun"], where: str) -> None:
    """Every free variable is in `scope` with its sort; every application names a known function."""

    def visit(node: Expression, bound: frozenset[str]) -> None:
        match node:
            case Var(name=name, var_sort=sort):
                if name in bound:
                    return
                if scope.get(name) is not sort:
                    msg = f"{where}: undeclared symbol {name} of sort {sort}"
                    raise ValueError(msg)
            case Quant(binders=binders, body=body):
                visit(body, bound | {name for name, _ in binders})
                return
            case SynthApp(fun=fun, args=args, return_sort=sort):
                fn = funs.get(fun)
                if fn is None:
                    msg = f"{where}: application of undeclared function {fun}"
                    raise ValueError(msg)
                if fn.return_sort is not sort or tuple(a.sort for a in args) != tuple(s for _, s in fn.params):
                    msg = f"{where}: application of {fun} does not match its signature"
                    raise ValueError(msg)
        for child in node.children():
            visit(child, bound)

    visit(e, frozenset())


class Grammar(BaseModel):
    """
    A context-free term grammar. Nonterminal placeholders inside productions
    are `Var` leaves named after a nonterminal.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nonterminals: tuple[tuple[str, Sort], ...]
    start: str
    productions: dict[str, tuple[Expression, ...]]

    @model_validator(mode="after")
    def check_productions(self) -> Self:
        sorts = dict(self.nonterminals)
        if self.start not in sorts:
            msg = f"start symbol {self.start} is not a declared nonterminal"
            raise ValueError(msg)
        for name, alternatives in self.productions.items():
            if name not in sorts:
                msg = f"productions given for undeclared nonterminal {name}"
                raise ValueError(msg)
            for production in alternatives:
                if production.sort is not sorts[name]:
                    msg = f"production {production} has sort {production.sort}, nonterminal {name} is {sorts[name]}"
                    raise ValueError(msg)
        return self

    @property
    def start_sort(self) -> Sort:
        return dict(self.nonterminals)[self.start]

    def placeholders(self) -> dict[str, Sort]:
        return dict(self.nonterminals)


class SynthFun(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    params: tuple[tuple[str, Sort], ...]
    return_sort: Sort
    grammar: Grammar | None = None

    @model_validator(mode="after")
    def check_signature(self) -> Self:
        names = [name for name, _ in self.params]
        if len(set(names)) != len(names):
            msg = f"synth-fun {self.name} has duplicate parameters: {names}"
            raise ValueError(msg)
        if self.grammar is None:
            return self
        if self.grammar.start_sort is not self.return_sort:
            msg = f"grammar of {self.name} starts at sort {self.grammar.start_sort}, expected {self.return_sort}"
            raise ValueError(msg)
        clash = set(names) & set(self.grammar.placeholders())
        if clash:
            msg = f"grammar nonterminals of {self.name} shadow parameters: {sorted(clash)}"
            raise ValueError(msg)
        scope = dict(self.params) | self.grammar.placeholders()
        for alternatives in self.grammar.productions.values():
            for production in alternatives:
                _check_scoped(production, scope, {}, f"grammar of {self.name}")
        return self

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.params)

    def with_grammar(self, grammar: Grammar | None) -> "SynthFun":
        return self.model_copy(update={"grammar": grammar})


class Problem(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    logic: str = DEFAULT_SYGUS_LOGIC
    declared_vars: tuple[tuple[str, Sort], ...] = ()
    synth_funs: tuple[SynthFun, ...] = ()
    constraints: tuple[Expression, ...] = ()

    @model_validator(mode="after")
    def check_symbols(self) -> Self:
        names = [name for name, _ in self.declared_vars]
        if len(set(names)) != len(names):
            msg = f"variable declared twice: {names}"
            raise ValueError(msg)
        funs = self.functions
        if len(funs) != len(self.synth_funs):
            msg = "synth-fun declared twice"
            raise ValueError(msg)
        scope = dict(self.declared_vars)
        for index, constraint in enumerate(self.constraints):
            if constraint.sort is not Sort.BOOL:
                msg = f"constraint {index} is not Boolean: {constraint}"
                raise ValueError(msg)
            _check_scoped(constraint, scope, funs, f"constraint {index}")
        return self

    @property
    def functions(self) -> dict[str, SynthFun]:
        return {fn.name: fn for fn in self.synth_funs}

    def definitions(self, bindings: Mapping[str, Expression]) -> dict[str, tuple[tuple[str, ...], Expression]]:
        funs = self.functions
        return {name: (funs[name].param_names, body) for name, body in bindings.items() if name in funs}

    def with_constraints(self, constraints: tuple[Expression, ...]) -> "Problem":
        return self.model_copy(update={"constraints": constraints})

    def with_grammars(self, grammars: Mapping[str, Grammar]) -> "Problem":
        funs = tuple(fn.with_grammar(grammars[fn.name]) if fn.name in grammars else fn for fn in self.synth_funs)
        return self.model_copy(update={"synth_funs": funs})


class BoundConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    b_start: PositiveInt = DEFAULT_B_START
    b_max: PositiveInt = DEFAULT_B_MAX
    step: PositiveInt = DEFAULT_B_STEP

    @model_validator(mode="after")
    def check_range(self) -> Self:
        if self.b_start > self.b_max:
            msg = f"b_start ({self.b_start}) exceeds b_max ({self.b_max})"
            raise ValueError(msg)
        return self

    def schedule(self) -> list[int]:
        """Bounds in the order tried; the last one is clamped to `b_max`."""
        bounds = list(range(self.b_start, self.b_max + 1, self.step))
        if bounds[-1] != self.b_max:
            bounds.append(self.b_max)
        return bounds


class BoundedProblem(BaseModel):
    """A problem restricted to arrays of length `bound`; its constraints are quantifier-free."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: Problem
    bound: PositiveInt
    constraints: tuple[Expression, ...]

    @model_validator(mode="after")
    def check_quantifier_free(self) -> Self:
        for constraint in self.constraints:
            if any(isinstance(node, Quant) for node in _walk(constraint)):
                msg = f"bounded constraint still quantified: {constraint}"
                raise ValueError(msg)
        return self

    @property
    def synth_funs(self) -> tuple[SynthFun, ...]:
        return self.base.synth_funs

    @property
    def declared_vars(self) -> tuple[tuple[str, Sort], ...]:
        return self.base.declared_vars

    def as_problem(self) -> Problem:
        return self.base.with_constraints(self.constraints)

    def with_grammars(self, grammars: Mapping[str, Grammar]) -> "BoundedProblem":
        return self.model_copy(update={"base": self.base.with_grammars(grammars)})


class IndexSet(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    terms: tuple[Expression, ...] = ()

    @field_serializer("terms")
    def serialize_terms(self, terms: tuple[Expression, ...]) -> list[str]:
        return [str(t) for t in terms]

    def __len__(self) -> int:
        return len(self.terms)


class FragmentViolation(BaseModel):
    path: str
    reason: str


class FragmentReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    in_fragment: bool
    violations: list[FragmentViolation] = Field(default_factory=list)
    index_guard: Expression | None = None
    value_constraint: Expression | None = None
    index_set: IndexSet | None = None
    empty_index_set_fallback: bool = False

    @model_validator(mode="after")
    def check_consistency(self) -> Self:
        if self.in_fragment == bool(self.violations):
            msg = "in_fragment must hold exactly when there are no violations"
            raise ValueError(msg)
        return self

    @field_serializer("index_guard", "value_constraint")
    def serialize_expression(self, e: Expression | None) -> str | None:
        return None if e is None else str(e)


class MatchWitness(BaseModel):
    """How two predicates are one template instantiated at different base indices."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fresh_var: str
    read_offsets: tuple[tuple[str, int], ...]
    const_offsets: tuple[int, ...] = ()
    base_indices: frozenset[int]
    template: Expression
