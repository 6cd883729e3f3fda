import logging
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence

import z3

from ..types.expressions import Expression, Sort, conjoin, neq
from ..types.problem_types import Problem
from ..types.solver_types import (
    ArrayValue,
    ParsedReply,
    SolverSpec,
    Value,
    VerifyOutcome,
    VerifyStatus,
    default_value,
)
from ..utilities.constants import FAST_SYNTH_TIMEOUT, SMT_SOLVER_MISSING, VERIFY_TIMEOUT
from ..utilities.evaluation import evaluate
from ..utilities.expressions import free_variables, inline_synth_funs, negate
from ..utilities.sygus.printer import print_smtlib_query, smtlib_assertions
from ..utilities.sygus.replies import parse_reply
from .process_client import SolverProcessClient

logger = logging.getLogger(__name__)

# Arrays the model only describes as a lambda are sampled on this many cells.
_LAMBDA_CELLS = 16


class BaseSmtClient(ABC):
    """
    Abstract base class for SMT backends.

    Subclasses answer single satisfiability queries; verification,
    satisfiability and equivalence checks are built on top of that here.
    """

    name = "smt"

    @abstractmethod
    def check(self, decls: Sequence[tuple[str, Sort]], assertion: Expression, timeout: float) -> ParsedReply:
        """Decide `assertion` over the declared constants; a sat reply carries a model."""

    def verify(
        self,
        problem: Problem,
        bindings: Mapping[str, Expression],
        timeout: float = VERIFY_TIMEOUT,
    ) -> VerifyOutcome:
        """Valid exactly when the backend proves the negated, inlined constraints unsat."""
        missing = [fn.name for fn in problem.synth_funs if fn.name not in bindings]
        if missing:
            msg = f"no binding for {', '.join(missing)}"
            raise ValueError(msg)
        definitions = problem.definitions(bindings)
        formula = conjoin([inline_synth_funs(c, definitions) for c in problem.constraints])
        reply = self.check(problem.declared_vars, negate(formula), timeout)
        match reply.kind:
            case "unsat":
                return VerifyOutcome(status=VerifyStatus.VALID)
            case "sat":
                _check_footprint(formula, reply.model, problem.declared_vars)
                return VerifyOutcome(status=VerifyStatus.COUNTEREXAMPLE, model=reply.model)
            case "unknown" if reply.reason == "timeout":
                return VerifyOutcome(status=VerifyStatus.TIMED_OUT, reason=reply.reason)
        if reply.kind == "malformed":
            logger.warning("%s gave an unreadable answer: %s", self.name, reply.reason)
        return VerifyOutcome(status=VerifyStatus.UNKNOWN, reason=reply.reason)

    def is_satisfiable(self, e: Expression, timeout: float = VERIFY_TIMEOUT) -> bool | None:
        """True or False when the backend decides `e`, None otherwise."""
        reply = self.check(sorted(free_variables(e)), e, timeout)
        if reply.kind in {"sat", "unsat"}:
            return reply.kind == "sat"
        return None

    def equivalent(self, a: Expression, b: Expression, timeout: float = FAST_SYNTH_TIMEOUT) -> bool:
        """Proven equivalence; anything short of a proof counts as not equivalent."""
        if a == b:
            return True
        if a.sort is not b.sort:
            return False
        return self.is_satisfiable(neq(a, b), timeout) is False


def _check_footprint(formula: Expression, model: Mapping[str, Value], decls: Sequence[tuple[str, Sort]]) -> None:
    """Warn when a counterexample does not falsify the formula on the indices it mentions."""
    env = {name: model.get(name, default_value(sort)) for name, sort in decls}
    footprint = {0}
    for value in env.values():
        if isinstance(value, ArrayValue):
            footprint.update(k for k, _ in value.entries)
        elif isinstance(value, int) and not isinstance(value, bool):
            footprint.add(value)
    domain = sorted(k for k in footprint if k >= 0)
    try:
        holds = evaluate(formula, env, domain)
    except (KeyError, TypeError) as e:
        logger.debug("counterexample not evaluated: %s", e)
        return
    if holds:
        logger.warning("counterexample does not falsify the constraints on its footprint %s", domain)


class Z3Client(BaseSmtClient):
    """In-process z3. Every query gets its own context, so calls may run on different threads."""

    name = "z3"

    def check(self, decls: Sequence[tuple[str, Sort]], assertion: Expression, timeout: float) -> ParsedReply:
        text = smtlib_assertions(decls, assertion)
        ctx = z3.Context()
        try:
            assertions = z3.parse_smt2_string(text, ctx=ctx)
        except z3.Z3Exception as e:
            return ParsedReply(kind="malformed", raw=text, reason=str(e))
        solver = z3.Solver(ctx=ctx)
        solver.set("timeout", max(1, int(timeout * 1000)))
        solver.add(assertions)
        result = solver.check()
        if result == z3.unsat:
            return ParsedReply(kind="unsat", raw=text)
        if result == z3.sat:
            return ParsedReply(kind="sat", model=_extract_model(solver.model(), decls, ctx), raw=text)
        reason = solver.reason_unknown()
        if "timeout" in reason or "canceled" in reason:
            return ParsedReply(kind="unknown", raw=text, reason="timeout")
        return ParsedReply(kind="unknown", raw=text, reason=reason)


def _z3_sort(sort: Sort, ctx: z3.Context) -> z3.SortRef:
    match sort:
        case Sort.BOOL:
            return z3.BoolSort(ctx)
        case Sort.INT:
            return z3.IntSort(ctx)
        case Sort.ARRAY:
            return z3.ArraySort(z3.IntSort(ctx), z3.IntSort(ctx))


def _extract_model(model: z3.ModelRef, decls: Sequence[tuple[str, Sort]], ctx: z3.Context) -> dict[str, Value]:
    values: dict[str, Value] = {}
    for name, sort in decls:
        term = model.eval(z3.Const(name, _z3_sort(sort, ctx)), model_completion=True)
        match sort:
            case Sort.BOOL:
                values[name] = z3.is_true(term)
            case Sort.INT:
                values[name] = term.as_long()
            case Sort.ARRAY:
                values[name] = _array_value(model, term)
    return values


def _array_value(model: z3.ModelRef, term: z3.ExprRef) -> ArrayValue:
    if z3.is_store(term):
        inner, index, value = term.children()
        return _array_value(model, inner).write(
            model.eval(index, model_completion=True).as_long(),
            model.eval(value, model_completion=True).as_long(),
        )
    if z3.is_K(term):
        return ArrayValue(default=model.eval(term.arg(0), model_completion=True).as_long())
    if z3.is_as_array(term):
        interp = model[z3.get_as_array_func(term)]
        entries = {}
        for k in range(interp.num_entries()):
            entry = interp.entry(k)
            entries[entry.arg_value(0).as_long()] = entry.value().as_long()
        return ArrayValue.of(entries, default=interp.else_value().as_long())
    cells = {k: model.eval(z3.Select(term, k), model_completion=True).as_long() for k in range(_LAMBDA_CELLS)}
    logger.debug("array model %s sampled on %s cells", term, _LAMBDA_CELLS)
    default = model.eval(z3.Select(term, -1), model_completion=True).as_long()
    return ArrayValue.of(cells, default=default)


class SmtSolverClient(BaseSmtClient):
    """An external SMT-LIB solver run as a subprocess."""

    def __init__(self, spec: SolverSpec):
        self.process = SolverProcessClient(spec, SMT_SOLVER_MISSING, suffix=".smt2")
        self.name = self.process.name

    def check(self, decls: Sequence[tuple[str, Sort]], assertion: Expression, timeout: float) -> ParsedReply:
        query = print_smtlib_query(decls, assertion)
        stdout = self.process.run(query, timeout)
        if stdout is None:
            return ParsedReply(kind="unknown", raw="", reason="timeout")
        reply = parse_reply(stdout, declared=dict(decls))
        if reply.kind == "unknown" and "timeout" in stdout:
            return reply.model_copy(update={"reason": "timeout"})
        return reply
