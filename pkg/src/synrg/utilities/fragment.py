"""
Array property fragment: classification, index sets and instantiation.

A formula is in the fragment when every universal quantifier has the shape
`forall i1..ik. guard => value` where the guard compares quantified indices
with ground index terms only, and the value constraint uses quantified
indices only directly as array read positions. For such formulas the
universals can be instantiated over the finite set of ground index terms
without losing satisfiability.
"""

import itertools
import logging
from collections.abc import Callable

from ..types.expressions import (
    TRUE,
    Apply,
    Expression,
    IntConst,
    Operator,
    Quant,
    QuantKind,
    Select,
    Sort,
    Var,
    conjoin,
    disjoin,
)
from ..types.problem_types import FragmentReport, FragmentViolation, IndexSet, Problem
from .exceptions import EmptyIndexSetError, NotSkolemizableError
from .expressions import FreshNames, free_names, rebuild, simplify, substitute_many

logger = logging.getLogger(__name__)

_GUARD_COMPARISONS = frozenset({Operator.LE, Operator.LT, Operator.GE, Operator.GT, Operator.EQ})

# Polarity of a subformula: True positive, False negative, None both.
type Polarity = bool | None


def _flip(polarity: Polarity) -> Polarity:
    return None if polarity is None else not polarity


def _effective(kind: QuantKind, polarity: Polarity) -> QuantKind | None:
    if polarity is None:
        return None
    return kind if polarity else kind.dual


def _child_polarities(node: Expression, polarity: Polarity) -> list[Polarity]:
    match node:
        case Apply(op=Operator.NOT):
            return [_flip(polarity)]
        case Apply(op=Operator.IMPLIES):
            return [_flip(polarity), polarity]
        case Apply(op=Operator.AND | Operator.OR):
            return [polarity] * len(node.args)
        case Quant():
            return [polarity]
    return [None] * len(node.children())


def _split_universal(e: Quant, polarity: Polarity) -> tuple[list[str], Expression]:
    """Merge a run of nested universals into one block."""
    names = list(e.names)
    body = e.body
    while isinstance(body, Quant) and _effective(body.kind, polarity) is QuantKind.FORALL:
        names.extend(body.names)
        body = body.body
    return names, body


def _split_guard(body: Expression) -> tuple[Expression, Expression]:
    if isinstance(body, Apply) and body.op is Operator.IMPLIES:
        return body.args[0], body.args[1]
    return TRUE, body


class _Classifier:
    def __init__(self) -> None:
        self.violations: list[FragmentViolation] = []
        self.index_guard: Expression | None = None
        self.value_constraint: Expression | None = None

    def flag(self, path: str, reason: str) -> None:
        violation = FragmentViolation(path=path, reason=reason)
        if violation not in self.violations:
            self.violations.append(violation)

    def visit(self, node: Expression, path: str, polarity: Polarity, under_universal: bool) -> None:
        if isinstance(node, Quant):
            effective = _effective(node.kind, polarity)
            if under_universal:
                self.flag(path, "quantifier alternation under a universal quantifier")
                return
            if effective is QuantKind.EXISTS:
                self.visit(node.body, f"{path}/{node.kind}", polarity, under_universal=False)
                return
            if effective is None:
                self.flag(path, "quantifier under a bi-implication has no fixed polarity")
            names, body = _split_universal(node, polarity)
            self.check_universal(names, body, f"{path}/{node.kind}")
            self.visit(body, f"{path}/{node.kind}", polarity, under_universal=True)
            return
        for index, (child, child_polarity) in enumerate(zip(node.children(), _child_polarities(node, polarity), strict=True)):
            self.visit(child, f"{path}/{_label(node)}[{index}]", child_polarity, under_universal)

    def check_universal(self, names: list[str], body: Expression, path: str) -> None:
        guard, value = _split_guard(body)
        if self.index_guard is None:
            self.index_guard, self.value_constraint = guard, value
        bound = set(names)
        self.check_guard(guard, bound, f"{path}/guard")
        self.check_value(value, bound, f"{path}/value")

    def check_guard(self, guard: Expression, bound: set[str], path: str) -> None:
        match guard:
            case Apply(op=Operator.AND | Operator.OR, args=args):
                for index, arg in enumerate(args):
                    self.check_guard(arg, bound, f"{path}/{_label(guard)}[{index}]")
            case Apply(op=op, args=(left, right)) if op in _GUARD_COMPARISONS:
                for operand in (left, right):
                    mentioned = free_names(operand) & bound
                    if mentioned and not (isinstance(operand, Var) and operand.name in bound):
                        self.flag(path, "arithmetic on a universally quantified index in the index guard")
                    if any(isinstance(n, Select) for n in _walk(operand)) and mentioned:
                        self.flag(path, "array read inside the index guard")
            case Apply(op=Operator.NEQ):
                self.flag(path, "disequality in the index guard")
            case _ if guard == TRUE:
                pass
            case _ if not free_names(guard) & bound:
                pass
            case _:
                self.flag(path, "index guard is not a combination of index comparisons")

    def check_value(self, value: Expression, bound: set[str], path: str) -> None:
        match value:
            case Select(array=array, index=index):
                if isinstance(index, Var) and index.name in bound:
                    self.check_value(array, bound, path)
                    return
                if free_names(index) & bound:
                    self.flag(path, "arithmetic on a quantified index in an array read")
                    return
            case Var(name=name) if name in bound:
                self.flag(path, "quantified index used outside an array read")
                return
            case Quant():
                return
        for child in value.children():
            self.check_value(child, bound, path)


def _label(node: Expression) -> str:
    match node:
        case Apply(op=op):
            return op.value
        case Quant(kind=kind):
            return kind.value
    return type(node).__name__.lower()


def _walk(e: Expression) -> list[Expression]:
    nodes, stack = [], [e]
    while stack:
        node = stack.pop()
        nodes.append(node)
        stack.extend(node.children())
    return nodes


def classify_array_property(e: Expression) -> FragmentReport:
    classifier = _Classifier()
    classifier.visit(e, "formula", polarity=True, under_universal=False)
    return FragmentReport(
        in_fragment=not classifier.violations,
        violations=classifier.violations,
        index_guard=classifier.index_guard,
        value_constraint=classifier.value_constraint,
    )


def index_terms(e: Expression) -> IndexSet:
    """Ground array-read indices and ground operands of index guards, in order of first occurrence."""
    found: dict[Expression, None] = {}

    def ground(term: Expression, bound: frozenset[str]) -> bool:
        return not free_names(term) & bound

    def guard_operands(guard: Expression, bound: frozenset[str]) -> None:
        match guard:
            case Apply(op=Operator.AND | Operator.OR | Operator.NOT, args=args):
                for arg in args:
                    guard_operands(arg, bound)
            case Apply(op=op, args=(left, right)) if op in _GUARD_COMPARISONS | {Operator.NEQ} and left.sort is Sort.INT:
                for operand in (left, right):
                    if ground(operand, bound) and not any(isinstance(n, Select) for n in _walk(operand)):
                        found.setdefault(operand, None)

    def visit(node: Expression, bound: frozenset[str]) -> None:
        match node:
            case Quant(names=names, body=body):
                inner = bound | set(names)
                guard, _ = _split_guard(body)
                if guard is not TRUE:
                    guard_operands(guard, inner)
                visit(body, inner)
                return
            case Select(array=array, index=index):
                visit(array, bound)
                visit(index, bound)
                if ground(index, bound):
                    found.setdefault(index, None)
                return
        for child in node.children():
            visit(child, bound)

    visit(e, frozenset())
    return IndexSet(terms=tuple(found))


def skolemize(e: Expression, fresh: Callable[[], str] | None = None) -> Expression:
    """Replace existentials not under a universal by fresh constants."""
    fresh = fresh or FreshNames()

    def visit(node: Expression, polarity: Polarity, under_universal: bool) -> Expression:
        if isinstance(node, Quant):
            effective = _effective(node.kind, polarity)
            if effective is QuantKind.EXISTS:
                if under_universal:
                    msg = f"existential under a universal cannot be skolemized: {node}"
                    raise NotSkolemizableError(msg)
                constants = {name: Var(fresh(), sort) for name, sort in node.binders}
                return visit(substitute_many(node.body, constants), polarity, under_universal)
            if effective is None:
                msg = f"quantifier without a fixed polarity cannot be skolemized: {node}"
                raise NotSkolemizableError(msg)
            return rebuild(node, (visit(node.body, polarity, under_universal=True),))
        children = node.children()
        if not children:
            return node
        return rebuild(
            node,
            tuple(
                visit(child, child_polarity, under_universal)
                for child, child_polarity in zip(children, _child_polarities(node, polarity), strict=True)
            ),
        )

    return visit(e, True, under_universal=False)


def instantiate_universals(e: Expression, r: IndexSet) -> Expression:
    """Replace every universal quantifier by the conjunction of its instances over `r`."""

    def visit(node: Expression, polarity: Polarity) -> Expression:
        if isinstance(node, Quant):
            body = visit(node.body, polarity)
            if _effective(node.kind, polarity) is not QuantKind.FORALL:
                return rebuild(node, (body,))
            if not r.terms:
                msg = f"no index terms to instantiate {node}"
                raise EmptyIndexSetError(msg)
            names = node.names
            instances = [
                substitute_many(body, dict(zip(names, combo, strict=True)))
                for combo in itertools.product(r.terms, repeat=len(names))
            ]
            return conjoin(instances) if node.kind is QuantKind.FORALL else disjoin(instances)
        children = node.children()
        if not children:
            return node
        return rebuild(
            node,
            tuple(visit(child, p) for child, p in zip(children, _child_polarities(node, polarity), strict=True)),
        )

    return simplify(visit(e, True))


def analyze_problem(p: Problem) -> FragmentReport:
    """Advisory fragment report over the conjunction of the constraints."""
    formula = conjoin(p.constraints)
    report = classify_array_property(formula)
    try:
        r = index_terms(skolemize(formula))
    except NotSkolemizableError as e:
        logger.info("index set not computed: %s", e)
        return report
    fallback = not r.terms and report.index_guard is not None
    if fallback:
        logger.warning("empty index set for a formula with universals; instantiating over {0}")
        r = IndexSet(terms=(IntConst(0),))
    return report.model_copy(update={"index_set": r, "empty_index_set_fallback": fallback})
