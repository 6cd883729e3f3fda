"""
Restriction of quantified array specifications to a bound.

Restricting to bound `b` models every array as having exactly the indices
`0..b-1`: each quantifier that reads arrays at its own variable is guarded by
`0 <= t < b` for every such read index `t`, reads at indices not mentioning
any bound variable guard the whole constraint, and the guarded quantifiers
are then expanded into finite conjunctions and disjunctions.
"""

import logging

from ..types.expressions import (
    TRUE,
    Apply,
    Expression,
    IntConst,
    Operator,
    Quant,
    QuantKind,
    Select,
    conjoin,
    disjoin,
    implies,
    le,
    lt,
)
from ..types.problem_types import BoundedProblem, Problem
from .expressions import desugar_binders, free_names, rebuild, simplify, substitute

logger = logging.getLogger(__name__)


def index_guard(terms: list[Expression], b: int) -> Expression:
    """`0 <= t < b` for every term, as one flat conjunction."""
    bounds: list[Expression] = []
    for term in terms:
        bounds.extend((le(IntConst(0), term), lt(term, IntConst(b))))
    return conjoin(bounds)


def _dedupe(terms: list[Expression]) -> list[Expression]:
    return list(dict.fromkeys(terms))


def _bound(e: Expression, b: int) -> tuple[Expression, list[Expression]]:
    """Guard quantifiers in `e`; return it with the read indices not yet claimed by a binder."""
    match e:
        case Quant(kind=kind, binders=binders, body=body):
            new_body, reads = _bound(body, b)
            names = {name for name, _ in binders}
            claimed = _dedupe([t for t in reads if free_names(t) & names])
            remaining = [t for t in reads if not free_names(t) & names]
            if not claimed:
                return rebuild(e, (new_body,)), remaining
            guard = index_guard(claimed, b)
            if kind is QuantKind.FORALL:
                guarded = implies(guard, new_body)
            else:
                guarded = Apply(Operator.AND, (guard, new_body))
            return Quant(kind, binders, guarded), remaining
        case Select(array=array, index=index):
            new_array, array_reads = _bound(array, b)
            new_index, index_reads = _bound(index, b)
            return rebuild(e, (new_array, new_index)), [*array_reads, *index_reads, new_index]
        case _:
            children = e.children()
            if not children:
                return e, []
            results = [_bound(child, b) for child in children]
            reads = [t for _, child_reads in results for t in child_reads]
            return rebuild(e, tuple(new for new, _ in results)), reads


def bound_quantification(e: Expression, b: int) -> tuple[Expression, list[Expression]]:
    """
    Guard every quantifier whose body reads arrays at its bound variable.

    Returns the rewritten expression and the read indices that mention no
    bound variable, in order of first occurrence.
    """
    guarded, free_reads = _bound(e, b)
    return guarded, _dedupe(free_reads)


def remove_quantifiers(e: Expression, b: int) -> Expression:
    """Expand every quantifier over `0..b-1`, innermost first, then simplify."""

    def expand(node: Expression) -> Expression:
        match node:
            case Quant(kind=kind, binders=binders, body=body):
                instances = [expand(body)]
                for name, _ in binders:
                    instances = [substitute(inst, name, IntConst(k)) for inst in instances for k in range(b)]
                return conjoin(instances) if kind is QuantKind.FORALL else disjoin(instances)
            case _:
                children = node.children()
                if not children:
                    return node
                return rebuild(node, tuple(expand(child) for child in children))

    return simplify(expand(e))


def restrict_constraint(constraint: Expression, b: int) -> Expression:
    guarded, free_reads = bound_quantification(desugar_binders(constraint), b)
    if free_reads:
        guarded = implies(index_guard(free_reads, b), guarded)
    return remove_quantifiers(guarded, b)


def restrict_spec(p: Problem, b: int) -> BoundedProblem:
    """Restrict every constraint of `p` to arrays of length `b`."""
    constraints = tuple(restrict_constraint(c, b) for c in p.constraints)
    dropped = sum(1 for c in constraints if c == TRUE)
    if dropped:
        logger.debug("restriction to b=%s made %s constraint(s) trivially true", b, dropped)
    return BoundedProblem(base=p, bound=b, constraints=constraints)
