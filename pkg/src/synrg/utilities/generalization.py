"""
Syntactic generalization of bounded solutions.

Operands of a conjunction (disjunction) that are the same template read at
consecutive base indices are replaced by one universal (existential)
quantifier, provided the base indices cover exactly the positions the
template can be read at under the bound. Everything else is kept verbatim.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

from ..types.expressions import (
    Apply,
    Expression,
    IntConst,
    Operator,
    Quant,
    QuantKind,
    Select,
    Sort,
    Var,
    offset,
)
from ..types.problem_types import MatchWitness
from .constants import FRESH_PREFIX
from .expressions import FreshNames, flatten, rebuild, rename_bound, substitute

logger = logging.getLogger(__name__)

type EquivalenceCheck = Callable[[Expression, Expression], bool]

# Stands for the shared index while templates are compared; minted names always carry a counter.
PLACEHOLDER = Var(FRESH_PREFIX, Sort.INT)
_HOLE = Var(f"{FRESH_PREFIX}#", Sort.INT)


@dataclass(frozen=True, slots=True)
class _Constant:
    value: int
    array: str | None  # set when the constant is the index of a read of a named array


def _holes(e: Expression, found: list[_Constant]) -> Expression:
    """Skeleton of `e` with integer constants punched out, collecting them in preorder."""
    match e:
        case IntConst(value=value):
            found.append(_Constant(value, None))
            return _HOLE
        case Select(array=Var(name=name) as array, index=IntConst(value=value)):
            found.append(_Constant(value, name))
            return Select(array, _HOLE)
        case Apply(op=Operator.MUL, args=(IntConst() as factor, other)):
            return Apply(Operator.MUL, (factor, _holes(other, found)))
        case Apply(op=Operator.MUL, args=(other, IntConst() as factor)):
            return Apply(Operator.MUL, (_holes(other, found), factor))
    children = e.children()
    if not children:
        return e
    return rebuild(e, tuple(_holes(child, found) for child in children))


def _fill(skeleton: Expression, fillers: list[Expression]) -> Expression:
    """Inverse of `_holes`: plug the fillers back in, in preorder."""
    it = iter(fillers)

    def plug(node: Expression) -> Expression:
        if node == _HOLE:
            return next(it)
        children = node.children()
        if not children:
            return node
        return rebuild(node, tuple(plug(child) for child in children))

    return plug(skeleton)


def _alpha(e: Expression) -> Expression:
    return rename_bound(e, FreshNames(f"{FRESH_PREFIX}b"))


_MIRROR = {Operator.LE: Operator.GE, Operator.LT: Operator.GT}


def orient(e: Expression) -> Expression:
    """Write `a <= b` as `b >= a` and `a < b` as `b > a` throughout."""
    children = e.children()
    if children:
        e = rebuild(e, tuple(orient(child) for child in children))
    if isinstance(e, Apply) and e.op in _MIRROR:
        return Apply(_MIRROR[e.op], (e.args[1], e.args[0]))
    return e


def _witness(phi1: Expression, phi2: Expression) -> MatchWitness | None:
    consts1: list[_Constant] = []
    consts2: list[_Constant] = []
    skeleton = _holes(phi1, consts1)
    if _alpha(skeleton) != _alpha(_holes(phi2, consts2)):
        return None
    pairs = list(zip(consts1, consts2, strict=True))
    reads = [k for k, (c, _) in enumerate(pairs) if c.array is not None]
    differing = [k for k in reads if pairs[k][0].value != pairs[k][1].value]
    if differing:
        deltas = {pairs[k][0].value - pairs[k][1].value for k in differing}
        if len(deltas) != 1:
            return None
        delta = deltas.pop()
        abstracted = differing
    elif phi1 == phi2 and reads:
        delta, abstracted = 0, reads
    else:
        return None

    base1 = min(pairs[k][0].value for k in abstracted)
    base2 = base1 - delta
    fillers: list[Expression] = []
    read_offsets: dict[tuple[str, int], None] = {}
    const_offsets: list[int] = []
    for k, (c, d) in enumerate(pairs):
        if k in abstracted:
            fillers.append(offset(PLACEHOLDER, c.value - base1))
            read_offsets.setdefault((c.array or "", c.value - base1), None)
        elif c.array is None and c.value != d.value:
            if c.value - d.value != delta:
                return None
            fillers.append(offset(PLACEHOLDER, c.value - base1))
            const_offsets.append(c.value - base1)
        elif c.value != d.value:
            return None
        else:
            fillers.append(IntConst(c.value))
    return MatchWitness(
        fresh_var=PLACEHOLDER.name,
        read_offsets=tuple(read_offsets),
        const_offsets=tuple(const_offsets),
        base_indices=frozenset({base1, base2}),
        template=_fill(skeleton, fillers),
    )


def _all_reads_template(phi: Expression) -> tuple[Expression, int, tuple[tuple[str, int], ...]] | None:
    consts: list[_Constant] = []
    skeleton = _holes(phi, consts)
    reads = [c.value for c in consts if c.array is not None]
    if not reads:
        return None
    base = min(reads)
    fillers = [offset(PLACEHOLDER, c.value - base) if c.array is not None else IntConst(c.value) for c in consts]
    offsets = tuple(dict.fromkeys((c.array or "", c.value - base) for c in consts if c.array is not None))
    return _fill(skeleton, fillers), base, offsets


def matching(
    phi1: Expression,
    phi2: Expression,
    *,
    equivalent: EquivalenceCheck | None = None,
) -> MatchWitness | None:
    """
    Decide whether two predicates are one template at two base indices.

    Read constants that differ must all differ by the same amount; integer
    constants outside reads may differ by that same amount too and are then
    abstracted along with the reads. When `equivalent` is given, predicates
    with different shapes still match if their fully abstracted templates
    are proven equivalent by it.
    """
    witness = _witness(phi1, phi2)
    if witness is None:
        witness = _witness(orient(phi1), orient(phi2))
    if witness is not None or equivalent is None:
        return witness
    first, second = _all_reads_template(phi1), _all_reads_template(phi2)
    if first is None or second is None or first[2] != second[2]:
        return None
    if not equivalent(first[0], second[0]):
        return None
    logger.debug("matched %s and %s by equivalence", phi1, phi2)
    return MatchWitness(
        fresh_var=PLACEHOLDER.name,
        read_offsets=first[2],
        base_indices=frozenset({first[1], second[1]}),
        template=first[0],
    )


def admissible_bases(witness: MatchWitness, b: int) -> frozenset[int]:
    """Bases z with every read `z + e` inside `0..b-1`."""
    offsets = [e for _, e in witness.read_offsets]
    return frozenset(range(-min(offsets), b - max(offsets)))


@dataclass
class _Group:
    members: list[int]
    witness: MatchWitness | None = None
    shape: Expression | None = None
    bases: set[int] = field(default_factory=set)


def _partition(operands: list[Expression], equivalent: EquivalenceCheck | None) -> list[_Group]:
    groups: list[_Group] = []
    for index, operand in enumerate(operands):
        for group in groups:
            witness = matching(operands[group.members[0]], operand, equivalent=equivalent)
            if witness is None:
                continue
            shape = _alpha(witness.template)
            if group.shape is not None and shape != group.shape:
                continue
            if group.witness is None:
                group.witness, group.shape = witness, shape
            group.members.append(index)
            group.bases |= witness.base_indices
            break
        else:
            groups.append(_Group(members=[index]))
    return groups


class _Generalizer:
    def __init__(self, b: int, fresh: Callable[[], str], equivalent: EquivalenceCheck | None) -> None:
        self.b = b
        self.fresh = fresh
        self.equivalent = equivalent
        self.changed = False

    def visit(self, e: Expression) -> Expression:
        if isinstance(e, Apply) and e.op in {Operator.AND, Operator.OR}:
            operands = [self.visit(operand) for operand in flatten(e.op, e)]
            return self.combine(e.op, operands)
        children = e.children()
        if not children:
            return e
        return rebuild(e, tuple(self.visit(child) for child in children))

    def combine(self, op: Operator, operands: list[Expression]) -> Expression:
        replacement: dict[int, Expression] = {}
        skipped: set[int] = set()
        for group in _partition(operands, self.equivalent):
            if group.witness is None:
                continue
            admissible = admissible_bases(group.witness, self.b)
            if group.bases != admissible:
                logger.debug(
                    "set %s does not span: bases %s, admissible %s",
                    [str(operands[k]) for k in group.members],
                    sorted(group.bases),
                    sorted(admissible),
                )
                continue
            name = self.fresh()
            kind = QuantKind.FORALL if op is Operator.AND else QuantKind.EXISTS
            quantified = Quant(kind, ((name, Sort.INT),), substitute(group.witness.template, PLACEHOLDER, Var(name, Sort.INT)))
            logger.debug("generalized %s operands into %s", len(group.members), quantified)
            replacement[group.members[0]] = quantified
            skipped.update(group.members[1:])
            self.changed = True
        items = [replacement.get(k, operand) for k, operand in enumerate(operands) if k not in skipped]
        return items[0] if len(items) == 1 else Apply(op, tuple(items))


def syntactic_generalize(
    e: Expression,
    b: int,
    *,
    fresh: Callable[[], str] | None = None,
    equivalent: EquivalenceCheck | None = None,
) -> Expression:
    """Replace spanning sets of matching predicates by quantifiers, bottom-up."""
    generalizer = _Generalizer(b, fresh or FreshNames(start=1), equivalent)
    result = generalizer.visit(e)
    if not generalizer.changed:
        return e
    logger.debug("generalized %s to %s", e, result)
    return result
