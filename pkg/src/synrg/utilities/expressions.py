from collections.abc import Callable, Iterator, Mapping
from typing import Literal

from ..types.expressions import (
    FALSE,
    TRUE,
    Apply,
    BoolConst,
    Expression,
    IntConst,
    Operator,
    Quant,
    QuantKind,
    Select,
    Sort,
    Store,
    SynthApp,
    Var,
    conjoin,
    disjoin,
    not_,
)
from .constants import FRESH_PREFIX
from .exceptions import SortError

type Definitions = Mapping[str, tuple[tuple[str, ...], Expression]]
type QuantifierProfile = Literal["none", "single", "alternating"]


class FreshNames:
    """Mints `z!0, z!1, ...`; the prefix is rejected by the parser, so minted names never collide with input."""

    def __init__(self, prefix: str = FRESH_PREFIX, start: int = 0) -> None:
        self.prefix = prefix
        self.counter = start

    def __call__(self) -> str:
        name = f"{self.prefix}{self.counter}"
        self.counter += 1
        return name


def rebuild(e: Expression, children: tuple[Expression, ...]) -> Expression:
    """Copy of `e` with its children replaced, or `e` itself when nothing changed."""
    old = e.children()
    if len(old) == len(children) and all(new is prev for new, prev in zip(children, old, strict=True)):
        return e
    match e:
        case Apply(op=op):
            return Apply(op, children)
        case Select():
            return Select(children[0], children[1])
        case Store():
            return Store(children[0], children[1], children[2])
        case Quant(kind=kind, binders=binders):
            return Quant(kind, binders, children[0])
        case SynthApp(fun=fun, return_sort=sort):
            return SynthApp(fun, children, sort)
    return e


def transform(e: Expression, fn: Callable[[Expression], Expression]) -> Expression:
    """Bottom-up rewrite: `fn` sees every node after its children were rewritten."""
    children = e.children()
    if children:
        e = rebuild(e, tuple(transform(child, fn) for child in children))
    return fn(e)


def iter_subterms(e: Expression) -> Iterator[Expression]:
    """Preorder walk, quantifier bodies included."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def expression_size(e: Expression) -> int:
    return sum(1 for _ in iter_subterms(e))


def free_variables(e: Expression) -> frozenset[tuple[str, Sort]]:
    match e:
        case Var(name=name, var_sort=sort):
            return frozenset({(name, sort)})
        case Quant(binders=binders, body=body):
            bound = {name for name, _ in binders}
            return frozenset(v for v in free_variables(body) if v[0] not in bound)
        case _:
            result: frozenset[tuple[str, Sort]] = frozenset()
            for child in e.children():
                result |= free_variables(child)
            return result


def free_names(e: Expression) -> frozenset[str]:
    return frozenset(name for name, _ in free_variables(e))


def synth_apps(e: Expression) -> list[SynthApp]:
    return [node for node in iter_subterms(e) if isinstance(node, SynthApp)]


def contains_quantifier(e: Expression) -> bool:
    return any(isinstance(node, Quant) for node in iter_subterms(e))


def contains_synth_app(e: Expression) -> bool:
    return any(isinstance(node, SynthApp) for node in iter_subterms(e))


def quantifier_profile(e: Expression) -> QuantifierProfile:
    kinds_seen = False

    def walk(node: Expression, enclosing: QuantKind | None) -> bool:
        nonlocal kinds_seen
        if isinstance(node, Quant):
            kinds_seen = True
            if enclosing is not None and node.kind is not enclosing:
                return True
            enclosing = node.kind
        return any(walk(child, enclosing) for child in node.children())

    if walk(e, None):
        return "alternating"
    return "single" if kinds_seen else "none"


def flatten(op: Operator, e: Expression) -> list[Expression]:
    """Operands of `e` under a tree of nested `op` applications."""
    if isinstance(e, Apply) and e.op is op:
        return [leaf for arg in e.args for leaf in flatten(op, arg)]
    return [e]


def _fresh_binder(name: str, taken: set[str]) -> str:
    k = 1
    while f"{name}!{k}" in taken:
        k += 1
    return f"{name}!{k}"


def substitute_many(e: Expression, mapping: Mapping[str, Expression]) -> Expression:
    """Simultaneous capture-avoiding substitution of free variables."""
    if not mapping:
        return e
    match e:
        case Var(name=name, var_sort=sort):
            if name not in mapping:
                return e
            term = mapping[name]
            if term.sort is not sort:
                msg = f"cannot substitute {term} of sort {term.sort} for {name} of sort {sort}"
                raise SortError(msg)
            return term
        case Quant(kind=kind, binders=binders, body=body):
            names = {name for name, _ in binders}
            body_free = free_names(body)
            relevant = {k: v for k, v in mapping.items() if k not in names and k in body_free}
            if not relevant:
                return e
            incoming: set[str] = set()
            for term in relevant.values():
                incoming |= free_names(term)
            taken = incoming | body_free | names
            renames: dict[str, Expression] = {}
            new_binders = []
            for name, sort in binders:
                if name in incoming:
                    fresh = _fresh_binder(name, taken)
                    taken.add(fresh)
                    renames[name] = Var(fresh, sort)
                    new_binders.append((fresh, sort))
                else:
                    new_binders.append((name, sort))
            return Quant(kind, tuple(new_binders), substitute_many(body, relevant | renames))
        case _:
            children = e.children()
            if not children:
                return e
            return rebuild(e, tuple(substitute_many(child, mapping) for child in children))


def substitute(e: Expression, var: str | Var, term: Expression) -> Expression:
    if isinstance(var, Var):
        if var.sort is not term.sort:
            msg = f"cannot substitute {term} of sort {term.sort} for {var.name} of sort {var.sort}"
            raise SortError(msg)
        var = var.name
    return substitute_many(e, {var: term})


def rename_bound(e: Expression, fresh: Callable[[], str]) -> Expression:
    """Give every binder in `e` a name from `fresh`, in preorder."""
    match e:
        case Quant(kind=kind, binders=binders, body=body):
            renames = {}
            new_binders = []
            for name, sort in binders:
                new = fresh()
                renames[name] = Var(new, sort)
                new_binders.append((new, sort))
            return Quant(kind, tuple(new_binders), rename_bound(substitute_many(body, renames), fresh))
        case _:
            children = e.children()
            if not children:
                return e
            return rebuild(e, tuple(rename_bound(child, fresh) for child in children))


def desugar_binders(e: Expression) -> Expression:
    """Split every multi-variable quantifier into nested single-variable ones."""

    def split(node: Expression) -> Expression:
        if isinstance(node, Quant) and len(node.binders) > 1:
            body = node.body
            for binder in reversed(node.binders):
                body = Quant(node.kind, (binder,), body)
            return body
        return node

    return transform(e, split)


def inline_synth_funs(e: Expression, definitions: Definitions) -> Expression:
    """Replace applications of defined functions by their instantiated bodies."""

    def expand(node: Expression) -> Expression:
        if isinstance(node, SynthApp) and node.fun in definitions:
            params, body = definitions[node.fun]
            return substitute_many(body, dict(zip(params, node.args, strict=True)))
        return node

    return transform(e, expand)


# simplification


_INT_FOLD: dict[Operator, Callable[[int, int], bool]] = {
    Operator.LE: lambda a, b: a <= b,
    Operator.LT: lambda a, b: a < b,
    Operator.GE: lambda a, b: a >= b,
    Operator.GT: lambda a, b: a > b,
    Operator.EQ: lambda a, b: a == b,
    Operator.NEQ: lambda a, b: a != b,
}

_REFLEXIVE = {
    Operator.LE: TRUE,
    Operator.GE: TRUE,
    Operator.EQ: TRUE,
    Operator.LT: FALSE,
    Operator.GT: FALSE,
    Operator.NEQ: FALSE,
}


def negate(e: Expression) -> Expression:
    """`not e` with constants folded and double negation removed."""
    if isinstance(e, BoolConst):
        return FALSE if e.value else TRUE
    if isinstance(e, Apply) and e.op is Operator.NOT:
        return e.args[0]
    return not_(e)


def _simplify_apply(node: Apply, args: tuple[Expression, ...]) -> Expression:
    op = node.op
    match op:
        case Operator.NOT:
            return negate(args[0])
        case Operator.AND:
            kept = []
            for arg in args:
                if arg == FALSE:
                    return FALSE
                if arg != TRUE:
                    kept.append(arg)
            return conjoin(kept)
        case Operator.OR:
            kept = []
            for arg in args:
                if arg == TRUE:
                    return TRUE
                if arg != FALSE:
                    kept.append(arg)
            return disjoin(kept)
        case Operator.IMPLIES:
            antecedent, consequent = args
            if antecedent == TRUE:
                return consequent
            if antecedent == FALSE or consequent == TRUE:
                return TRUE
            if consequent == FALSE:
                return negate(antecedent)
        case Operator.ITE:
            cond = args[0]
            if isinstance(cond, BoolConst):
                return args[1] if cond.value else args[2]
        case Operator.ADD:
            consts = [a.value for a in args if isinstance(a, IntConst)]
            if len(consts) > 1 or 0 in consts:
                others = [a for a in args if not isinstance(a, IntConst)]
                total = sum(consts)
                if not others:
                    return IntConst(total)
                if total != 0:
                    others.append(IntConst(total))
                return others[0] if len(others) == 1 else Apply(Operator.ADD, tuple(others))
        case Operator.SUB:
            values = [a.value for a in args if isinstance(a, IntConst)]
            if len(values) == len(args):
                return IntConst(values[0] - sum(values[1:]))
            rest = [a for a in args[1:] if a != IntConst(0)]
            if not rest:
                return args[0]
            args = (args[0], *rest)
        case Operator.MUL:
            left, right = args
            if isinstance(left, IntConst) and isinstance(right, IntConst):
                return IntConst(left.value * right.value)
            factor, other = (left, right) if isinstance(left, IntConst) else (right, left)
            if isinstance(factor, IntConst) and factor.value in {0, 1}:
                return other if factor.value == 1 else IntConst(0)
        case Operator.NEG:
            inner = args[0]
            if isinstance(inner, IntConst):
                return IntConst(-inner.value)
            if isinstance(inner, Apply) and inner.op is Operator.NEG:
                return inner.args[0]
        case Operator.LE | Operator.LT | Operator.GE | Operator.GT | Operator.EQ | Operator.NEQ:
            left, right = args
            if isinstance(left, IntConst) and isinstance(right, IntConst):
                return BoolConst(_INT_FOLD[op](left.value, right.value))
            if isinstance(left, BoolConst) and isinstance(right, BoolConst):
                return BoolConst(_INT_FOLD[op](left.value, right.value))
            if left == right:
                return _REFLEXIVE[op]
    return rebuild(node, args)


def simplify(e: Expression) -> Expression:
    """
    Constant folding, reflexive comparisons, identity elimination for the
    boolean connectives and double-negation removal. Idempotent.
    """
    match e:
        case Apply(args=args):
            return _simplify_apply(e, tuple(simplify(arg) for arg in args))
        case Quant(kind=kind, binders=binders, body=body):
            body = simplify(body)
            if isinstance(body, BoolConst):
                return body
            return Quant(kind, binders, body) if body is not e.body else e
        case _:
            children = e.children()
            if not children:
                return e
            return rebuild(e, tuple(simplify(child) for child in children))
