from ..types.expressions import (
    ONE,
    ZERO,
    Apply,
    Expression,
    Operator,
    Quant,
    QuantKind,
    Sort,
    Var,
    and_,
    eq,
    ge,
    implies,
    le,
    lt,
    not_,
    or_,
    select,
)
from ..types.problem_types import Grammar, SynthFun
from .exceptions import UnsupportedError
from .expressions import flatten, iter_subterms


def _symbol(base: str, taken: set[str]) -> str:
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def _nonterminals(fn: SynthFun, *, avoid: set[str] | None = None) -> tuple[Var, Var]:
    taken = set(fn.param_names) | (avoid or set())
    return Var(_symbol("B", taken), Sort.BOOL), Var(_symbol("I", taken), Sort.INT)


def _int_productions(fn: SynthFun, i: Var) -> list[Expression]:
    return [
        ZERO,
        ONE,
        *(Var(name, sort) for name, sort in fn.params if sort is Sort.INT),
        Apply(Operator.SUB, (i, i)),
        Apply(Operator.ADD, (i, i)),
    ]


def _grammar(fn: SynthFun, b_nt: Var, i_nt: Var, bool_rules: list[Expression], int_rules: list[Expression]) -> Grammar:
    if fn.return_sort is Sort.BOOL:
        return Grammar(
            nonterminals=((b_nt.name, Sort.BOOL), (i_nt.name, Sort.INT)),
            start=b_nt.name,
            productions={b_nt.name: tuple(dict.fromkeys(bool_rules)), i_nt.name: tuple(dict.fromkeys(int_rules))},
        )
    return Grammar(
        nonterminals=((i_nt.name, Sort.INT),),
        start=i_nt.name,
        productions={i_nt.name: tuple(dict.fromkeys(int_rules))},
    )


def build_template_grammar(fn: SynthFun, b: int) -> Grammar:
    """
    Template grammar for bounded synthesis: Boolean combinations of
    comparisons over small linear terms, the scalar parameters and every
    array parameter read at `0..b-1`.
    """
    if fn.return_sort is Sort.ARRAY:
        msg = f"no template grammar for {fn.name}: array-valued functions are not supported"
        raise UnsupportedError(msg)
    b_nt, i_nt = _nonterminals(fn)
    bools = [
        and_(b_nt, b_nt),
        or_(b_nt, b_nt),
        not_(b_nt),
        ge(i_nt, i_nt),
        le(i_nt, i_nt),
        eq(i_nt, i_nt),
        *(Var(name, sort) for name, sort in fn.params if sort is Sort.BOOL),
    ]
    ints = _int_productions(fn, i_nt)
    for name, sort in fn.params:
        if sort is Sort.ARRAY:
            ints.extend(select(Var(name, sort), k) for k in range(b))
    return _grammar(fn, b_nt, i_nt, bools, ints)


def _predicates(candidate: Expression) -> list[Expression]:
    """Maximal quantified or atomic predicates below the conjunctions and disjunctions."""
    if isinstance(candidate, Apply) and candidate.op in {Operator.AND, Operator.OR}:
        return [p for operand in flatten(candidate.op, candidate) for p in _predicates(operand)]
    return [candidate]


def _range_restricted(q: Quant, i_nt: Var) -> Expression:
    (name, sort), *rest = q.binders
    body = Quant(q.kind, tuple(rest), q.body) if rest else q.body
    v = Var(name, sort)
    bounds = and_(le(i_nt, v), lt(v, i_nt))
    guarded = implies(bounds, body) if q.kind is QuantKind.FORALL else and_(bounds, body)
    return Quant(q.kind, ((name, sort),), guarded)


def build_generalization_grammar(candidate: Expression, fn: SynthFun) -> Grammar:
    """
    Grammar for synthesis-based generalization: the building blocks of the
    syntactically generalized candidate, plus a range-restricted copy of each
    of its quantified predicates whose bounds are left to the search.
    """
    avoid = {n.name for n in iter_subterms(candidate) if isinstance(n, Var)}
    avoid |= {name for n in iter_subterms(candidate) if isinstance(n, Quant) for name in n.names}
    b_nt, i_nt = _nonterminals(fn, avoid=avoid)
    bools: list[Expression] = [
        and_(b_nt, b_nt),
        or_(b_nt, b_nt),
        ge(i_nt, i_nt),
        le(i_nt, i_nt),
        eq(i_nt, i_nt),
    ]
    ints = _int_productions(fn, i_nt)
    if candidate.sort is Sort.BOOL:
        predicates = _predicates(candidate)
        bools.extend(predicates)
        bools.extend(_range_restricted(p, i_nt) for p in predicates if isinstance(p, Quant))
    else:
        ints.append(candidate)
    return _grammar(fn, b_nt, i_nt, bools, ints)
