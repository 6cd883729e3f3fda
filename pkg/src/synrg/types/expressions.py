"""
Typed expression trees over integers, booleans and integer arrays.

Nodes are immutable and compare structurally, so they can be used as
dictionary keys and set members throughout the pipeline. Construction checks
sorts eagerly; an ill-sorted tree can never exist.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum

from ..utilities.exceptions import SortError, UnsupportedError


class Sort(StrEnum):
    BOOL = "Bool"
    INT = "Int"
    ARRAY = "(Array Int Int)"


class Operator(StrEnum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    NEG = "neg"
    LE = "<="
    LT = "<"
    GE = ">="
    GT = ">"
    EQ = "="
    NEQ = "distinct"
    AND = "and"
    OR = "or"
    NOT = "not"
    IMPLIES = "=>"
    ITE = "ite"


class QuantKind(StrEnum):
    FORALL = "forall"
    EXISTS = "exists"

    @property
    def dual(self) -> QuantKind:
        return QuantKind.EXISTS if self is QuantKind.FORALL else QuantKind.FORALL


ARITHMETIC = frozenset({Operator.ADD, Operator.SUB, Operator.MUL, Operator.NEG})
COMPARISONS = frozenset({Operator.LE, Operator.LT, Operator.GE, Operator.GT})
CONNECTIVES = frozenset({Operator.AND, Operator.OR, Operator.NOT, Operator.IMPLIES})
COMMUTATIVE = frozenset({Operator.ADD, Operator.AND, Operator.OR, Operator.EQ, Operator.NEQ})


class Expression:
    """Base class of every expression node."""

    __slots__ = ()

    @property
    def sort(self) -> Sort:
        raise NotImplementedError

    def children(self) -> tuple[Expression, ...]:
        return ()

    def __str__(self) -> str:
        return format_expression(self)


@dataclass(frozen=True, slots=True)
class IntConst(Expression):
    value: int

    @property
    def sort(self) -> Sort:
        return Sort.INT


@dataclass(frozen=True, slots=True)
class BoolConst(Expression):
    value: bool

    @property
    def sort(self) -> Sort:
        return Sort.BOOL


@dataclass(frozen=True, slots=True)
class Var(Expression):
    name: str
    var_sort: Sort

    @property
    def sort(self) -> Sort:
        return self.var_sort


@dataclass(frozen=True, slots=True)
class Apply(Expression):
    op: Operator
    args: tuple[Expression, ...]

    def __post_init__(self) -> None:
        _check_application(self.op, self.args)

    @property
    def sort(self) -> Sort:
        match self.op:
            case Operator.ADD | Operator.SUB | Operator.MUL | Operator.NEG:
                return Sort.INT
            case Operator.ITE:
                return self.args[1].sort
            case _:
                return Sort.BOOL

    def children(self) -> tuple[Expression, ...]:
        return self.args


@dataclass(frozen=True, slots=True)
class Select(Expression):
    array: Expression
    index: Expression

    def __post_init__(self) -> None:
        _expect(self.array, Sort.ARRAY, "select array")
        _expect(self.index, Sort.INT, "select index")

    @property
    def sort(self) -> Sort:
        return Sort.INT

    def children(self) -> tuple[Expression, ...]:
        return (self.array, self.index)


@dataclass(frozen=True, slots=True)
class Store(Expression):
    array: Expression
    index: Expression
    value: Expression

    def __post_init__(self) -> None:
        _expect(self.array, Sort.ARRAY, "store array")
        _expect(self.index, Sort.INT, "store index")
        _expect(self.value, Sort.INT, "store value")

    @property
    def sort(self) -> Sort:
        return Sort.ARRAY

    def children(self) -> tuple[Expression, ...]:
        return (self.array, self.index, self.value)


@dataclass(frozen=True, slots=True)
class Quant(Expression):
    kind: QuantKind
    binders: tuple[tuple[str, Sort], ...]
    body: Expression

    def __post_init__(self) -> None:
        if not self.binders:
            msg = f"{self.kind} needs at least one bound variable"
            raise SortError(msg)
        names = [name for name, _ in self.binders]
        if len(set(names)) != len(names):
            msg = f"duplicate bound variable in {self.kind}: {names}"
            raise SortError(msg)
        for name, sort in self.binders:
            if sort is not Sort.INT:
                msg = f"bound variable {name} must range over Int, got {sort}"
                raise SortError(msg)
        _expect(self.body, Sort.BOOL, f"{self.kind} body")

    @property
    def sort(self) -> Sort:
        return Sort.BOOL

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.binders)

    def children(self) -> tuple[Expression, ...]:
        return (self.body,)


@dataclass(frozen=True, slots=True)
class SynthApp(Expression):
    fun: str
    args: tuple[Expression, ...]
    return_sort: Sort

    @property
    def sort(self) -> Sort:
        return self.return_sort

    def children(self) -> tuple[Expression, ...]:
        return self.args


TRUE = BoolConst(value=True)
FALSE = BoolConst(value=False)
ZERO = IntConst(0)
ONE = IntConst(1)


def _expect(e: Expression, sort: Sort, where: str) -> None:
    if e.sort is not sort:
        msg = f"{where} must be {sort}, got {e.sort} in {e}"
        raise SortError(msg)


def _check_application(op: Operator, args: tuple[Expression, ...]) -> None:
    arity = len(args)
    match op:
        case Operator.ADD | Operator.SUB:
            if arity < 2:
                msg = f"{op} needs at least two operands"
                raise SortError(msg)
            for arg in args:
                _expect(arg, Sort.INT, f"operand of {op}")
        case Operator.MUL:
            if arity != 2:
                msg = "multiplication takes exactly two operands"
                raise SortError(msg)
            for arg in args:
                _expect(arg, Sort.INT, "operand of *")
            if not any(isinstance(arg, IntConst) for arg in args):
                msg = f"non-linear multiplication is not supported: {args[0]} * {args[1]}"
                raise UnsupportedError(msg)
        case Operator.NEG:
            if arity != 1:
                msg = "unary minus takes one operand"
                raise SortError(msg)
            _expect(args[0], Sort.INT, "operand of unary -")
        case Operator.LE | Operator.LT | Operator.GE | Operator.GT:
            if arity != 2:
                msg = f"{op} takes exactly two operands"
                raise SortError(msg)
            for arg in args:
                _expect(arg, Sort.INT, f"operand of {op}")
        case Operator.EQ | Operator.NEQ:
            if arity != 2:
                msg = f"{op} takes exactly two operands"
                raise SortError(msg)
            if args[0].sort is not args[1].sort:
                msg = f"{op} operands disagree: {args[0].sort} vs {args[1].sort}"
                raise SortError(msg)
            if args[0].sort is Sort.ARRAY:
                msg = "equality between arrays is not supported"
                raise SortError(msg)
        case Operator.AND | Operator.OR:
            if arity < 2:
                msg = f"{op} needs at least two operands"
                raise SortError(msg)
            for arg in args:
                _expect(arg, Sort.BOOL, f"operand of {op}")
        case Operator.NOT:
            if arity != 1:
                msg = "not takes one operand"
                raise SortError(msg)
            _expect(args[0], Sort.BOOL, "operand of not")
        case Operator.IMPLIES:
            if arity != 2:
                msg = "=> takes exactly two operands"
                raise SortError(msg)
            for arg in args:
                _expect(arg, Sort.BOOL, "operand of =>")
        case Operator.ITE:
            if arity != 3:
                msg = "ite takes exactly three operands"
                raise SortError(msg)
            _expect(args[0], Sort.BOOL, "ite condition")
            if args[1].sort is not args[2].sort or args[1].sort is Sort.ARRAY:
                msg = f"ite branches must share a scalar sort: {args[1].sort} vs {args[2].sort}"
                raise SortError(msg)


# constructors


def int_var(name: str) -> Var:
    return Var(name, Sort.INT)


def bool_var(name: str) -> Var:
    return Var(name, Sort.BOOL)


def array_var(name: str) -> Var:
    return Var(name, Sort.ARRAY)


def const(value: int | bool) -> Expression:
    if isinstance(value, bool):
        return TRUE if value else FALSE
    return IntConst(value)


def add(*args: Expression) -> Apply:
    return Apply(Operator.ADD, args)


def sub(*args: Expression) -> Apply:
    return Apply(Operator.SUB, args)


def mul(left: Expression, right: Expression) -> Apply:
    return Apply(Operator.MUL, (left, right))


def neg(arg: Expression) -> Apply:
    return Apply(Operator.NEG, (arg,))


def le(left: Expression, right: Expression) -> Apply:
    return Apply(Operator.LE, (left, right))


def lt(left: Expression, right: Expression) -> Apply:
    return Apply(Operator.LT, (left, right))


def ge(left: Expression, right: Expression) -> Apply:
    return Apply(Operator.GE, (left, right))


def gt(left: Expression, right: Expression) -> Apply:
    return Apply(Operator.GT, (left, right))


def eq(left: Expression, right: Expression) -> Apply:
    return Apply(Operator.EQ, (left, right))


def neq(left: Expression, right: Expression) -> Apply:
    return Apply(Operator.NEQ, (left, right))


def and_(*args: Expression) -> Apply:
    return Apply(Operator.AND, args)


def or_(*args: Expression) -> Apply:
    return Apply(Operator.OR, args)


def not_(arg: Expression) -> Apply:
    return Apply(Operator.NOT, (arg,))


def implies(antecedent: Expression, consequent: Expression) -> Apply:
    return Apply(Operator.IMPLIES, (antecedent, consequent))


def ite(cond: Expression, then: Expression, otherwise: Expression) -> Apply:
    return Apply(Operator.ITE, (cond, then, otherwise))


def select(array: Expression, index: Expression | int) -> Select:
    return Select(array, IntConst(index) if isinstance(index, int) else index)


def store(array: Expression, index: Expression, value: Expression) -> Store:
    return Store(array, index, value)


def forall(names: str | Sequence[str], body: Expression) -> Quant:
    return Quant(QuantKind.FORALL, _binders(names), body)


def exists(names: str | Sequence[str], body: Expression) -> Quant:
    return Quant(QuantKind.EXISTS, _binders(names), body)


def _binders(names: str | Sequence[str]) -> tuple[tuple[str, Sort], ...]:
    if isinstance(names, str):
        names = [names]
    return tuple((name, Sort.INT) for name in names)


def offset(base: Expression, amount: int) -> Expression:
    """`base + amount`, written as a subtraction for negative amounts and as `base` for zero."""
    if amount == 0:
        return base
    if amount > 0:
        return add(base, IntConst(amount))
    return sub(base, IntConst(-amount))


def conjoin(items: Iterable[Expression]) -> Expression:
    items = list(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return Apply(Operator.AND, tuple(items))


def disjoin(items: Iterable[Expression]) -> Expression:
    items = list(items)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Apply(Operator.OR, tuple(items))


# printing


def format_sort(sort: Sort) -> str:
    return sort.value


def format_expression(e: Expression) -> str:
    """Render `e` as an SMT-LIB s-expression."""
    match e:
        case IntConst(value=value):
            return str(value) if value >= 0 else f"(- {-value})"
        case BoolConst(value=value):
            return "true" if value else "false"
        case Var(name=name):
            return name
        case Apply(op=Operator.NEG, args=args):
            return f"(- {format_expression(args[0])})"
        case Apply(op=op, args=args):
            return f"({op.value} {' '.join(format_expression(a) for a in args)})"
        case Select(array=array, index=index):
            return f"(select {format_expression(array)} {format_expression(index)})"
        case Store(array=array, index=index, value=value):
            return f"(store {format_expression(array)} {format_expression(index)} {format_expression(value)})"
        case Quant(kind=kind, binders=binders, body=body):
            bound = " ".join(f"({name} {format_sort(sort)})" for name, sort in binders)
            return f"({kind.value} ({bound}) {format_expression(body)})"
        case SynthApp(fun=fun, args=args):
            if not args:
                return fun
            return f"({fun} {' '.join(format_expression(a) for a in args)})"
    msg = f"unknown expression node {type(e).__name__}"
    raise TypeError(msg)
