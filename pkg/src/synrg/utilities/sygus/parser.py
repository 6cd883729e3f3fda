"""
SyGuS-IF reader.

Text is first read into position-tagged s-expressions with pyparsing, then
converted to typed problems. Every error carries the line and column of the
offending s-expression.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass

import pyparsing as pp

from ...types.expressions import (
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
)
from ...types.problem_types import Grammar, Problem, SynthFun
from ..constants import DEFAULT_SYGUS_LOGIC, FRESH_PREFIX
from ..exceptions import ParseError, SortError, UnsupportedError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Atom:
    text: str
    line: int
    column: int


@dataclass(frozen=True, slots=True)
class SList:
    items: tuple["SExpr", ...]
    line: int
    column: int


type SExpr = Atom | SList


def _make_atom(s: str, loc: int, toks: pp.ParseResults) -> Atom:
    return Atom(toks[0], pp.lineno(loc, s), pp.col(loc, s))


def _make_list(s: str, loc: int, toks: pp.ParseResults) -> SList:
    return SList(tuple(toks[1]), pp.lineno(loc, s), pp.col(loc, s))


def _build_reader() -> pp.ParserElement:
    sexpr = pp.Forward()
    symbol_chars = pp.alphanums + "~!@$%^&*_-+=<>.?/:'"
    symbol = pp.Word(symbol_chars) | pp.Regex(r"\|[^|]*\|")
    string = pp.QuotedString('"', unquote_results=False)
    atom = (string | symbol).set_parse_action(_make_atom)
    slist = (pp.Literal("(") + pp.Group(pp.ZeroOrMore(sexpr)) + pp.Suppress(")")).set_parse_action(_make_list)
    sexpr <<= atom | slist
    document = pp.ZeroOrMore(sexpr)
    document.ignore(pp.Suppress(";" + pp.rest_of_line))
    return document


_READER = _build_reader()


def read_sexprs(text: str) -> list[SExpr]:
    try:
        return list(_READER.parse_string(text, parse_all=True))
    except pp.ParseBaseException as e:
        msg = f"malformed s-expression: {e.msg}"
        raise ParseError(msg, e.lineno, e.col) from e


def _fail(node: SExpr, message: str) -> ParseError:
    return ParseError(message, node.line, node.column)


def _unsupported(node: SExpr, message: str) -> UnsupportedError:
    return UnsupportedError(f"{message} (line {node.line}, column {node.column})")


def _is_numeral(text: str) -> bool:
    return text.isdigit() or (text.startswith("-") and text[1:].isdigit())


_OPERATORS = {
    "+": Operator.ADD,
    "*": Operator.MUL,
    "<=": Operator.LE,
    "<": Operator.LT,
    ">=": Operator.GE,
    ">": Operator.GT,
    "=": Operator.EQ,
    "distinct": Operator.NEQ,
    "and": Operator.AND,
    "or": Operator.OR,
    "not": Operator.NOT,
    "ite": Operator.ITE,
}


def parse_sort(node: SExpr) -> Sort:
    match node:
        case Atom(text="Int"):
            return Sort.INT
        case Atom(text="Bool"):
            return Sort.BOOL
        case SList(items=(Atom(text="Array"), Atom(text="Int"), Atom(text="Int"))):
            return Sort.ARRAY
    raise _unsupported(node, f"unsupported sort {render(node)}")


def render(node: SExpr) -> str:
    if isinstance(node, Atom):
        return node.text
    return "(" + " ".join(render(item) for item in node.items) + ")"


class TermReader:
    """Converts s-expressions to typed terms within a symbol scope."""

    def __init__(
        self,
        variables: Mapping[str, Sort],
        functions: Mapping[str, SynthFun] | None = None,
        *,
        reserved_prefix: str | None = None,
    ) -> None:
        self.variables = dict(variables)
        self.functions = dict(functions or {})
        self.reserved_prefix = reserved_prefix

    def check_symbol(self, node: Atom) -> str:
        if self.reserved_prefix and node.text.startswith(self.reserved_prefix):
            raise _fail(node, f"symbol {node.text} uses the reserved prefix {self.reserved_prefix}")
        return node.text

    def term(self, node: SExpr, bound: Mapping[str, Sort] | None = None) -> Expression:
        bound = bound or {}
        try:
            return self._term(node, bound)
        except SortError as e:
            raise _fail(node, f"ill-sorted term: {e}") from e

    def _term(self, node: SExpr, bound: Mapping[str, Sort]) -> Expression:
        if isinstance(node, Atom):
            return self._atom(node, bound)
        if not node.items:
            raise _fail(node, "empty application")
        head, *rest = node.items
        if isinstance(head, SList):
            raise _fail(head, "application head must be a symbol")
        name = head.text
        if name in {"forall", "exists"}:
            return self._quantifier(node, QuantKind(name), rest, bound)
        if name in {"let", "lambda", "!", "_", "as"}:
            raise _unsupported(node, f"unsupported construct {name}")
        args = [self._term(arg, bound) for arg in rest]
        if name == "-":
            if len(args) == 1:
                if isinstance(args[0], IntConst) and isinstance(rest[0], Atom):
                    return IntConst(-args[0].value)
                return Apply(Operator.NEG, (args[0],))
            return Apply(Operator.SUB, tuple(args))
        if name == "=>":
            if len(args) < 2:
                raise _fail(node, "=> needs two operands")
            result = args[-1]
            for antecedent in reversed(args[:-1]):
                result = Apply(Operator.IMPLIES, (antecedent, result))
            return result
        if name == "select":
            if len(args) != 2:
                raise _fail(node, "select takes two operands")
            return Select(args[0], args[1])
        if name == "store":
            if len(args) != 3:
                raise _fail(node, "store takes three operands")
            return Store(args[0], args[1], args[2])
        if name in _OPERATORS:
            return Apply(_OPERATORS[name], tuple(args))
        if name in {"div", "mod", "abs", "/"}:
            raise _unsupported(node, f"unsupported operator {name}")
        if name in self.functions:
            fn = self.functions[name]
            if len(args) != len(fn.params):
                raise _fail(node, f"{name} expects {len(fn.params)} arguments, got {len(args)}")
            return SynthApp(name, tuple(args), fn.return_sort)
        raise _fail(head, f"unknown function {name}")

    def _atom(self, node: Atom, bound: Mapping[str, Sort]) -> Expression:
        text = node.text
        if _is_numeral(text):
            return IntConst(int(text))
        if text in {"true", "false"}:
            return BoolConst(value=text == "true")
        if text in bound:
            return Var(text, bound[text])
        if text in self.variables:
            return Var(text, self.variables[text])
        fn = self.functions.get(text)
        if fn is not None and not fn.params:
            return SynthApp(text, (), fn.return_sort)
        raise _fail(node, f"unknown symbol {text}")

    def _quantifier(self, node: SList, kind: QuantKind, rest: list[SExpr], bound: Mapping[str, Sort]) -> Expression:
        if len(rest) != 2 or not isinstance(rest[0], SList) or not rest[0].items:
            raise _fail(node, f"malformed {kind} binder list")
        binders = []
        for binder in rest[0].items:
            match binder:
                case SList(items=(Atom() as var, sort_node)):
                    binders.append((self.check_symbol(var), parse_sort(sort_node)))
                case _:
                    raise _fail(binder, "malformed binder")
        body = self._term(rest[1], dict(bound) | dict(binders))
        return Quant(kind, tuple(binders), body)


def parse_term(text: str, variables: Mapping[str, Sort], functions: Mapping[str, SynthFun] | None = None) -> Expression:
    """Parse a single term, e.g. an expected candidate body, in a given scope."""
    nodes = read_sexprs(text)
    if len(nodes) != 1:
        msg = f"expected exactly one term, found {len(nodes)}"
        raise ParseError(msg, 1, 1)
    return TermReader(variables, functions).term(nodes[0])


def _parse_params(node: SExpr, reader: TermReader) -> tuple[tuple[str, Sort], ...]:
    if not isinstance(node, SList):
        raise _fail(node, "expected a parameter list")
    params = []
    for item in node.items:
        match item:
            case SList(items=(Atom() as name, sort_node)):
                params.append((reader.check_symbol(name), parse_sort(sort_node)))
            case _:
                raise _fail(item, "malformed parameter")
    return tuple(params)


def _parse_grammar(
    name: str, params: tuple[tuple[str, Sort], ...], declarations: SExpr, rules: SExpr, reader: TermReader
) -> Grammar:
    if not isinstance(declarations, SList) or not isinstance(rules, SList):
        raise _fail(declarations, f"malformed grammar for {name}")
    nonterminals = tuple(_parse_params(declarations, reader))
    if not nonterminals:
        raise _fail(declarations, f"grammar for {name} declares no nonterminals")
    scope = dict(params) | dict(nonterminals)
    productions: dict[str, tuple[Expression, ...]] = {}
    term_reader = TermReader(scope, {}, reserved_prefix=reader.reserved_prefix)
    for rule in rules.items:
        match rule:
            case SList(items=(Atom() as nt, sort_node, SList(items=alternatives))):
                if dict(nonterminals).get(nt.text) is not parse_sort(sort_node):
                    raise _fail(rule, f"rule for undeclared nonterminal {nt.text}")
                terms = []
                for alternative in alternatives:
                    if isinstance(alternative, SList) and alternative.items and render(alternative.items[0]) in {"Constant", "Variable"}:
                        raise _unsupported(alternative, f"{render(alternative.items[0])} productions are not supported")
                    terms.append(term_reader.term(alternative))
                productions[nt.text] = tuple(terms)
            case _:
                raise _fail(rule, "malformed grammar rule")
    try:
        return Grammar(nonterminals=nonterminals, start=nonterminals[0][0], productions=productions)
    except ValueError as e:
        raise _fail(declarations, f"invalid grammar for {name}: {e}") from e


def parse_problem(text: str) -> Problem:
    """Parse a SyGuS-IF problem."""
    logic = DEFAULT_SYGUS_LOGIC
    declared: list[tuple[str, Sort]] = []
    synth_funs: list[SynthFun] = []
    constraint_nodes: list[SExpr] = []
    names = TermReader({}, reserved_prefix=FRESH_PREFIX)

    for command in read_sexprs(text):
        if not isinstance(command, SList) or not command.items or not isinstance(command.items[0], Atom):
            raise _fail(command, "expected a command")
        head, *rest = command.items
        match head.text, rest:
            case "set-logic", [Atom(text=name)]:
                logic = name
            case "declare-var", [Atom() as var, sort_node]:
                declared.append((names.check_symbol(var), parse_sort(sort_node)))
            case "synth-fun", [Atom() as fun, params_node, sort_node, *grammar_nodes]:
                params = _parse_params(params_node, names)
                return_sort = parse_sort(sort_node)
                if return_sort is Sort.ARRAY:
                    raise _unsupported(sort_node, f"synth-fun {fun.text} returns an array")
                grammar = None
                if len(grammar_nodes) == 2:
                    grammar = _parse_grammar(fun.text, params, grammar_nodes[0], grammar_nodes[1], names)
                elif grammar_nodes:
                    raise _fail(command, "synth-fun grammar must be a declaration list and a rule list")
                try:
                    synth_funs.append(
                        SynthFun(name=names.check_symbol(fun), params=params, return_sort=return_sort, grammar=grammar)
                    )
                except ValueError as e:
                    raise _fail(command, str(e)) from e
            case "constraint", [body]:
                constraint_nodes.append(body)
            case "check-synth", []:
                pass
            case ("set-option" | "set-info"), _:
                logger.debug("ignoring %s at line %s", head.text, head.line)
            case _:
                raise _fail(command, f"unknown or malformed command {head.text}")

    reader = TermReader(dict(declared), {fn.name: fn for fn in synth_funs}, reserved_prefix=FRESH_PREFIX)
    constraints = []
    for node in constraint_nodes:
        constraint = reader.term(node)
        if constraint.sort is not Sort.BOOL:
            raise _fail(node, "constraint is not Boolean")
        constraints.append(constraint)
    try:
        return Problem(
            logic=logic,
            declared_vars=tuple(declared),
            synth_funs=tuple(synth_funs),
            constraints=tuple(constraints),
        )
    except ValueError as e:
        msg = f"inconsistent problem: {e}"
        raise ParseError(msg, 1, 1) from e
