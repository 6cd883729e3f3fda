import logging
from collections.abc import Mapping, Sequence

from ...types.expressions import Sort, Var
from ...types.problem_types import SynthFun
from ...types.solver_types import ArrayValue, FunctionDefinition, ParsedReply
from ..exceptions import InputError, ParseError
from ..expressions import substitute_many
from .parser import Atom, SExpr, SList, TermReader, parse_sort, read_sexprs, render

logger = logging.getLogger(__name__)

_UNSAT = {"unsat", "infeasible"}
_UNKNOWN = {"unknown", "fail", "timeout"}


class _MalformedReplyError(Exception):
    pass


def _integer(node: SExpr) -> int:
    match node:
        case Atom(text=text) if text.lstrip("-").isdigit():
            return int(text)
        case SList(items=(Atom(text="-"), Atom(text=text))) if text.isdigit():
            return -int(text)
    msg = f"expected an integer, got {render(node)}"
    raise _MalformedReplyError(msg)


def _array(node: SExpr) -> ArrayValue:
    match node:
        case SList(items=(SList(items=(Atom(text="as"), Atom(text="const"), _)), default)):
            return ArrayValue(default=_integer(default))
        case SList(items=(Atom(text="store"), inner, index, value)):
            return _array(inner).write(_integer(index), _integer(value))
        case SList(items=(Atom(text="_"), Atom(text="as-array"), *_)):
            msg = "array given as an opaque as-array function reference"
            raise _MalformedReplyError(msg)
    msg = f"unsupported array value {render(node)}"
    raise _MalformedReplyError(msg)


def _value(node: SExpr, sort: Sort) -> int | bool | ArrayValue:
    match sort:
        case Sort.INT:
            return _integer(node)
        case Sort.BOOL:
            if isinstance(node, Atom) and node.text in {"true", "false"}:
                return node.text == "true"
            msg = f"expected a Boolean, got {render(node)}"
            raise _MalformedReplyError(msg)
        case Sort.ARRAY:
            return _array(node)


def _define_funs(nodes: Sequence[SExpr]) -> list[SList]:
    """Unwrap the different ways solvers bracket their define-fun lists."""
    found = []
    for node in nodes:
        match node:
            case SList(items=(Atom(text="define-fun"), *_)):
                found.append(node)
            case SList(items=(Atom(text="model"), *inner)) | SList(items=inner):
                found.extend(_define_funs(inner))
            case _:
                msg = f"unexpected reply fragment {render(node)}"
                raise _MalformedReplyError(msg)
    return found


def _definition(node: SList, expected: Mapping[str, SynthFun]) -> FunctionDefinition:
    match node.items:
        case (_, Atom(text=name), SList() as params_node, sort_node, body_node):
            pass
        case _:
            msg = f"malformed define-fun {render(node)}"
            raise _MalformedReplyError(msg)
    if name not in expected:
        msg = f"definition of unexpected function {name}"
        raise _MalformedReplyError(msg)
    fn = expected[name]
    params = []
    for item in params_node.items:
        match item:
            case SList(items=(Atom(text=param), param_sort)):
                params.append((param, parse_sort(param_sort)))
            case _:
                msg = f"malformed parameter {render(item)}"
                raise _MalformedReplyError(msg)
    if tuple(sort for _, sort in params) != tuple(sort for _, sort in fn.params) or parse_sort(sort_node) is not fn.return_sort:
        msg = f"definition of {name} does not match its declared signature"
        raise _MalformedReplyError(msg)
    body = TermReader(dict(params)).term(body_node)
    if body.sort is not fn.return_sort:
        msg = f"body of {name} has sort {body.sort}, expected {fn.return_sort}"
        raise _MalformedReplyError(msg)
    renames = {given: Var(declared, sort) for (given, sort), (declared, _) in zip(params, fn.params, strict=True) if given != declared}
    return FunctionDefinition(name=name, params=fn.params, return_sort=fn.return_sort, body=substitute_many(body, renames))


def _model(nodes: Sequence[SExpr], declared: Mapping[str, Sort]) -> dict[str, int | bool | ArrayValue]:
    model: dict[str, int | bool | ArrayValue] = {}
    for node in _define_funs(nodes):
        match node.items:
            case (_, Atom(text=name), SList(items=()), _, value) if name in declared:
                model[name] = _value(value, declared[name])
            case _:
                logger.debug("skipping auxiliary model entry %s", render(node)[:80])
    return model


def parse_reply(
    text: str,
    synth_funs: Sequence[SynthFun] = (),
    declared: Mapping[str, Sort] | None = None,
) -> ParsedReply:
    """Classify a solver's answer. Never raises; unreadable answers come back as malformed."""
    try:
        nodes = read_sexprs(text)
        if not nodes:
            return ParsedReply(kind="malformed", raw=text, reason="empty reply")
        first = nodes[0]
        if isinstance(first, Atom):
            if first.text in _UNSAT:
                return ParsedReply(kind="unsat", raw=text)
            if first.text in _UNKNOWN:
                return ParsedReply(kind="unknown", raw=text)
            if first.text == "sat":
                return ParsedReply(kind="sat", model=_model(nodes[1:], declared or {}), raw=text)
            return ParsedReply(kind="malformed", raw=text, reason=f"unexpected answer {first.text}")
        expected = {fn.name: fn for fn in synth_funs}
        definitions = tuple(_definition(node, expected) for node in _define_funs(nodes))
        if not definitions:
            return ParsedReply(kind="malformed", raw=text, reason="no definitions in reply")
        missing = set(expected) - {d.name for d in definitions}
        if missing:
            return ParsedReply(kind="malformed", raw=text, reason=f"no definition for {sorted(missing)}")
        return ParsedReply(kind="define_funs", definitions=definitions, raw=text)
    except (_MalformedReplyError, ParseError, InputError) as e:
        return ParsedReply(kind="malformed", raw=text, reason=str(e))
