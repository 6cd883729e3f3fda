"""
Concrete evaluation of expressions over finite array models.

Arrays are total maps with a default value; quantifiers range over the
evaluation domain, the index range `[0, length)` of the arrays being modelled.
Expressions are compiled once to closures and then run against many
valuations, which is what the enumerator and the finite oracle need.
"""

import itertools
import logging
import random
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from math import prod

from ..types.expressions import (
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
from ..types.solver_types import ArrayValue, FiniteCheckResult, Value, Valuation
from .constants import COUNTEREXAMPLE_SAMPLES, FINITE_CHECK_CEILING, SAMPLE_SEED
from .exceptions import OracleTooLargeError
from .expressions import free_variables

logger = logging.getLogger(__name__)

type Compiled = Callable[[Valuation], Value]
type Interpretation = Callable[[tuple[Value, ...]], Value]

_MISSING = object()


def _fold_args(op: Operator, fns: list[Compiled]) -> Compiled:
    match op, fns:
        case Operator.ADD, [a, b]:
            return lambda env: a(env) + b(env)  # type: ignore[operator]
        case Operator.ADD, _:
            return lambda env: sum(f(env) for f in fns)  # type: ignore[misc]
        case Operator.SUB, [a, b]:
            return lambda env: a(env) - b(env)  # type: ignore[operator]
        case Operator.SUB, [a, *rest]:
            return lambda env: a(env) - sum(f(env) for f in rest)  # type: ignore[operator,misc]
        case Operator.MUL, [a, b]:
            return lambda env: a(env) * b(env)  # type: ignore[operator]
        case Operator.NEG, [a]:
            return lambda env: -a(env)  # type: ignore[operator]
        case Operator.LE, [a, b]:
            return lambda env: a(env) <= b(env)  # type: ignore[operator]
        case Operator.LT, [a, b]:
            return lambda env: a(env) < b(env)  # type: ignore[operator]
        case Operator.GE, [a, b]:
            return lambda env: a(env) >= b(env)  # type: ignore[operator]
        case Operator.GT, [a, b]:
            return lambda env: a(env) > b(env)  # type: ignore[operator]
        case Operator.EQ, [a, b]:
            return lambda env: a(env) == b(env)
        case Operator.NEQ, [a, b]:
            return lambda env: a(env) != b(env)
        case Operator.NOT, [a]:
            return lambda env: not a(env)
        case Operator.IMPLIES, [a, b]:
            return lambda env: (not a(env)) or b(env)
        case Operator.AND, _:
            return lambda env: all(f(env) for f in fns)
        case Operator.OR, _:
            return lambda env: any(f(env) for f in fns)
        case Operator.ITE, [c, a, b]:
            return lambda env: a(env) if c(env) else b(env)
    msg = f"cannot evaluate {op} with {len(fns)} operands"
    raise ValueError(msg)


def _quantifier(kind: QuantKind, names: tuple[str, ...], body: Compiled, domain: Sequence[int]) -> Compiled:
    want = kind is QuantKind.EXISTS

    def run(env: Valuation) -> bool:
        saved = [env.get(name, _MISSING) for name in names]
        try:
            for values in itertools.product(domain, repeat=len(names)):
                env.update(zip(names, values, strict=True))
                if bool(body(env)) is want:
                    return want
            return not want
        finally:
            for name, old in zip(names, saved, strict=True):
                if old is _MISSING:
                    env.pop(name, None)
                else:
                    env[name] = old  # type: ignore[assignment]

    return run


def compile_expression(
    e: Expression,
    domain: Sequence[int],
    functions: Mapping[str, Interpretation] | None = None,
) -> Compiled:
    """Compile `e` to a function of a valuation. Quantifiers range over `domain`."""
    functions = functions or {}

    def build(node: Expression) -> Compiled:
        match node:
            case IntConst(value=value) | BoolConst(value=value):
                return lambda _env: value
            case Var(name=name):
                return lambda env: env[name]
            case Apply(op=op, args=args):
                return _fold_args(op, [build(arg) for arg in args])
            case Select(array=array, index=index):
                a, i = build(array), build(index)
                return lambda env: a(env).read(i(env))  # type: ignore[union-attr]
            case Store(array=array, index=index, value=value):
                a, i, v = build(array), build(index), build(value)
                return lambda env: a(env).write(i(env), v(env))  # type: ignore[union-attr]
            case Quant(kind=kind, binders=binders, body=body):
                return _quantifier(kind, tuple(name for name, _ in binders), build(body), domain)
            case SynthApp(fun=fun, args=args):
                if fun not in functions:
                    msg = f"no interpretation for function {fun}"
                    raise KeyError(msg)
                fn = functions[fun]
                arg_fns = [build(arg) for arg in args]
                return lambda env: fn(tuple(f(env) for f in arg_fns))
        msg = f"cannot compile {type(node).__name__}"
        raise TypeError(msg)

    return build(e)


def evaluate(
    e: Expression,
    env: Valuation,
    domain: Sequence[int],
    functions: Mapping[str, Interpretation] | None = None,
) -> Value:
    return compile_expression(e, domain, functions)(dict(env))


def interpretation(params: Sequence[str], body: Expression, domain: Sequence[int]) -> Interpretation:
    """A callable model of a function defined by `body` over `params`."""
    compiled = compile_expression(body, domain)
    names = tuple(params)
    return lambda args: compiled(dict(zip(names, args, strict=True)))


def interpretations(
    definitions: Mapping[str, tuple[tuple[str, ...], Expression]], domain: Sequence[int]
) -> dict[str, Interpretation]:
    return {name: interpretation(params, body, domain) for name, (params, body) in definitions.items()}


def _sort_values(sort: Sort, window: Sequence[int], array_len: int) -> list[Value]:
    match sort:
        case Sort.BOOL:
            return [False, True]
        case Sort.INT:
            return list(window)
        case Sort.ARRAY:
            return [ArrayValue.from_list(cells) for cells in itertools.product(window, repeat=array_len)]


def valuation_space_size(variables: Sequence[tuple[str, Sort]], array_len: int, window: tuple[int, int]) -> int:
    width = window[1] - window[0] + 1
    sizes = {Sort.BOOL: 2, Sort.INT: width, Sort.ARRAY: width**array_len}
    return prod(sizes[sort] for _, sort in variables)


def valuations(
    variables: Sequence[tuple[str, Sort]], array_len: int, window: tuple[int, int]
) -> Iterator[Valuation]:
    """Every valuation of `variables`, arrays of length `array_len`, scalars in `window`."""
    values = range(window[0], window[1] + 1)
    names = [name for name, _ in variables]
    pools = [_sort_values(sort, values, array_len) for _, sort in variables]
    for combo in itertools.product(*pools):
        yield dict(zip(names, combo, strict=True))


def sample_valuations(
    variables: Sequence[tuple[str, Sort]],
    array_len: int,
    window: tuple[int, int],
    count: int,
    seed: int,
) -> list[Valuation]:
    """Seeded random valuations; arrays get a random default as well as random cells."""
    rng = random.Random(seed)
    lo, hi = window
    samples = []
    for _ in range(count):
        env: Valuation = {}
        for name, sort in variables:
            match sort:
                case Sort.BOOL:
                    env[name] = rng.random() < 0.5
                case Sort.INT:
                    env[name] = rng.randint(lo, hi)
                case Sort.ARRAY:
                    cells = [rng.randint(lo, hi) for _ in range(array_len)]
                    env[name] = ArrayValue.from_list(cells, default=rng.randint(lo, hi))
        samples.append(env)
    return samples


def finite_check(
    e: Expression,
    array_len: int,
    window: tuple[int, int] = (-2, 2),
    functions: Mapping[str, Interpretation] | None = None,
    ceiling: int = FINITE_CHECK_CEILING,
) -> FiniteCheckResult:
    """Exhaustively look for a valuation satisfying `e`."""
    variables = sorted(free_variables(e))
    space = valuation_space_size(variables, array_len, window)
    if space > ceiling:
        msg = f"valuation space of {space} exceeds the ceiling of {ceiling}"
        raise OracleTooLargeError(msg)
    compiled = compile_expression(e, range(array_len), functions)
    explored = 0
    for env in valuations(variables, array_len, window):
        explored += 1
        if compiled(env):
            return FiniteCheckResult(status="sat", witness=env, explored=explored)
    logger.debug("finite check exhausted %s valuations", explored)
    return FiniteCheckResult(status="unsat_within_window", explored=explored)


def _shrink(window: tuple[int, int], radius: int) -> tuple[int, int]:
    return max(window[0], -radius), min(window[1], radius)


def find_counterexample(
    formula: Expression,
    variables: Sequence[tuple[str, Sort]],
    array_len: int,
    window: tuple[int, int],
    *,
    ceiling: int = FINITE_CHECK_CEILING,
    samples: int = COUNTEREXAMPLE_SAMPLES,
    seed: int = SAMPLE_SEED,
) -> Valuation | None:
    """
    A valuation falsifying `formula`, arrays of length `array_len`.

    The search is exhaustive over `window` when the space fits under the
    ceiling; otherwise the window is narrowed toward `[-1, 1]`, and when even
    that is too large a seeded random sample is tried instead.
    """
    compiled = compile_expression(formula, range(array_len))
    radius = max(abs(window[0]), abs(window[1]))
    current = window
    while valuation_space_size(variables, array_len, current) > ceiling and radius > 1:
        radius -= 1
        current = _shrink(window, radius)
    if valuation_space_size(variables, array_len, current) <= ceiling:
        candidates: Iterable[Valuation] = valuations(variables, array_len, current)
    else:
        logger.debug("valuation space too large, sampling %s valuations", samples)
        candidates = sample_valuations(variables, array_len, window, samples, seed)
    for env in candidates:
        if not compiled(env):
            return env
    return None
