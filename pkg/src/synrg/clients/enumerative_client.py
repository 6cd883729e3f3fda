"""
Internal bottom-up enumerative synthesizer.

Terms of a grammar are built in order of derivation size; a term whose
outputs on the current inputs match an earlier term of the same nonterminal
is dropped. Bounded problems are solved by counterexample-guided inductive
synthesis against a finite counterexample search; the synthesis-based
generalization search checks candidates against the full constraints.
"""

import itertools
import logging
import time
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass

from ..types.expressions import (
    COMMUTATIVE,
    Apply,
    Expression,
    Operator,
    Select,
    Sort,
    SynthApp,
    Var,
    conjoin,
    const,
    eq,
    ite,
)
from ..types.problem_types import BoundedProblem, Grammar, Problem, SynthFun
from ..types.solver_types import (
    ArrayValue,
    EnumerationLimits,
    SynthOutcome,
    SynthStatus,
    Value,
    Valuation,
    default_value,
)
from ..utilities.constants import (
    ENUMERATION_WINDOW,
    FAST_SYNTH_TIMEOUT,
    FRESH_PREFIX,
    GENERALIZATION_CANDIDATE_CAP,
    GENERALIZATION_SAMPLES,
    GENERALIZATION_SIZE_CAP,
    OUTPUT_PREFIX,
    SAMPLE_SEED,
    VERIFY_TIMEOUT,
)
from ..utilities.evaluation import (
    compile_expression,
    evaluate,
    find_counterexample,
    sample_valuations,
)
from ..utilities.expressions import (
    contains_synth_app,
    inline_synth_funs,
    rebuild,
    simplify,
    substitute_many,
    synth_apps,
)
from ..utilities.grammars import build_template_grammar
from .smt_client import BaseSmtClient, Z3Client

logger = logging.getLogger(__name__)

BACKEND_NAME = "internal"

_FLAT: dict[tuple[Operator, int], Callable[..., Value]] = {
    (Operator.ADD, 2): lambda a, b: a + b,
    (Operator.SUB, 2): lambda a, b: a - b,
    (Operator.NEG, 1): lambda a: -a,
    (Operator.LE, 2): lambda a, b: a <= b,
    (Operator.LT, 2): lambda a, b: a < b,
    (Operator.GE, 2): lambda a, b: a >= b,
    (Operator.GT, 2): lambda a, b: a > b,
    (Operator.EQ, 2): lambda a, b: a == b,
    (Operator.NEQ, 2): lambda a, b: a != b,
    (Operator.AND, 2): lambda a, b: a and b,
    (Operator.OR, 2): lambda a, b: a or b,
    (Operator.NOT, 1): lambda a: not a,
    (Operator.IMPLIES, 2): lambda a, b: (not a) or b,
}


class _ExhaustedError(Exception):
    pass


type Signature = tuple[Value, ...]


@dataclass(frozen=True, slots=True)
class _Entry:
    term: Expression
    signature: Signature


class _Production:
    """One grammar alternative with each nonterminal occurrence turned into its own hole."""

    def __init__(self, production: Expression, nonterminals: Mapping[str, Sort], domain: Sequence[int]):
        self.holes: list[str] = []
        self.hole_names: list[str] = []
        self.template = self._punch(production, nonterminals)
        self.compiled = compile_expression(self.template, domain)
        self.flat: Callable[..., Value] | None = None
        self.commutative = False
        match self.template:
            case Apply(op=op, args=args) if all(isinstance(a, Var) and a.name in self.hole_names for a in args):
                self.flat = _FLAT.get((op, len(args)))
                self.commutative = op in COMMUTATIVE and len(self.holes) == 2 and self.holes[0] == self.holes[1]

    def _punch(self, node: Expression, nonterminals: Mapping[str, Sort]) -> Expression:
        if isinstance(node, Var) and node.name in nonterminals:
            name = f"{FRESH_PREFIX}h{len(self.holes)}"
            self.holes.append(node.name)
            self.hole_names.append(name)
            return Var(name, node.var_sort)
        children = node.children()
        if not children:
            return node
        return rebuild(node, tuple(self._punch(child, nonterminals) for child in children))

    def signature(self, points: Sequence[Valuation], children: Sequence[_Entry]) -> Signature:
        if self.flat is not None:
            return tuple(map(self.flat, *(c.signature for c in children)))
        outputs = []
        for p, point in enumerate(points):
            env = dict(point)
            for name, child in zip(self.hole_names, children, strict=True):
                env[name] = child.signature[p]
            outputs.append(self.compiled(env))
        return tuple(outputs)

    def build(self, children: Sequence[_Entry]) -> Expression:
        if not children:
            return self.template
        return substitute_many(self.template, {name: c.term for name, c in zip(self.hole_names, children, strict=True)})


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


class _TermBank:
    """Grammar terms by size, one per distinct signature and nonterminal."""

    def __init__(
        self,
        grammar: Grammar,
        points: Sequence[Valuation],
        domain: Sequence[int],
        max_terms: int,
        deadline: float,
    ):
        sorts = grammar.placeholders()
        self.grammar = grammar
        self.points = points
        self.productions = {
            nt: [_Production(p, sorts, domain) for p in grammar.productions.get(nt, ())] for nt, _ in grammar.nonterminals
        }
        self.by_size: dict[str, dict[int, list[_Entry]]] = {nt: {} for nt, _ in grammar.nonterminals}
        self.seen: dict[str, set[Signature]] = {nt: set() for nt, _ in grammar.nonterminals}
        self.max_terms = max_terms
        self.deadline = deadline
        self.built = 0

    def _tick(self) -> None:
        self.built += 1
        if self.built > self.max_terms:
            msg = f"candidate cap of {self.max_terms} reached"
            raise _ExhaustedError(msg)
        if self.built % 256 == 0 and time.monotonic() > self.deadline:
            msg = "time limit reached"
            raise _ExhaustedError(msg)

    def _children(self, production: _Production, size: int) -> Iterator[list[_Entry]]:
        for sizes in _compositions(size - 1, len(production.holes)):
            pools = [self.by_size[nt].get(s, []) for nt, s in zip(production.holes, sizes, strict=True)]
            if not all(pools):
                continue
            for picks in itertools.product(*(range(len(pool)) for pool in pools)):
                if production.commutative and (sizes[0], picks[0]) > (sizes[1], picks[1]):
                    continue
                yield [pool[k] for pool, k in zip(pools, picks, strict=True)]

    def terms(self, max_size: int) -> Iterator[_Entry]:
        """Start-symbol terms in nondecreasing size."""
        start = self.grammar.start
        for size in range(1, max_size + 1):
            for nt, productions in self.productions.items():
                level = self.by_size[nt].setdefault(size, [])
                for production in productions:
                    if production.holes:
                        candidates: Iterable[list[_Entry]] = self._children(production, size)
                    else:
                        candidates = [[]] if size == 1 else []
                    for children in candidates:
                        self._tick()
                        signature = production.signature(self.points, children)
                        if signature in self.seen[nt]:
                            continue
                        self.seen[nt].add(signature)
                        entry = _Entry(production.build(children), signature)
                        level.append(entry)
                        if nt == start:
                            yield entry


def _as_const(value: Value) -> Expression:
    if isinstance(value, ArrayValue):
        msg = "array values have no constant syntax"
        raise TypeError(msg)
    return const(value)


def _select_chain(array: ArrayValue, index: Expression, array_len: int) -> Expression:
    result: Expression = const(array.default)
    keys = sorted(set(range(array_len)) | {k for k, _ in array.entries}, reverse=True)
    for k in keys:
        result = ite(eq(index, const(k)), const(array.read(k)), result)
    return result


class _Residualizer:
    """Fixes the declared variables to an input and names each distinct function input by an output variable."""

    def __init__(self, fn: SynthFun, domain: Sequence[int]):
        self.fn = fn
        self.domain = domain
        self.points: dict[tuple[Value, ...], int] = {}

    def output(self, key: tuple[Value, ...]) -> Var:
        k = self.points.setdefault(key, len(self.points))
        return Var(f"{OUTPUT_PREFIX}{k}", self.fn.return_sort)

    def residual(self, e: Expression, env: Valuation) -> Expression:
        if not contains_synth_app(e):
            return _as_const(evaluate(e, env, self.domain))
        match e:
            case SynthApp(args=args):
                return self.output(tuple(evaluate(arg, env, self.domain) for arg in args))
            case Select(array=array, index=index) if not contains_synth_app(array):
                value = evaluate(array, env, self.domain)
                if isinstance(value, ArrayValue):
                    return _select_chain(value, self.residual(index, env), len(self.domain))
        return rebuild(e, tuple(self.residual(child, env) for child in e.children()))

    def point_list(self) -> list[Valuation]:
        names = self.fn.param_names
        return [dict(zip(names, key, strict=True)) for key in self.points]


class EnumerativeSynthesizer:
    """
    Bottom-up enumerative synthesis with counterexample-guided refinement.

    Only problems with a single function to synthesize are handled; anything
    else comes back as unknown.
    """

    def __init__(
        self,
        window: tuple[int, int] = ENUMERATION_WINDOW,
        smt: BaseSmtClient | None = None,
    ):
        self.window = window
        self.smt = smt or Z3Client()

    @staticmethod
    def _single(synth_funs: Sequence[SynthFun]) -> SynthFun | None:
        if len(synth_funs) != 1:
            logger.warning("internal synthesizer handles one function to synthesize, got %s", len(synth_funs))
            return None
        return synth_funs[0]

    def synthesize(
        self,
        bp: BoundedProblem,
        grammars: Mapping[str, Grammar] | None = None,
        timeout: float = FAST_SYNTH_TIMEOUT,
    ) -> SynthOutcome:
        """Solve a bounded problem with the given grammar, the function's own, or the template grammar."""
        fn = self._single(bp.synth_funs)
        if fn is None:
            return SynthOutcome(status=SynthStatus.UNKNOWN, backend=BACKEND_NAME)
        grammar = (grammars or {}).get(fn.name) or fn.grammar or build_template_grammar(fn, bp.bound)
        return self.enumerate_candidates(
            fn,
            grammar,
            bp.constraints,
            bp.declared_vars,
            bp.bound,
            EnumerationLimits(timeout=timeout),
        )

    def enumerate_candidates(
        self,
        fn: SynthFun,
        grammar: Grammar,
        constraints: Sequence[Expression],
        declared: Sequence[tuple[str, Sort]],
        array_len: int,
        limits: EnumerationLimits | None = None,
    ) -> SynthOutcome:
        """
        Smallest grammar term satisfying the quantifier-free `constraints` on
        every input the counterexample search tries, arrays of length
        `array_len`.
        """
        limits = limits or EnumerationLimits()
        if any(contains_synth_app(arg) for c in constraints for app in synth_apps(c) for arg in app.args):
            logger.warning("nested applications of %s are not supported by the internal synthesizer", fn.name)
            return SynthOutcome(status=SynthStatus.UNKNOWN, backend=BACKEND_NAME)
        deadline = time.monotonic() + limits.timeout
        domain = range(array_len)
        examples: list[Valuation] = [{name: default_value(sort) for name, sort in declared}]
        tried = 0
        formula = conjoin(list(constraints))
        while True:
            residualizer = _Residualizer(fn, domain)
            residual = simplify(conjoin([residualizer.residual(formula, env) for env in examples]))
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return SynthOutcome(status=SynthStatus.TIMED_OUT, candidates_tried=tried, backend=BACKEND_NAME)
            if self.smt.is_satisfiable(residual, timeout=min(remaining, FAST_SYNTH_TIMEOUT)) is False:
                logger.debug("no function fits the %s inputs collected so far", len(examples))
                return SynthOutcome(status=SynthStatus.INFEASIBLE, candidates_tried=tried, backend=BACKEND_NAME)
            check = compile_expression(residual, domain)
            bank = _TermBank(grammar, residualizer.point_list(), domain, limits.max_candidates, deadline)
            found = None
            try:
                for entry in bank.terms(limits.max_size):
                    tried += 1
                    env = {f"{OUTPUT_PREFIX}{k}": v for k, v in enumerate(entry.signature)}
                    if check(env):
                        found = entry.term
                        break
            except _ExhaustedError as e:
                logger.debug("enumeration stopped: %s", e)
            if found is None:
                return SynthOutcome(status=SynthStatus.TIMED_OUT, candidates_tried=tried, backend=BACKEND_NAME)
            definitions = {fn.name: (fn.param_names, found)}
            inlined = conjoin([inline_synth_funs(c, definitions) for c in constraints])
            counterexample = find_counterexample(inlined, declared, array_len, self.window)
            if counterexample is None:
                logger.debug("found %s after %s candidates", found, tried)
                return SynthOutcome(
                    status=SynthStatus.SOLVED,
                    bindings={fn.name: found},
                    candidates_tried=tried,
                    backend=BACKEND_NAME,
                )
            logger.debug("candidate %s refuted by %s", found, counterexample)
            examples.append(counterexample)

    def search_generalization(
        self,
        problem: Problem,
        grammar: Grammar,
        *,
        bound: int,
        timeout: float,
        verifier: BaseSmtClient | None = None,
        verify_timeout: float = VERIFY_TIMEOUT,
        candidate_cap: int = GENERALIZATION_CANDIDATE_CAP,
        size_cap: int = GENERALIZATION_SIZE_CAP,
        on_candidate: Callable[[Expression, str], None] | None = None,
    ) -> SynthOutcome:
        """
        Search `grammar` for a term solving the full, quantified `problem`.

        Candidates are first run on seeded random inputs, arrays of length at
        least `bound + 2`; survivors are verified by the SMT backend and the
        first valid one is returned.
        """
        fn = self._single(problem.synth_funs)
        if fn is None:
            return SynthOutcome(status=SynthStatus.UNKNOWN, backend=BACKEND_NAME)
        deadline = time.monotonic() + timeout
        verifier = verifier or self.smt
        array_len = max(bound + 2, 4)
        # Quantifiers also range over two cells left of the array, so candidates
        # that differ only at negative indices are told apart.
        domain = range(-2, array_len)
        points = sample_valuations(fn.params, array_len, self.window, GENERALIZATION_SAMPLES, SAMPLE_SEED)
        samples = sample_valuations(problem.declared_vars, array_len, self.window, GENERALIZATION_SAMPLES, SAMPLE_SEED + 1)
        formula = conjoin(list(problem.constraints))
        bank = _TermBank(grammar, points, domain, candidate_cap, deadline)
        tried = 0
        try:
            for entry in bank.terms(size_cap):
                tried += 1
                definitions = {fn.name: (fn.param_names, entry.term)}
                compiled = compile_expression(inline_synth_funs(formula, definitions), domain)
                if not all(compiled(dict(env)) for env in samples):
                    continue
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                outcome = verifier.verify(problem, {fn.name: entry.term}, timeout=min(verify_timeout, remaining))
                if on_candidate is not None:
                    on_candidate(entry.term, str(outcome.status))
                if outcome.valid:
                    logger.debug("generalization search found %s after %s candidates", entry.term, tried)
                    return SynthOutcome(
                        status=SynthStatus.SOLVED,
                        bindings={fn.name: entry.term},
                        candidates_tried=tried,
                        backend=BACKEND_NAME,
                    )
        except _ExhaustedError as e:
            logger.debug("generalization search stopped: %s", e)
        return SynthOutcome(status=SynthStatus.TIMED_OUT, candidates_tried=tried, backend=BACKEND_NAME)
