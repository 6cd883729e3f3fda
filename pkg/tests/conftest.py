import random
import shutil

import pytest

from synrg.corpus import load_corpus, load_problem
from synrg.types.expressions import (
    Expression,
    IntConst,
    Select,
    add,
    and_,
    array_var,
    eq,
    ge,
    gt,
    int_var,
    le,
    lt,
    neq,
    not_,
    or_,
    select,
)
from synrg.types.pipeline_types import GoldenCase
from synrg.types.problem_types import Problem
from synrg.utilities.evaluation import finite_check
from synrg.utilities.expressions import iter_subterms, rebuild
from synrg.utilities.sygus.parser import parse_problem

RUNNING_EXAMPLE = """
(set-logic ALL)
(synth-fun inv ((c Int) (A (Array Int Int))) Bool)
(declare-var c Int)
(declare-var A (Array Int Int))
(declare-var A2 (Array Int Int))
(constraint (=> (and (> c 0) (forall ((i Int)) (>= (select A i) 0))) (inv c A)))
(constraint (=> (and (inv c A) (forall ((i Int)) (= (select A2 i) (+ (select A i) c)))) (inv c A2)))
(constraint (=> (inv c A) (not (exists ((i Int)) (< (select A i) 0)))))
(check-synth)
"""

PLUS_ONE = """
(set-logic LIA)
(synth-fun f ((x Int)) Int)
(declare-var x Int)
(constraint (= (f x) (+ x 1)))
(check-synth)
"""

ARRAYS = (array_var("A"), array_var("B"))
SCALAR = int_var("c")


def _shift_reads(e: Expression, delta: int) -> Expression:
    if isinstance(e, Select) and isinstance(e.index, IntConst):
        return Select(e.array, IntConst(e.index.value + delta))
    children = e.children()
    if not children:
        return e
    return rebuild(e, tuple(_shift_reads(child, delta) for child in children))


class CandidateGenerator:
    """
    Random quantifier-free candidates over A, B and c, read at constant
    indices below `b`. Conjunctions and disjunctions often hold the same
    comparison read at several consecutive cells, sometimes with one left out.
    """

    def __init__(self, rng: random.Random, b: int) -> None:
        self.rng = rng
        self.b = b

    def read(self) -> Expression:
        return select(self.rng.choice(ARRAYS), self.rng.randrange(self.b))

    def term(self) -> Expression:
        match self.rng.randrange(4):
            case 0:
                return self.read()
            case 1:
                return add(self.read(), IntConst(self.rng.choice([-1, 1])))
            case 2:
                return SCALAR
            case _:
                return IntConst(self.rng.randint(-1, 1))

    def atom(self) -> Expression:
        compare = self.rng.choice([le, lt, ge, gt, eq, neq])
        return compare(self.term(), self.term())

    def family(self) -> list[Expression]:
        atom = self.atom()
        cells = [node.index.value for node in iter_subterms(atom) if isinstance(node, Select)]
        if not cells:
            return [atom]
        members = [_shift_reads(atom, delta) for delta in range(-min(cells), self.b - max(cells))]
        if len(members) > 1 and self.rng.random() < 0.3:
            members.pop(self.rng.randrange(len(members)))
        return members

    def formula(self, depth: int = 4) -> Expression:
        rng = self.rng
        if depth <= 1 or rng.random() < 0.2:
            return self.atom()
        match rng.randrange(5):
            case 0:
                return not_(self.formula(depth - 1))
            case 1 | 2:
                operands = self.family()
                operands.extend(self.formula(depth - 1) for _ in range(rng.randint(0, 2)))
            case _:
                operands = [self.formula(depth - 1) for _ in range(rng.randint(2, 3))]
        if len(operands) == 1:
            operands.append(self.formula(depth - 1))
        rng.shuffle(operands)
        return and_(*operands) if rng.random() < 0.5 else or_(*operands)


@pytest.fixture
def running_problem() -> Problem:
    return parse_problem(RUNNING_EXAMPLE)


@pytest.fixture
def plus_one_problem() -> Problem:
    return parse_problem(PLUS_ONE)


@pytest.fixture(scope="session")
def corpus_cases() -> dict[str, GoldenCase]:
    return {case.name: case for case in load_corpus()}


@pytest.fixture
def corpus_problem(corpus_cases: dict[str, GoldenCase]):
    def load(name: str) -> Problem:
        return load_problem(corpus_cases[name])

    return load


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1337)


@pytest.fixture
def bounded_candidate(rng: random.Random):
    """Seeded random bounded candidates; see `CandidateGenerator`."""

    def make(b: int, depth: int = 4) -> Expression:
        return CandidateGenerator(rng, b).formula(depth)

    return make


def _differ(left: Expression, right: Expression) -> Expression:
    return or_(and_(left, not_(right)), and_(not_(left), right))


@pytest.fixture
def same_on_bound():
    """Whether two formulas agree on every model with arrays of the given length, scalars in [-1, 1]."""

    def check(left: Expression, right: Expression, array_len: int) -> bool:
        return not finite_check(_differ(left, right), array_len, window=(-1, 1)).satisfiable

    return check


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if shutil.which("cvc5") and shutil.which("z3"):
        return
    skip = pytest.mark.skip(reason="needs cvc5 and z3 on PATH")
    for item in items:
        if "solver_live" in item.keywords:
            item.add_marker(skip)
