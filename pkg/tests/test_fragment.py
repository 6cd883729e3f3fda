import random

import pytest

from synrg.types.expressions import (
    Expression,
    IntConst,
    Sort,
    Var,
    and_,
    array_var,
    conjoin,
    eq,
    exists,
    forall,
    ge,
    implies,
    int_var,
    le,
    lt,
    neq,
    not_,
    offset,
    or_,
    select,
)
from synrg.types.problem_types import IndexSet, Problem
from synrg.utilities.evaluation import finite_check
from synrg.utilities.exceptions import EmptyIndexSetError, NotSkolemizableError
from synrg.utilities.fragment import (
    analyze_problem,
    classify_array_property,
    index_terms,
    instantiate_universals,
    skolemize,
)

pytestmark = pytest.mark.contract

a, a2 = array_var("a"), array_var("a2")
i, n, x, j = int_var("i"), int_var("n"), int_var("x"), int_var("j")
z = int_var("z!0")
ZERO = IntConst(0)

# A prefix of `a` is zero, `a2` is `a` with cell i zeroed, and some cell of a2 at or below i is not zero.
ZEROED_PREFIX = and_(
    forall("x", implies(lt(x, i), eq(select(a, x), ZERO))),
    eq(select(a2, i), ZERO),
    forall("j", implies(neq(j, i), eq(select(a2, j), select(a, j)))),
    exists("x", and_(le(x, i), neq(select(a2, x), ZERO))),
)


def test_skolemize_replaces_top_level_existentials():
    skolemized = skolemize(ZEROED_PREFIX)
    assert skolemized.args[3] == and_(le(z, i), neq(select(a2, z), ZERO))
    assert skolemized.args[0] == ZEROED_PREFIX.args[0]


def test_skolemize_treats_negated_universals_as_existentials():
    e = implies(forall("x", eq(select(a, x), ZERO)), eq(n, ZERO))
    assert skolemize(e) == implies(eq(select(a, z), ZERO), eq(n, ZERO))


def test_skolemize_rejects_existentials_under_universals():
    e = forall("x", exists("j", eq(select(a, x), select(a2, j))))
    with pytest.raises(NotSkolemizableError):
        skolemize(e)


def test_index_terms_collects_ground_reads_and_guard_operands():
    r = index_terms(skolemize(ZEROED_PREFIX))
    assert r.terms == (i, z)


def test_instantiate_universals_over_the_index_set():
    skolemized = skolemize(ZEROED_PREFIX)
    instantiated = instantiate_universals(skolemized, index_terms(skolemized))
    assert instantiated == and_(
        implies(lt(z, i), eq(select(a, z), ZERO)),
        eq(select(a2, i), ZERO),
        implies(neq(z, i), eq(select(a2, z), select(a, z))),
        and_(le(z, i), neq(select(a2, z), ZERO)),
    )


def test_instantiation_needs_index_terms():
    with pytest.raises(EmptyIndexSetError):
        instantiate_universals(forall("x", eq(select(a, x), ZERO)), IndexSet())


def test_guarded_prefix_is_in_the_fragment():
    e = forall("x", implies(and_(le(ZERO, x), lt(x, i)), eq(select(a, x), ZERO)))
    report = classify_array_property(e)
    assert report.in_fragment
    assert report.violations == []
    assert report.index_guard == and_(le(ZERO, x), lt(x, i))
    assert report.value_constraint == eq(select(a, x), ZERO)


@pytest.mark.parametrize(
    ("e", "reason"),
    [
        (ZEROED_PREFIX, "disequality in the index guard"),
        (forall("x", lt(select(a, x), select(a, offset(x, 1)))), "arithmetic on a quantified index in an array read"),
        (forall("x", eq(select(a, x), x)), "quantified index used outside an array read"),
        (
            forall("x", exists("j", eq(select(a, x), select(a2, j)))),
            "quantifier alternation under a universal quantifier",
        ),
        (forall("x", implies(le(offset(x, 1), i), eq(select(a, x), ZERO))), "arithmetic on a universally quantified index in the index guard"),
    ],
)
def test_formulas_outside_the_fragment(e, reason):
    report = classify_array_property(e)
    assert not report.in_fragment
    assert reason in {v.reason for v in report.violations}


def test_analyze_problem_reports_the_index_set(running_problem):
    report = analyze_problem(running_problem)
    assert report.in_fragment
    assert report.index_set is not None
    assert not report.empty_index_set_fallback


def test_analyze_problem_falls_back_to_index_zero():
    problem = Problem(declared_vars=(("a", Sort.ARRAY),), constraints=(forall("x", ge(select(a, x), ZERO)),))
    report = analyze_problem(problem)
    assert report.empty_index_set_fallback
    assert report.index_set == IndexSet(terms=(ZERO,))


def test_report_serializes_expressions():
    e = forall("x", implies(le(ZERO, x), eq(select(a, x), ZERO)))
    dumped = classify_array_property(e).model_dump()
    assert dumped["index_guard"] == "(<= 0 x)"


def _index_guard(rng: random.Random, length: int) -> Expression:
    """`0 <= x` and up to two more non-strict bounds on `x` by ground terms."""
    bounds = [le(ZERO, x)]
    for _ in range(rng.randint(0, 2)):
        s = rng.choice([i, n, IntConst(rng.randrange(length))])
        bounds.append(rng.choice([le(s, x), le(x, s), eq(x, s)]))
    return conjoin(bounds)


def _cell_property(rng: random.Random, arrays: list[Var], at: Var, depth: int) -> Expression:
    if depth == 0 or rng.random() < 0.4:
        other = rng.choice([i, n, IntConst(rng.randint(-1, 1)), select(rng.choice(arrays), at), select(a, i)])
        return rng.choice([le, lt, eq, neq])(select(rng.choice(arrays), at), other)
    match rng.randrange(3):
        case 0:
            return not_(_cell_property(rng, arrays, at, depth - 1))
        case 1:
            return and_(_cell_property(rng, arrays, at, depth - 1), _cell_property(rng, arrays, at, depth - 1))
        case _:
            return or_(_cell_property(rng, arrays, at, depth - 1), _cell_property(rng, arrays, at, depth - 1))


def _array_property(rng: random.Random, arrays: list[Var], length: int) -> Expression:
    parts = [forall("x", implies(_index_guard(rng, length), _cell_property(rng, arrays, x, 2)))]
    if rng.random() < 0.4:
        parts.append(forall("x", implies(_index_guard(rng, length), _cell_property(rng, arrays, x, 1))))
    if rng.random() < 0.6:
        parts.append(exists("j", and_(le(ZERO, j), _cell_property(rng, arrays, j, 1))))
    for _ in range(rng.randint(0, 2)):
        read = select(rng.choice(arrays), rng.choice([i, n]))
        parts.append(rng.choice([le, eq, neq])(read, rng.choice([i, n, IntConst(rng.randint(-1, 1))])))
    rng.shuffle(parts)
    return conjoin(parts)


@pytest.mark.slow
def test_instantiation_over_the_index_set_is_equisatisfiable(rng):
    outcomes = set()
    for _ in range(100):
        length = rng.choice([2, 3])
        arrays = [a, a2] if length == 2 else [a]
        e = _array_property(rng, arrays, length)
        assert classify_array_property(e).in_fragment, str(e)
        skolemized = skolemize(e)
        instantiated = instantiate_universals(skolemized, index_terms(skolemized))
        # scalars must reach every cell so the skolem constant can stand for any witness
        window = (-1, length - 1)
        expected = finite_check(e, length, window).satisfiable
        assert finite_check(instantiated, length, window).satisfiable == expected, str(e)
        outcomes.add(expected)
    assert outcomes == {True, False}
