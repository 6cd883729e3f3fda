import pytest

from synrg.types.expressions import (
    ZERO,
    Sort,
    add,
    and_,
    array_var,
    bool_var,
    eq,
    exists,
    forall,
    ge,
    gt,
    int_var,
    lt,
    not_,
    select,
)
from synrg.types.problem_types import SynthFun
from synrg.utilities.invariants import invariant_constraints, invariant_problem

pytestmark = pytest.mark.contract

c, i = int_var("c"), int_var("i")
A, A2 = array_var("A"), array_var("A2")
INV = SynthFun(name="inv", params=(("c", Sort.INT), ("A", Sort.ARRAY)), return_sort=Sort.BOOL)
INIT = and_(gt(c, ZERO), forall("i", ge(select(A, i), ZERO)))
TRANS = forall("i", eq(select(A2, i), add(select(A, i), c)))
POST = not_(exists("i", lt(select(A, i), ZERO)))


def test_running_example_as_a_loop(running_problem):
    problem = invariant_problem(INV, INIT, TRANS, POST, (c, A), (c, A2))
    assert problem.declared_vars == running_problem.declared_vars
    assert problem.constraints == running_problem.constraints


def test_three_obligations():
    initiation, consecution, safety = invariant_constraints(INV, INIT, TRANS, POST, (c, A), (c, A2))
    assert str(initiation).endswith("(inv c A))")
    assert str(consecution).endswith("(inv c A2))")
    assert str(safety).startswith("(=> (inv c A)")


def test_extra_variables_are_declared_once():
    problem = invariant_problem(INV, INIT, TRANS, POST, (c, A), (c, A2), extra_vars=(c, int_var("n")))
    assert [name for name, _ in problem.declared_vars] == ["c", "A", "A2", "n"]


@pytest.mark.parametrize(
    ("inv", "pre", "post", "message"),
    [
        (INV, (c,), (c, A2), "takes 2 arguments, got 1"),
        (INV, (A, c), (c, A2), "has sort"),
        (INV.model_copy(update={"return_sort": Sort.INT}), (c, A), (c, A2), "must return Bool"),
    ],
)
def test_malformed_loops(inv, pre, post, message):
    with pytest.raises(ValueError, match=message):
        invariant_constraints(inv, INIT, TRANS, POST, pre, post)


def test_sort_clash_between_variables():
    with pytest.raises(ValueError, match="used with sorts"):
        invariant_problem(INV, INIT, TRANS, POST, (c, A), (c, A2), extra_vars=(bool_var("A2"),))
