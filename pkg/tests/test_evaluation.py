import pytest

from synrg.types.expressions import (
    IntConst,
    SynthApp,
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
    ite,
    lt,
    select,
    store,
)
from synrg.types.solver_types import ArrayValue
from synrg.utilities.evaluation import (
    evaluate,
    finite_check,
    find_counterexample,
    interpretations,
    sample_valuations,
    valuation_space_size,
    valuations,
)
from synrg.utilities.exceptions import OracleTooLargeError

pytestmark = pytest.mark.contract

A = array_var("A")
x, y = int_var("x"), int_var("y")
ZERO = IntConst(0)


class TestArrayValue:
    def test_reads_fall_back_to_the_default(self):
        arr = ArrayValue.from_list([4, 5], default=-1)
        assert arr.read(0) == 4
        assert arr.read(1) == 5
        assert arr.read(7) == -1

    def test_entries_equal_to_the_default_are_dropped(self):
        assert ArrayValue.of({0: 0, 1: 2}) == ArrayValue(default=0, entries=((1, 2),))

    def test_write_is_persistent(self):
        arr = ArrayValue.from_list([1, 2])
        written = arr.write(0, 9)
        assert written.read(0) == 9
        assert arr.read(0) == 1


def test_evaluate_arithmetic_and_arrays():
    env = {"A": ArrayValue.from_list([3, 1]), "x": 1}
    assert evaluate(add(select(A, x), IntConst(2)), env, range(2)) == 3
    assert evaluate(select(store(A, x, IntConst(7)), x), env, range(2)) == 7
    assert evaluate(ite(bool_var("p"), x, ZERO), {"p": False, "x": 4}, range(1)) == 0


def test_quantifiers_range_over_the_domain():
    env = {"A": ArrayValue.from_list([0, 1, -1])}
    nonneg = forall("i", ge(select(A, int_var("i")), ZERO))
    assert evaluate(nonneg, env, range(2))
    assert not evaluate(nonneg, env, range(3))
    assert evaluate(exists("i", lt(select(A, int_var("i")), ZERO)), env, range(3))


def test_quantifiers_restore_shadowed_variables():
    env = {"i": 5}
    e = and_(forall("i", ge(int_var("i"), ZERO)), eq(int_var("i"), IntConst(5)))
    assert evaluate(e, env, range(2))


def test_functions_are_applied_through_interpretations():
    functions = interpretations({"f": (("x",), add(x, IntConst(1)))}, range(1))
    app = SynthApp("f", (y,), Sort.INT)
    assert evaluate(eq(app, IntConst(3)), {"y": 2}, range(1), functions)


def test_missing_interpretation_is_reported():
    with pytest.raises(KeyError):
        evaluate(SynthApp("g", (), Sort.BOOL), {}, range(1))


def test_valuation_space():
    variables = [("A", Sort.ARRAY), ("x", Sort.INT), ("p", Sort.BOOL)]
    assert valuation_space_size(variables, 2, (-1, 1)) == 9 * 3 * 2
    assert len(list(valuations(variables, 2, (-1, 1)))) == 54


def test_finite_check_finds_a_witness():
    result = finite_check(and_(gt(select(A, 0), select(A, 1)), eq(x, select(A, 1))), 2)
    assert result.satisfiable
    assert result.witness is not None
    witness_array = result.witness["A"]
    assert isinstance(witness_array, ArrayValue)
    assert witness_array.read(0) > witness_array.read(1) == result.witness["x"]


def test_finite_check_exhausts_the_window():
    result = finite_check(and_(gt(x, IntConst(2)), lt(x, IntConst(3))), 1)
    assert result.status == "unsat_within_window"
    assert result.explored == 5


def test_finite_check_refuses_large_spaces():
    with pytest.raises(OracleTooLargeError):
        finite_check(ge(select(A, 0), select(array_var("B"), 0)), 8, ceiling=1000)


def test_find_counterexample():
    formula = ge(select(A, 0), ZERO)
    cex = find_counterexample(formula, [("A", Sort.ARRAY)], 1, (-2, 2))
    assert cex is not None
    assert cex["A"].read(0) < 0
    assert find_counterexample(ge(add(x, IntConst(3)), ZERO), [("x", Sort.INT)], 1, (-2, 2)) is None


def test_find_counterexample_samples_large_spaces():
    formula = lt(select(A, 3), IntConst(2))
    cex = find_counterexample(formula, [("A", Sort.ARRAY)], 8, (-3, 3), ceiling=10, samples=500)
    assert cex is not None
    assert cex["A"].read(3) >= 2


def test_sampling_is_seeded():
    variables = [("A", Sort.ARRAY), ("x", Sort.INT)]
    first = sample_valuations(variables, 3, (-3, 3), 20, seed=7)
    assert first == sample_valuations(variables, 3, (-3, 3), 20, seed=7)
    assert all(-3 <= env["x"] <= 3 for env in first)
