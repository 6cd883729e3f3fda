import pytest

from synrg.types.expressions import (
    IntConst,
    Quant,
    Sort,
    and_,
    array_var,
    eq,
    ge,
    gt,
    int_var,
    le,
    lt,
    select,
)
from synrg.utilities.expressions import iter_subterms
from synrg.utilities.generalization import admissible_bases, matching, orient, syntactic_generalize
from synrg.utilities.restriction import restrict_constraint
from synrg.utilities.sygus.parser import parse_term

A, B = array_var("A"), array_var("B")
c = int_var("c")
ZERO = IntConst(0)
SCOPE = {"A": Sort.ARRAY, "B": Sort.ARRAY, "c": Sort.INT}


def generalize_text(text: str, b: int) -> str:
    return str(syntactic_generalize(parse_term(text, SCOPE), b))


@pytest.mark.contract
class TestMatching:
    def test_reads_shifted_by_one(self):
        witness = matching(ge(select(A, 0), ZERO), ge(select(A, 1), ZERO))
        assert witness is not None
        assert witness.base_indices == frozenset({0, 1})
        assert witness.read_offsets == (("A", 0),)
        assert str(witness.template) == "(>= (select A z!) 0)"

    def test_reads_with_inconsistent_shifts_do_not_match(self):
        assert matching(lt(select(A, 0), select(A, 1)), lt(select(A, 1), select(A, 3))) is None

    def test_different_shapes_do_not_match(self):
        assert matching(ge(select(A, 0), ZERO), le(select(A, 1), c)) is None

    def test_constants_shift_along_with_reads(self):
        witness = matching(eq(select(A, 0), IntConst(0)), eq(select(A, 1), IntConst(1)))
        assert witness is not None
        assert witness.const_offsets == (0,)
        assert str(witness.template) == "(= (select A z!) z!)"

    def test_mirrored_comparisons_match_after_orienting(self):
        assert orient(le(c, select(A, 0))) == ge(select(A, 0), c)
        assert matching(le(c, select(A, 0)), ge(select(A, 1), c)) is not None

    def test_equivalence_callback_is_consulted_for_different_shapes(self, mocker):
        check = mocker.Mock(return_value=True)
        first = ge(select(A, 0), ZERO)
        second = le(IntConst(0), select(A, 0))
        witness = matching(and_(first, gt(c, ZERO)), and_(gt(c, ZERO), second), equivalent=check)
        assert witness is not None
        check.assert_called_once()

    def test_equivalence_callback_rejection_is_final(self, mocker):
        check = mocker.Mock(return_value=False)
        first = and_(ge(select(A, 0), ZERO), gt(c, ZERO))
        second = and_(gt(c, ZERO), ge(select(A, 0), ZERO))
        assert matching(first, second, equivalent=check) is None

    def test_admissible_bases(self):
        witness = matching(lt(select(A, 0), select(A, 1)), lt(select(A, 1), select(A, 2)))
        assert witness is not None
        assert admissible_bases(witness, 3) == frozenset({0, 1})
        assert admissible_bases(witness, 1) == frozenset()


@pytest.mark.contract
class TestSyntacticGeneralize:
    def test_running_example(self):
        text = "(and (>= (select A 0) 0) (>= (select A 1) 0) (> c 0))"
        assert generalize_text(text, 2) == "(and (forall ((z!1 Int)) (>= (select A z!1) 0)) (> c 0))"

    def test_nested_alternation(self):
        text = "(and (or (= (select A 0) (select B 0)) (= (select A 0) (select B 1))) (or (= (select A 1) (select B 0)) (= (select A 1) (select B 1))))"
        expected = "(forall ((z!3 Int)) (exists ((z!1 Int)) (= (select A z!3) (select B z!1))))"
        assert generalize_text(text, 2) == expected

    def test_adjacent_reads(self):
        text = "(and (< (select A 0) (select A 1)) (< (select A 1) (select A 2)))"
        assert generalize_text(text, 3) == "(forall ((z!1 Int)) (< (select A z!1) (select A (+ z!1 1))))"

    def test_set_that_does_not_span_the_bound_is_kept(self):
        e = and_(ge(select(A, 0), ZERO), ge(select(A, 1), ZERO))
        assert syntactic_generalize(e, 3) is e

    def test_formula_without_reads_is_unchanged(self):
        e = and_(gt(c, ZERO), ge(c, IntConst(-3)))
        assert syntactic_generalize(e, 2) is e

    def test_operand_order_does_not_matter(self):
        text = "(and (> c 0) (>= (select A 1) 0) (>= (select A 0) 0))"
        assert generalize_text(text, 2) == "(and (> c 0) (forall ((z!1 Int)) (>= (select A z!1) 0)))"

    def test_corpus_candidates_generalize_to_the_golden_solution(self, corpus_cases, corpus_problem, same_on_bound):
        for case in corpus_cases.values():
            if case.expected_phase != "syntactic" or case.bounded_candidate is None:
                continue
            fn = corpus_problem(case.name).functions[case.synth_fun]
            scope = dict(fn.params)
            generalized = syntactic_generalize(parse_term(case.bounded_candidate, scope), case.expected_bound)
            golden = parse_term(case.expected_candidate, scope)
            b = case.expected_bound
            assert same_on_bound(restrict_constraint(generalized, b), restrict_constraint(golden, b), b), case.name


@pytest.mark.slow
def test_generalization_preserves_meaning_on_the_bound(rng, bounded_candidate, same_on_bound):
    generalized_count = 0
    for _ in range(200):
        b = rng.choice([2, 3])
        e = bounded_candidate(b)
        generalized = syntactic_generalize(e, b)
        if generalized is not e:
            generalized_count += 1
            assert any(isinstance(node, Quant) for node in iter_subterms(generalized))
        assert same_on_bound(restrict_constraint(generalized, b), e, b), (str(e), str(generalized), b)
    assert generalized_count >= 20
