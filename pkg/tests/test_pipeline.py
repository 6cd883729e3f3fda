import json
import logging

import pytest

from synrg.pipeline import SynrgPipeline, solve
from synrg.types.expressions import Sort
from synrg.types.pipeline_types import FailureReason, Phase, PipelineConfig
from synrg.types.problem_types import BoundConfig
from synrg.types.solver_types import SolverKind, SolverSpec, SynthOutcome, SynthStatus
from synrg.utilities.evaluation import evaluate
from synrg.utilities.sygus.parser import parse_problem, parse_term

FAR_READ = """
(synth-fun f ((A (Array Int Int))) Bool)
(declare-var A (Array Int Int))
(constraint (= (f A) (>= (select A 99) 0)))
(check-synth)
"""

UNSATISFIABLE = """
(synth-fun f ((x Int)) Int)
(declare-var x Int)
(constraint false)
(check-synth)
"""

MISSING_SOLVER = SolverSpec(command=("synrg-no-such-solver",), kind=SolverKind.SYNTHESIS, wall_timeout=5)
INV_SCOPE = {"c": Sort.INT, "A": Sort.ARRAY}


def quick_config(**overrides) -> PipelineConfig:
    settings = {
        "bound": BoundConfig(b_start=2, b_max=2),
        "fast_synth_timeout": 5,
        "template_synth_timeout": 10,
        "total_timeout": 60,
        "generalization_candidate_cap": 200,
        "generalization_size_cap": 6,
    }
    return PipelineConfig(**(settings | overrides))


def phases(report) -> list[Phase]:
    return [record.phase for iteration in report.iterations for record in iteration.phases]


@pytest.mark.contract
class TestSolve:
    def test_quantifier_free_problem(self, plus_one_problem):
        report = SynrgPipeline(quick_config()).solve(plus_one_problem)
        assert report.solved
        assert report.verified
        assert report.phase == "syntactic"
        assert report.final_bound == 2
        assert report.quantifier_profile == "none"
        assert evaluate(report.bindings["f"], {"x": 41}, range(2)) == 42
        assert phases(report)[:3] == [Phase.RESTRICT, Phase.SYNTHESIZE_FAST, Phase.SYNTACTIC]

    def test_unsatisfiable_constraints_exhaust_the_bounds(self):
        report = solve(parse_problem(UNSATISFIABLE), quick_config(bound=BoundConfig(b_start=2, b_max=3)))
        assert not report.solved
        assert report.failure_reason is FailureReason.BOUND_EXHAUSTED
        assert [iteration.bound for iteration in report.iterations] == [2, 3]
        assert all(record.outcome != "solved" for iteration in report.iterations for record in iteration.phases)

    def test_solution_that_never_verifies(self):
        report = SynrgPipeline(quick_config()).solve(parse_problem(FAR_READ))
        assert report.failure_reason is FailureReason.BOUND_EXHAUSTED
        assert len(report.iterations) == 1
        assert report.counterexamples

    def test_unverified_solution_on_request(self):
        report = SynrgPipeline(quick_config(accept_unverified=True)).solve(parse_problem(FAR_READ))
        assert report.solved
        assert not report.verified
        assert report.phase == "syntactic"

    def test_total_timeout(self, plus_one_problem, mocker):
        pipeline = SynrgPipeline(quick_config())
        mocker.patch.object(pipeline, "_remaining", return_value=-1.0)
        report = pipeline.solve(plus_one_problem)
        assert report.failure_reason is FailureReason.TOTAL_TIMEOUT
        assert report.iterations == []

    def test_missing_solver_falls_back_to_the_internal_backend(self, plus_one_problem):
        report = SynrgPipeline(quick_config(synth_backend=MISSING_SOLVER)).solve(plus_one_problem)
        assert report.solved

    def test_missing_solver_without_fallback(self, plus_one_problem):
        cfg = quick_config(synth_backend=MISSING_SOLVER, use_internal_fallback=False)
        report = SynrgPipeline(cfg).solve(plus_one_problem)
        assert report.failure_reason is FailureReason.BACKEND_UNAVAILABLE

    def test_template_query_runs_after_a_failed_fast_query(self, plus_one_problem, mocker):
        pipeline = SynrgPipeline(quick_config())
        real = pipeline.internal.synthesize
        calls = []

        def flaky(bp, grammars=None, timeout=1.0):
            calls.append(grammars)
            if grammars is None:
                return SynthOutcome(status=SynthStatus.TIMED_OUT)
            return real(bp, grammars, timeout)

        mocker.patch.object(pipeline.internal, "synthesize", side_effect=flaky)
        report = pipeline.solve(plus_one_problem)
        assert report.solved
        assert calls[0] is None
        assert set(calls[1]) == {"f"}
        assert Phase.SYNTHESIZE_TEMPLATE in phases(report)

    def test_parallel_synthesis_records_both_queries(self, plus_one_problem):
        report = SynrgPipeline(quick_config(parallel_synthesis=True)).solve(plus_one_problem)
        assert report.solved
        recorded = phases(report)
        assert Phase.SYNTHESIZE_FAST in recorded
        assert Phase.SYNTHESIZE_TEMPLATE in recorded

    def test_parallel_queries_share_one_fallback(self, plus_one_problem, caplog):
        pipeline = SynrgPipeline(quick_config(synth_backend=MISSING_SOLVER, parallel_synthesis=True))
        with caplog.at_level(logging.WARNING, logger="synrg.pipeline"):
            report = pipeline.solve(plus_one_problem)
        assert report.solved
        assert pipeline.external is None
        fallbacks = [r for r in caplog.records if "using the internal one" in r.getMessage()]
        assert len(fallbacks) == 1

    def test_report_serializes(self, plus_one_problem):
        report = SynrgPipeline(quick_config()).solve(plus_one_problem)
        dumped = json.loads(report.model_dump_json())
        assert dumped["outcome"] == "solved"
        assert isinstance(dumped["bindings"]["f"], str)

    @pytest.mark.slow
    def test_running_example_end_to_end(self, running_problem):
        report = solve(running_problem, PipelineConfig(bound=BoundConfig(b_start=2, b_max=3)))
        assert report.solved
        assert report.verified
        assert report.final_bound == 2
        assert report.quantifier_profile == "single"


@pytest.mark.contract
class TestSolveWithCandidate:
    BOUNDED = "(and (>= (select A 0) 0) (>= (select A 1) 0) (> c 0))"

    def test_syntactic_generalization_verifies(self, running_problem):
        candidate = parse_term(self.BOUNDED, INV_SCOPE)
        report = SynrgPipeline(quick_config()).solve_with_candidate(running_problem, 2, {"inv": candidate})
        assert report.solved
        assert report.phase == "syntactic"
        assert str(report.bindings["inv"]) == "(and (forall ((z!1 Int)) (>= (select A z!1) 0)) (> c 0))"

    def test_strict_matching_agrees(self, running_problem):
        candidate = parse_term(self.BOUNDED, INV_SCOPE)
        report = SynrgPipeline(quick_config(strict_matching=True)).solve_with_candidate(running_problem, 2, {"inv": candidate})
        assert report.phase == "syntactic"

    def test_wrong_candidate_fails(self, running_problem):
        candidate = parse_term("(> c 0)", INV_SCOPE)
        report = SynrgPipeline(quick_config()).solve_with_candidate(running_problem, 2, {"inv": candidate})
        assert not report.solved
        assert report.counterexamples

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["init_zero", "contains"])
    def test_synthesis_based_generalization(self, name, corpus_cases, corpus_problem):
        case = corpus_cases[name]
        problem = corpus_problem(name)
        fn = problem.functions[case.synth_fun]
        bounded = parse_term(case.bounded_candidate, dict(fn.params))
        report = SynrgPipeline().solve_with_candidate(problem, case.expected_bound, {fn.name: bounded})
        assert report.solved
        assert report.phase == "synthesis_based"
