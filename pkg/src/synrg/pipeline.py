"""
The restriction/generalization loop.

For each bound the quantified problem is restricted to arrays of that
length, a bounded solution is synthesized, generalized back to quantified
form and verified against the original problem. Bounds grow until a verified
solution is found, the schedule runs out or the time budget is spent.
"""

import logging
import threading
import time
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

from .clients.enumerative_client import EnumerativeSynthesizer
from .clients.smt_client import BaseSmtClient, SmtSolverClient, Z3Client
from .clients.sygus_client import SygusSolverClient
from .types.expressions import Expression, conjoin
from .types.pipeline_types import (
    FailureReason,
    IterationRecord,
    Phase,
    PhaseRecord,
    PipelineConfig,
    RunReport,
)
from .types.problem_types import BoundedProblem, FragmentReport, Grammar, Problem
from .types.solver_types import SynthOutcome, SynthStatus, VerifyOutcome, VerifyStatus
from .utilities.exceptions import BackendUnavailableError
from .utilities.expressions import FreshNames, quantifier_profile
from .utilities.fragment import analyze_problem
from .utilities.generalization import syntactic_generalize
from .utilities.grammars import build_generalization_grammar, build_template_grammar
from .utilities.restriction import restrict_spec

logger = logging.getLogger(__name__)


class _Unsolved(Exception):
    def __init__(self, reason: FailureReason):
        super().__init__(reason)
        self.reason = reason


@dataclass
class _RunState:
    fragment: FragmentReport | None = None
    iterations: list[IterationRecord] = field(default_factory=list)
    counterexamples: list[dict[str, str]] = field(default_factory=list)
    phase: Literal["syntactic", "synthesis_based"] | None = None
    started: float = field(default_factory=time.monotonic)


class SynrgPipeline:
    def __init__(self, config: PipelineConfig | None = None):
        self.config = config or PipelineConfig()
        self.internal = EnumerativeSynthesizer(window=self.config.enumeration_window)
        self.external = SygusSolverClient(self.config.synth_backend, self.config.enumeration_window) if self.config.synth_backend else None
        self.verifier: BaseSmtClient = SmtSolverClient(self.config.smt_backend) if self.config.smt_backend else Z3Client()
        self.deadline = 0.0
        self._backend_lock = threading.Lock()

    def _remaining(self) -> float:
        return self.deadline - time.monotonic()

    def _fall_back(self, what: str, error: BackendUnavailableError) -> None:
        if not self.config.use_internal_fallback:
            logger.error("%s backend unavailable: %s", what, error)
            raise _Unsolved(FailureReason.BACKEND_UNAVAILABLE) from error
        logger.warning("%s backend unavailable, using the internal one: %s", what, error)

    def synthesize(self, bp: BoundedProblem, grammars: Mapping[str, Grammar] | None, timeout: float) -> SynthOutcome:
        """Bounded synthesis on the configured backend, degrading to the internal one."""
        with self._backend_lock:
            external = self.external
        if external is not None:
            try:
                return external.synthesize(bp, grammars, timeout)
            except BackendUnavailableError as e:
                # both parallel queries can fail on the same backend; the first one records it
                with self._backend_lock:
                    if self.external is external:
                        self._fall_back("synthesis", e)
                        self.external = None
        return self.internal.synthesize(bp, grammars, timeout)

    def verify(self, problem: Problem, bindings: Mapping[str, Expression]) -> VerifyOutcome:
        timeout = max(min(self.config.verify_timeout, self._remaining()), 0.001)
        try:
            return self.verifier.verify(problem, bindings, timeout)
        except BackendUnavailableError as e:
            self._fall_back("SMT", e)
            self.verifier = Z3Client()
            return self.verifier.verify(problem, bindings, timeout)

    def _timed_synthesis(
        self,
        phase: Phase,
        bp: BoundedProblem,
        grammars: Mapping[str, Grammar] | None,
        timeout: float,
    ) -> tuple[PhaseRecord, SynthOutcome]:
        started = time.monotonic()
        outcome = self.synthesize(bp, grammars, min(timeout, max(self._remaining(), 0.001)))
        candidate = _describe(outcome.bindings) or None
        record = PhaseRecord(
            phase=phase,
            outcome=str(outcome.status),
            elapsed=time.monotonic() - started,
            candidate=candidate,
            detail=f"{outcome.backend}, {outcome.candidates_tried} candidates",
        )
        logger.info("b=%s %s: %s in %.2fs", bp.bound, phase, outcome.status, record.elapsed)
        return record, outcome

    def synthesize_bounded(self, bp: BoundedProblem, iteration: IterationRecord) -> SynthOutcome:
        """The fast query without a template, then the templated one."""
        templates = {fn.name: fn.grammar or build_template_grammar(fn, bp.bound) for fn in bp.synth_funs}
        cfg = self.config
        if cfg.parallel_synthesis:
            with ThreadPoolExecutor(max_workers=2) as pool:
                fast = pool.submit(self._timed_synthesis, Phase.SYNTHESIZE_FAST, bp, None, cfg.fast_synth_timeout)
                templated = pool.submit(
                    self._timed_synthesis, Phase.SYNTHESIZE_TEMPLATE, bp, templates, cfg.template_synth_timeout
                )
                results = [fast.result(), templated.result()]
            iteration.phases.extend(record for record, _ in results)
            solved = [outcome for _, outcome in results if outcome.solved]
            return solved[0] if solved else results[-1][1]
        record, outcome = self._timed_synthesis(Phase.SYNTHESIZE_FAST, bp, None, cfg.fast_synth_timeout)
        iteration.phases.append(record)
        if outcome.solved or outcome.status is SynthStatus.INFEASIBLE or self._remaining() <= 0:
            return outcome
        record, outcome = self._timed_synthesis(Phase.SYNTHESIZE_TEMPLATE, bp, templates, cfg.template_synth_timeout)
        iteration.phases.append(record)
        return outcome

    def generalize(
        self,
        problem: Problem,
        bound: int,
        bindings: Mapping[str, Expression],
        iteration: IterationRecord,
        state: _RunState,
    ) -> dict[str, Expression] | None:
        """
        Generalize a bounded solution and verify it, first syntactically, then
        by searching the grammar seeded with the generalized candidate.
        Returns verified bindings, or None.
        """
        cfg = self.config
        equivalent = self.verifier.equivalent if cfg.strict_matching else None
        fresh = FreshNames(start=1)
        started = time.monotonic()
        generalized = {
            name: syntactic_generalize(body, bound, fresh=fresh, equivalent=equivalent) for name, body in bindings.items()
        }
        outcome = self.verify(problem, generalized)
        iteration.phases.append(
            PhaseRecord(
                phase=Phase.SYNTACTIC,
                outcome=str(outcome.status),
                elapsed=time.monotonic() - started,
                candidate=_describe(generalized),
                detail=outcome.reason,
            )
        )
        logger.info("b=%s syntactic generalization: %s", bound, outcome.status)
        if outcome.valid:
            state.phase = "syntactic"
            return generalized
        if outcome.status is VerifyStatus.COUNTEREXAMPLE and outcome.model is not None:
            state.counterexamples.append({name: str(value) for name, value in outcome.model.items()})
        if self._remaining() <= 0:
            return None
        if len(problem.synth_funs) != 1:
            logger.info("synthesis-based generalization needs a single function to synthesize")
            return None
        fn = problem.synth_funs[0]
        grammar = build_generalization_grammar(generalized[fn.name], fn)
        started = time.monotonic()
        trace = logging.getLogger("synrg.utilities.generalization")

        def on_candidate(candidate: Expression, status: str) -> None:
            trace.debug("synthesis-based candidate %s: %s", candidate, status)

        try:
            search = self.internal.search_generalization(
                problem,
                grammar,
                bound=bound,
                timeout=self._remaining(),
                verifier=self.verifier,
                verify_timeout=cfg.verify_timeout,
                candidate_cap=cfg.generalization_candidate_cap,
                size_cap=cfg.generalization_size_cap,
                on_candidate=on_candidate,
            )
        except BackendUnavailableError as e:
            self._fall_back("SMT", e)
            self.verifier = Z3Client()
            return self.generalize(problem, bound, bindings, iteration, state)
        iteration.phases.append(
            PhaseRecord(
                phase=Phase.SYNTHESIS_BASED,
                outcome=str(VerifyStatus.VALID) if search.solved else str(search.status),
                elapsed=time.monotonic() - started,
                candidate=_describe(search.bindings) if search.solved else None,
                detail=f"{search.candidates_tried} candidates",
            )
        )
        logger.info("b=%s synthesis-based generalization: %s", bound, search.status)
        if search.solved:
            state.phase = "synthesis_based"
            return dict(search.bindings)
        return None

    def _report(self, state: _RunState, **fields: object) -> RunReport:
        bindings = fields.get("bindings")
        profile = quantifier_profile(conjoin(list(bindings.values()))) if isinstance(bindings, dict) else None
        return RunReport.model_validate(
            {
                "iterations": state.iterations,
                "fragment": state.fragment,
                "phase": state.phase,
                "counterexamples": state.counterexamples,
                "quantifier_profile": profile,
                "elapsed": time.monotonic() - state.started,
                **fields,
            }
        )

    def _failed(self, state: _RunState, reason: FailureReason) -> RunReport:
        logger.info("no solution: %s", reason)
        return self._report(state, outcome="failed", failure_reason=reason, phase=None)

    def _begin(self, problem: Problem) -> _RunState:
        self.deadline = time.monotonic() + self.config.total_timeout
        return _RunState(fragment=analyze_problem(problem))

    def solve(self, problem: Problem) -> RunReport:
        """Run the loop over the bound schedule."""
        state = self._begin(problem)
        unverified: tuple[int, dict[str, Expression]] | None = None
        try:
            for bound in self.config.bound.schedule():
                if self._remaining() <= 0:
                    return self._failed(state, FailureReason.TOTAL_TIMEOUT)
                iteration = IterationRecord(bound=bound)
                state.iterations.append(iteration)
                started = time.monotonic()
                bp = restrict_spec(problem, bound)
                iteration.phases.append(
                    PhaseRecord(
                        phase=Phase.RESTRICT,
                        outcome="ok",
                        elapsed=time.monotonic() - started,
                        detail=f"{len(bp.constraints)} constraints",
                    )
                )
                outcome = self.synthesize_bounded(bp, iteration)
                if not outcome.solved:
                    continue
                if unverified is None:
                    unverified = (bound, dict(outcome.bindings))
                solution = self.generalize(problem, bound, outcome.bindings, iteration, state)
                if solution is not None:
                    return self._report(state, outcome="solved", bindings=solution, verified=True, final_bound=bound)
        except _Unsolved as e:
            return self._failed(state, e.reason)
        if self._remaining() <= 0:
            return self._failed(state, FailureReason.TOTAL_TIMEOUT)
        if self.config.accept_unverified and unverified is not None:
            bound, bindings = unverified
            logger.warning("returning an unverified solution found at b=%s", bound)
            generalized = {name: syntactic_generalize(body, bound) for name, body in bindings.items()}
            return self._report(
                state, outcome="solved", bindings=generalized, verified=False, final_bound=bound, phase="syntactic"
            )
        return self._failed(state, FailureReason.BOUND_EXHAUSTED)

    def solve_with_candidate(self, problem: Problem, bound: int, bindings: Mapping[str, Expression]) -> RunReport:
        """Generalize and verify a given bounded solution, skipping bounded synthesis."""
        state = self._begin(problem)
        iteration = IterationRecord(bound=bound)
        state.iterations.append(iteration)
        try:
            solution = self.generalize(problem, bound, bindings, iteration, state)
        except _Unsolved as e:
            return self._failed(state, e.reason)
        if solution is None:
            return self._failed(
                state, FailureReason.TOTAL_TIMEOUT if self._remaining() <= 0 else FailureReason.BOUND_EXHAUSTED
            )
        return self._report(state, outcome="solved", bindings=solution, verified=True, final_bound=bound)


def _describe(bindings: Mapping[str, Expression]) -> str:
    return "; ".join(f"{name} = {body}" for name, body in bindings.items())


def solve(problem: Problem, config: PipelineConfig | None = None) -> RunReport:
    return SynrgPipeline(config).solve(problem)
