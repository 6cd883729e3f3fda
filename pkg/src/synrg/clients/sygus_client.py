import logging
from collections.abc import Mapping

from ..types.expressions import Expression, conjoin
from ..types.problem_types import BoundedProblem, Grammar
from ..types.solver_types import SolverSpec, SynthOutcome, SynthStatus
from ..utilities.constants import ENUMERATION_WINDOW, SYNTH_SOLVER_MISSING, TEMPLATE_SYNTH_TIMEOUT
from ..utilities.evaluation import find_counterexample
from ..utilities.expressions import inline_synth_funs
from ..utilities.sygus.printer import print_sygus
from ..utilities.sygus.replies import parse_reply
from .process_client import SolverProcessClient

logger = logging.getLogger(__name__)


class SygusSolverClient:
    """An external SyGuS-IF solver run as a subprocess on bounded problems."""

    def __init__(self, spec: SolverSpec, window: tuple[int, int] = ENUMERATION_WINDOW):
        self.process = SolverProcessClient(spec, SYNTH_SOLVER_MISSING, suffix=".sl")
        self.window = window

    @property
    def name(self) -> str:
        return self.process.name

    def synthesize(
        self,
        bp: BoundedProblem,
        grammars: Mapping[str, Grammar] | None = None,
        timeout: float = TEMPLATE_SYNTH_TIMEOUT,
    ) -> SynthOutcome:
        """
        Send the bounded problem, with `grammars` attached when given, and
        read back the definitions. Definitions that fail the bounded
        constraints on the counterexample window are not trusted.
        """
        problem = bp.as_problem()
        if grammars:
            problem = problem.with_grammars(grammars)
        stdout = self.process.run(print_sygus(problem), timeout)
        if stdout is None:
            return SynthOutcome(status=SynthStatus.TIMED_OUT, backend=self.name)
        reply = parse_reply(stdout, problem.synth_funs)
        match reply.kind:
            case "define_funs":
                bindings = {d.name: d.body for d in reply.definitions}
                if not self._sound(bp, bindings):
                    return SynthOutcome(status=SynthStatus.UNKNOWN, backend=self.name)
                return SynthOutcome(status=SynthStatus.SOLVED, bindings=bindings, backend=self.name)
            case "unsat":
                return SynthOutcome(status=SynthStatus.INFEASIBLE, backend=self.name)
            case "malformed":
                logger.warning("%s gave an unreadable answer: %s", self.name, reply.reason)
        return SynthOutcome(status=SynthStatus.UNKNOWN, backend=self.name)

    def _sound(self, bp: BoundedProblem, bindings: Mapping[str, Expression]) -> bool:
        definitions = bp.base.definitions(bindings)
        formula = conjoin([inline_synth_funs(c, definitions) for c in bp.constraints])
        counterexample = find_counterexample(formula, bp.declared_vars, bp.bound, self.window)
        if counterexample is not None:
            logger.warning("%s returned a solution refuted by %s; discarding it", self.name, counterexample)
            return False
        return True
