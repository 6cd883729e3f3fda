import os
import shlex

from ..types.solver_types import SolverKind, SolverSpec
from .constants import ENV_SMT_SOLVER, ENV_SYNTH_SOLVER, TEMPLATE_SYNTH_TIMEOUT, VERIFY_TIMEOUT

SYNTH_SOLVERS = {
    "cvc5": SolverSpec(command=("cvc5", "--lang=sygus2"), kind=SolverKind.SYNTHESIS, wall_timeout=TEMPLATE_SYNTH_TIMEOUT),
    "cvc4": SolverSpec(command=("cvc4", "--lang=sygus2"), kind=SolverKind.SYNTHESIS, wall_timeout=TEMPLATE_SYNTH_TIMEOUT),
}

SMT_SOLVERS = {
    "z3": SolverSpec(command=("z3", "-smt2"), kind=SolverKind.SMT, wall_timeout=VERIFY_TIMEOUT),
    "cvc5": SolverSpec(command=("cvc5", "--lang=smt2", "--produce-models"), kind=SolverKind.SMT, wall_timeout=VERIFY_TIMEOUT),
    "cvc4": SolverSpec(command=("cvc4", "--lang=smt2", "--produce-models"), kind=SolverKind.SMT, wall_timeout=VERIFY_TIMEOUT),
}


def get_solver_spec(name: str, kind: SolverKind) -> SolverSpec:
    """Get the default launch spec for a named backend."""
    table = SYNTH_SOLVERS if kind is SolverKind.SYNTHESIS else SMT_SOLVERS
    spec = table.get(name)
    if spec is None:
        msg = f"Unknown {kind} backend: {name} (known: {', '.join(sorted(table))})"
        raise ValueError(msg)

    return spec


def solver_from_command(command: str, kind: SolverKind) -> SolverSpec:
    """A backend name from the tables above, or a full command line."""
    parts = shlex.split(command)
    if len(parts) == 1 and parts[0] in (SYNTH_SOLVERS if kind is SolverKind.SYNTHESIS else SMT_SOLVERS):
        return get_solver_spec(parts[0], kind)
    timeout = TEMPLATE_SYNTH_TIMEOUT if kind is SolverKind.SYNTHESIS else VERIFY_TIMEOUT
    return SolverSpec(command=tuple(parts), kind=kind, wall_timeout=timeout)


def solver_from_env(kind: SolverKind) -> SolverSpec | None:
    """The backend named by SYNRG_SYNTH_SOLVER or SYNRG_SMT_SOLVER, if set."""
    value = os.environ.get(ENV_SYNTH_SOLVER if kind is SolverKind.SYNTHESIS else ENV_SMT_SOLVER, "").strip()
    if not value:
        return None

    return solver_from_command(value, kind)
