"""
Loop invariant problems.

A loop is given by a precondition `init` over the pre-state variables, a
transition relation `trans` over pre- and post-state variables and a
postcondition `post`. An invariant `inv` must hold initially, be preserved
by every transition and imply the postcondition.
"""

from collections.abc import Sequence

from ..types.expressions import Expression, Sort, SynthApp, Var, and_, implies
from ..types.problem_types import Problem, SynthFun


def _apply(inv: SynthFun, args: Sequence[Var]) -> SynthApp:
    if len(args) != len(inv.params):
        msg = f"{inv.name} takes {len(inv.params)} arguments, got {len(args)}"
        raise ValueError(msg)
    for (param, sort), arg in zip(inv.params, args, strict=True):
        if arg.sort is not sort:
            msg = f"argument {arg.name} for parameter {param} of {inv.name} has sort {arg.sort}, expected {sort}"
            raise ValueError(msg)
    return SynthApp(fun=inv.name, args=tuple(args), return_sort=Sort.BOOL)


def invariant_constraints(
    inv: SynthFun,
    init: Expression,
    trans: Expression,
    post: Expression,
    pre_vars: Sequence[Var],
    post_vars: Sequence[Var],
) -> tuple[Expression, Expression, Expression]:
    """
    The constraints `init => inv`, `inv /\\ trans => inv'` and `inv => post`.

    `pre_vars` and `post_vars` are the arguments of `inv` before and after a
    transition, in parameter order.
    """
    if inv.return_sort is not Sort.BOOL:
        msg = f"invariant {inv.name} must return Bool"
        raise ValueError(msg)
    before = _apply(inv, pre_vars)
    after = _apply(inv, post_vars)
    return (
        implies(init, before),
        implies(and_(before, trans), after),
        implies(before, post),
    )


def invariant_problem(
    inv: SynthFun,
    init: Expression,
    trans: Expression,
    post: Expression,
    pre_vars: Sequence[Var],
    post_vars: Sequence[Var],
    extra_vars: Sequence[Var] = (),
) -> Problem:
    """A problem synthesizing `inv`; declares the state variables and `extra_vars`."""
    declared: dict[str, Sort] = {}
    for var in (*pre_vars, *post_vars, *extra_vars):
        if declared.setdefault(var.name, var.sort) is not var.sort:
            msg = f"variable {var.name} used with sorts {declared[var.name]} and {var.sort}"
            raise ValueError(msg)
    return Problem(
        declared_vars=tuple(declared.items()),
        synth_funs=(inv,),
        constraints=invariant_constraints(inv, init, trans, post, pre_vars, post_vars),
    )
