from collections.abc import Sequence

from ...types.expressions import Expression, Sort, format_sort
from ...types.problem_types import Grammar, Problem, SynthFun
from ..constants import SMT_LOGIC
from ..exceptions import FormatError
from ..expressions import contains_quantifier, contains_synth_app


def _params(params: Sequence[tuple[str, Sort]]) -> str:
    return "(" + " ".join(f"({name} {format_sort(sort)})" for name, sort in params) + ")"


def print_grammar(grammar: Grammar) -> str:
    declarations = _params(grammar.nonterminals)
    rules = []
    for name, sort in grammar.nonterminals:
        if name not in grammar.productions:
            continue
        alternatives = " ".join(str(p) for p in grammar.productions[name])
        rules.append(f"({name} {format_sort(sort)} ({alternatives}))")
    return f"{declarations} ({' '.join(rules)})"


def print_synth_fun(fn: SynthFun) -> str:
    head = f"(synth-fun {fn.name} {_params(fn.params)} {format_sort(fn.return_sort)}"
    if fn.grammar is None:
        return head + ")"
    return f"{head}\n  {print_grammar(fn.grammar)})"


def print_define_fun(fn: SynthFun, body: Expression) -> str:
    return f"(define-fun {fn.name} {_params(fn.params)} {format_sort(fn.return_sort)} {body})"


def print_sygus(p: Problem, *, allow_quantifiers: bool = False) -> str:
    """Render `p` as SyGuS-IF. Quantified constraints need `allow_quantifiers`."""
    if not allow_quantifiers:
        for index, constraint in enumerate(p.constraints):
            if contains_quantifier(constraint):
                msg = f"constraint {index} is quantified; most SyGuS solvers reject it"
                raise FormatError(msg)
    lines = [f"(set-logic {p.logic})"]
    lines.extend(print_synth_fun(fn) for fn in p.synth_funs)
    lines.extend(f"(declare-var {name} {format_sort(sort)})" for name, sort in p.declared_vars)
    lines.extend(f"(constraint {c})" for c in p.constraints)
    lines.append("(check-synth)")
    return "\n".join(lines) + "\n"


def smtlib_assertions(decls: Sequence[tuple[str, Sort]], assertion: Expression) -> str:
    """Declarations and the single assertion, without logic or commands."""
    if contains_synth_app(assertion):
        msg = f"assertion still applies a function to synthesize: {assertion}"
        raise FormatError(msg)
    lines = [f"(declare-fun {name} () {format_sort(sort)})" for name, sort in decls]
    lines.append(f"(assert {assertion})")
    return "\n".join(lines) + "\n"


def print_smtlib_query(decls: Sequence[tuple[str, Sort]], assertion: Expression) -> str:
    return f"(set-logic {SMT_LOGIC})\n{smtlib_assertions(decls, assertion)}(check-sat)\n(get-model)\n"
