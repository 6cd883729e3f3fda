import json

import pytest

from synrg.cli import EXIT_FAILED, EXIT_INPUT_ERROR, EXIT_SOLVED, build_parser, config_from_args, main
from synrg.types.solver_types import SolverKind

PLUS_ONE = "(synth-fun f ((x Int)) Int)\n(declare-var x Int)\n(constraint (= (f x) (+ x 1)))\n(check-synth)\n"

QUICK = ["--internal-only", "--bound-start", "2", "--bound-max", "2", "--fast-timeout", "5", "--template-timeout", "10"]


@pytest.fixture
def plus_one_file(tmp_path):
    path = tmp_path / "plus_one.sl"
    path.write_text(PLUS_ONE, encoding="utf-8")
    return path


@pytest.mark.contract
class TestSolveCommand:
    def test_prints_definitions(self, plus_one_file, capsys):
        assert main(["solve", str(plus_one_file), *QUICK]) == EXIT_SOLVED
        out = capsys.readouterr().out
        assert out.startswith("(define-fun f ((x Int)) Int ")

    def test_json_report(self, plus_one_file, capsys):
        assert main(["solve", str(plus_one_file), *QUICK, "--json"]) == EXIT_SOLVED
        out = capsys.readouterr().out
        definitions, _, report_text = out.partition("{")
        assert definitions.startswith("(define-fun f ((x Int)) Int ")
        report = json.loads("{" + report_text)
        assert report["outcome"] == "solved"
        assert report["final_bound"] == 2

    def test_json_report_without_a_solution(self, tmp_path, capsys):
        path = tmp_path / "false.sl"
        path.write_text("(synth-fun f ((x Int)) Int)\n(declare-var x Int)\n(constraint false)\n", encoding="utf-8")
        assert main(["solve", str(path), *QUICK, "--json"]) == EXIT_FAILED
        captured = capsys.readouterr()
        assert json.loads(captured.out)["outcome"] == "failed"
        assert "no solution" in captured.err

    def test_emit_bounded(self, plus_one_file, tmp_path):
        target = tmp_path / "bounded.sl"
        main(["solve", str(plus_one_file), *QUICK, "--emit-bounded", str(target)])
        assert "(constraint (= (f x) (+ x 1)))" in target.read_text(encoding="utf-8")

    def test_fragment_report_goes_to_stderr(self, plus_one_file, capsys):
        main(["solve", str(plus_one_file), *QUICK, "--fragment-report"])
        captured = capsys.readouterr()
        assert "index_set" in captured.err
        assert "index_set" not in captured.out

    def test_no_solution(self, tmp_path, capsys):
        path = tmp_path / "false.sl"
        path.write_text("(synth-fun f ((x Int)) Int)\n(declare-var x Int)\n(constraint false)\n", encoding="utf-8")
        assert main(["solve", str(path), *QUICK]) == EXIT_FAILED
        assert "synrg: no solution (bound_exhausted)" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["solve", str(tmp_path / "missing.sl"), *QUICK]) == EXIT_INPUT_ERROR
        assert "missing.sl" in capsys.readouterr().err

    def test_unreadable_problem(self, tmp_path):
        path = tmp_path / "bad.sl"
        path.write_text("(declare-var x Real)\n", encoding="utf-8")
        assert main(["solve", str(path), *QUICK]) == EXIT_INPUT_ERROR

    def test_invalid_bounds(self, plus_one_file, capsys):
        assert main(["solve", str(plus_one_file), "--internal-only", "--bound-start", "5", "--bound-max", "2"]) == EXIT_INPUT_ERROR
        assert "synrg: invalid settings" in capsys.readouterr().err


@pytest.mark.contract
class TestBenchCommand:
    def test_empty_directory(self, tmp_path, capsys):
        assert main(["bench", str(tmp_path), *QUICK]) == EXIT_SOLVED
        assert "total: 0 benchmarks" in capsys.readouterr().out

    def test_missing_directory(self, tmp_path):
        assert main(["bench", str(tmp_path / "nowhere"), *QUICK]) == EXIT_INPUT_ERROR


@pytest.mark.contract
class TestConfigFromArgs:
    def test_solver_flags_override_the_environment(self, monkeypatch):
        monkeypatch.setenv("SYNRG_SYNTH_SOLVER", "cvc4")
        args = build_parser().parse_args(["solve", "x.sl", "--synth-solver", "cvc5", "--smt-solver", "z3 -smt2 -T:3"])
        cfg = config_from_args(args)
        assert cfg.synth_backend.command[0] == "cvc5"
        assert cfg.smt_backend.command == ("z3", "-smt2", "-T:3")
        assert cfg.smt_backend.kind is SolverKind.SMT

    def test_internal_only_ignores_the_environment(self, monkeypatch):
        monkeypatch.setenv("SYNRG_SYNTH_SOLVER", "cvc5")
        cfg = config_from_args(build_parser().parse_args(["solve", "x.sl", "--internal-only", "--no-fallback"]))
        assert cfg.synth_backend is None
        assert not cfg.use_internal_fallback
