import pytest
from pydantic import ValidationError

from synrg.types.pipeline_types import PipelineConfig
from synrg.types.problem_types import BoundConfig
from synrg.types.solver_types import SolverKind, SolverSpec
from synrg.utilities.config import get_solver_spec, solver_from_command, solver_from_env
from synrg.utilities.constants import ENV_SMT_SOLVER, ENV_SYNTH_SOLVER, VERIFY_TIMEOUT

pytestmark = pytest.mark.contract


class TestSolverSpecs:
    def test_known_backends(self):
        assert get_solver_spec("cvc5", SolverKind.SYNTHESIS).command == ("cvc5", "--lang=sygus2")
        assert get_solver_spec("z3", SolverKind.SMT).kind is SolverKind.SMT

    def test_unknown_backend(self):
        with pytest.raises(ValueError, match="Unknown synthesis backend: z3"):
            get_solver_spec("z3", SolverKind.SYNTHESIS)

    def test_full_command_line(self):
        spec = solver_from_command("/opt/z3/bin/z3 -smt2 -T:5", SolverKind.SMT)
        assert spec.command == ("/opt/z3/bin/z3", "-smt2", "-T:5")
        assert spec.wall_timeout == VERIFY_TIMEOUT

    def test_name_is_looked_up(self):
        assert solver_from_command("cvc4", SolverKind.SYNTHESIS) == get_solver_spec("cvc4", SolverKind.SYNTHESIS)

    def test_environment(self, monkeypatch):
        monkeypatch.setenv(ENV_SYNTH_SOLVER, "cvc5")
        monkeypatch.setenv(ENV_SMT_SOLVER, "  ")
        assert solver_from_env(SolverKind.SYNTHESIS) == get_solver_spec("cvc5", SolverKind.SYNTHESIS)
        assert solver_from_env(SolverKind.SMT) is None

    def test_query_path_placement(self):
        appended = SolverSpec(command=("z3", "-smt2"), kind=SolverKind.SMT)
        templated = SolverSpec(command=("wrapper", "--input={file}", "--quiet"), kind=SolverKind.SMT)
        assert appended.argv("/tmp/q.smt2") == ["z3", "-smt2", "/tmp/q.smt2"]
        assert templated.argv("/tmp/q.smt2") == ["wrapper", "--input=/tmp/q.smt2", "--quiet"]

    def test_command_must_name_an_executable(self):
        with pytest.raises(ValidationError):
            SolverSpec(command=(), kind=SolverKind.SMT)


class TestBoundConfig:
    @pytest.mark.parametrize(
        ("start", "stop", "step", "expected"),
        [
            (2, 8, 1, [2, 3, 4, 5, 6, 7, 8]),
            (2, 7, 2, [2, 4, 6, 7]),
            (3, 3, 1, [3]),
        ],
    )
    def test_schedule(self, start, stop, step, expected):
        assert BoundConfig(b_start=start, b_max=stop, step=step).schedule() == expected

    def test_empty_range(self):
        with pytest.raises(ValidationError, match="exceeds b_max"):
            BoundConfig(b_start=4, b_max=3)


class TestPipelineConfig:
    def test_defaults(self):
        cfg = PipelineConfig()
        assert cfg.bound.schedule()[0] == 2
        assert cfg.synth_backend is None
        assert cfg.use_internal_fallback

    @pytest.mark.parametrize(
        "settings",
        [
            {"fast_synth_timeout": 20, "template_synth_timeout": 10},
            {"template_synth_timeout": 400, "total_timeout": 300},
            {"enumeration_window": (2, -2)},
            {"verify_timeout": 0},
        ],
    )
    def test_invalid_settings(self, settings):
        with pytest.raises(ValidationError):
            PipelineConfig(**settings)
