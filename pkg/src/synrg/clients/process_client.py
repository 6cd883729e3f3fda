import contextlib
import logging
import os
import signal
import subprocess
import tempfile
from pathlib import Path

from ..types.solver_types import SolverSpec
from ..utilities.exceptions import BackendUnavailableError

logger = logging.getLogger(__name__)


class SolverProcessClient:
    """
    Runs solver queries as subprocesses.

    Each query is written to a temporary file and handed to the solver's
    command line. The solver runs in its own session so a timeout can kill it
    together with anything it spawned; the process is always reaped.
    """

    def __init__(self, spec: SolverSpec, missing_message: str, suffix: str):
        self.spec = spec
        self.missing_message = missing_message
        self.suffix = suffix

    @property
    def name(self) -> str:
        return Path(self.spec.command[0]).name

    def run(self, query: str, timeout: float) -> str | None:
        """The solver's stdout, or None when it ran out of time."""
        limit = min(timeout, self.spec.wall_timeout)
        with tempfile.TemporaryDirectory(prefix="synrg-") as tmp:
            path = Path(tmp) / f"query{self.suffix}"
            path.write_text(query, encoding="utf-8")
            argv = self.spec.argv(str(path))
            try:
                process = subprocess.Popen(
                    argv,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.PIPE,
                    text=True,
                    start_new_session=True,
                )
            except OSError as e:
                msg = f"{self.missing_message}: {argv[0]} ({e})"
                raise BackendUnavailableError(msg) from e
            try:
                stdout, stderr = process.communicate(timeout=limit)
            except subprocess.TimeoutExpired:
                _kill_group(process)
                process.communicate()
                logger.info("%s timed out after %.1fs", self.name, limit)
                return None
        if process.returncode != 0 and not stdout.strip():
            msg = f"{self.name} exited with status {process.returncode}: {stderr.strip()[:200]}"
            raise BackendUnavailableError(msg)
        return stdout


def _kill_group(process: subprocess.Popen[str]) -> None:
    with contextlib.suppress(ProcessLookupError, PermissionError):
        os.killpg(process.pid, signal.SIGKILL)
    with contextlib.suppress(ProcessLookupError):
        process.kill()
