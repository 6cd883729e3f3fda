class SynrgError(Exception):
    """Root of every error raised by synrg."""


class SortError(SynrgError):
    pass


class InputError(SynrgError):
    """Input that synrg cannot read; the CLI maps it to exit code 4."""


class ParseError(InputError):
    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnsupportedError(InputError):
    """Well-formed input that uses a construct outside the supported theory."""


class FormatError(SynrgError):
    pass


class NotSkolemizableError(SynrgError):
    """An existential sits under a universal and cannot be replaced by a constant."""


class EmptyIndexSetError(SynrgError):
    pass


class BackendUnavailableError(SynrgError):
    """The solver executable is missing, not runnable, or crashed before answering."""


class OracleTooLargeError(SynrgError):
    pass
