"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class StrucRamseyError(Exception):
    exit_code = 1
    code = "error"


class MalformedInput(StrucRamseyError, ValueError):
    """Input document or argument does not parse or validate."""

    exit_code = 2
    code = "malformed"

    def __init__(self, message, position=None):
        if position:
            message = f"{position}: {message}"
        super().__init__(message)
        self.position = position


class SignatureMismatch(MalformedInput):
    code = "signature-mismatch"


class DegenerateInput(StrucRamseyError):
    exit_code = 4
    code = "degenerate"


class BudgetExceeded(StrucRamseyError):
    """A configured combinatorial cap was hit before the computation finished."""

    exit_code = 5

    def __init__(self, message, code="budget", limit=None, needed=None):
        super().__init__(message)
        self.code = code
        self.limit = limit
        self.needed = needed


class FragmentIncomplete(StrucRamseyError):
    """A map left the finite fragment it was supposed to stay inside."""

    exit_code = 4
    code = "fragment-incomplete"


class ConsistencyAlarm(StrucRamseyError):
    """An internal invariant that verified inputs guarantee did not hold."""

    code = "consistency-alarm"
