"""Exception and warning types raised across the package."""


class HqcwError(Exception):
    """Base class for all package-specific errors."""


class ConnectivityFailure(HqcwError, RuntimeError):
    """Raised when no connected graph sample was found within max_attempts."""


class ParseError(HqcwError, ValueError):
    """Raised on malformed input files; message carries path and line number."""

    def __init__(self, path, line_number, message):
        self.path = str(path)
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


class InvalidAlpha(HqcwError, ValueError):
    """Raised when the classicality parameter is outside its permitted range."""


class TimestepTooLarge(HqcwError, ValueError):
    """Raised when the per-step total jump probability reaches 0.5."""


class TrajectoryTimeout(UserWarning):
    """Warned when the safety time cap is hit before the requested jump count.

    The truncated trajectory is still returned; its ``timed_out`` flag is set.
    """


class NonFiniteLoss(HqcwError, ArithmeticError):
    """Raised when embedding training produces a non-finite loss value."""


class DegenerateInput(HqcwError, ValueError):
    """Raised when clustering input has fewer distinct points than clusters."""


class LengthMismatch(HqcwError, ValueError):
    """Raised when two label sequences of unequal length are compared."""


class InvariantViolation(HqcwError, RuntimeError):
    """Raised when a numerical invariant (e.g. trace preservation) is broken."""
