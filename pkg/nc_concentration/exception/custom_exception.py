import sys
import traceback
from typing import Any, Optional, cast


class ConcentrationError(Exception):
    """Root of every error raised by the library.

    Resolves the originating location from ``error_details`` (the ``sys`` module,
    an exception object, or the active exception context) so log lines point at
    the frame that failed rather than at the ``raise`` site of the wrapper.
    """

    code = "concentration_error"

    def __init__(self, error_message, error_details: Optional[object] = None):
        norm_msg = str(error_message)

        exc_type = exc_value = exc_tb = None
        if error_details is None:
            exc_type, exc_value, exc_tb = sys.exc_info()
        elif hasattr(error_details, "exc_info"):
            exc_info_obj = cast(Any, error_details)
            exc_type, exc_value, exc_tb = exc_info_obj.exc_info()
        elif isinstance(error_details, BaseException):
            exc_type, exc_value, exc_tb = type(error_details), error_details, error_details.__traceback__
        else:
            exc_type, exc_value, exc_tb = sys.exc_info()

        # Walk to the last frame to report the most relevant location
        last_tb = exc_tb
        while last_tb and last_tb.tb_next:
            last_tb = last_tb.tb_next

        self.file_name = last_tb.tb_frame.f_code.co_filename if last_tb else "<unknown>"
        self.lineno = last_tb.tb_lineno if last_tb else -1
        self.error_message = norm_msg

        if exc_type and exc_tb:
            self.traceback_str = "".join(traceback.format_exception(exc_type, exc_value, exc_tb))
        else:
            self.traceback_str = ""

        super().__init__(self.__str__())

    def __str__(self):
        base = f"Error in [{self.file_name}] at line [{self.lineno}] | Message: {self.error_message}"
        if self.traceback_str:
            return f"{base}\nTraceback:\n{self.traceback_str}"
        return base

    def __repr__(self):
        return (
            f"{type(self).__name__}(file={self.file_name!r}, line={self.lineno}, "
            f"message={self.error_message!r})"
        )

    def to_record(self) -> dict:
        """Machine-readable form used in command-line error reports."""
        return {"code": self.code, "message": self.error_message}


class InputError(ConcentrationError, ValueError):
    """Malformed or non-finite input data."""

    code = "input_error"


class ParameterError(ConcentrationError, ValueError):
    """A parameter lies outside its admissible range."""

    code = "parameter_error"


class DomainError(ConcentrationError, ValueError):
    """An argument lies outside the mathematical domain of the function."""

    code = "domain_error"


class DegenerateError(ConcentrationError, ArithmeticError):
    """The quantity is undefined for this configuration (0/0, empty set)."""

    code = "degenerate_error"


class PreconditionError(ConcentrationError):
    """A hypothesis of the inequality being evaluated does not hold."""

    code = "precondition_error"

    def __init__(self, error_message, hypothesis: str = "", error_details: Optional[object] = None):
        self.hypothesis = hypothesis
        super().__init__(error_message, error_details)

    def to_record(self) -> dict:
        record = super().to_record()
        if self.hypothesis:
            record["hypothesis"] = self.hypothesis
        return record


class DimensionError(ConcentrationError, ValueError):
    code = "dimension_error"


class WindowError(ConcentrationError):
    """The log-MGF is not finite somewhere on the Legendre search window."""

    code = "window_error"


class BudgetError(ConcentrationError):
    """Exhaustive enumeration would exceed the configured budget."""

    code = "budget_error"


class FitError(ConcentrationError):
    code = "fit_error"


class DominanceViolation(ConcentrationError, AssertionError):
    """A Monte Carlo estimate exceeds a closed-form bound."""

    code = "dominance_violation"

    def __init__(self, error_message, violations: list[tuple[float, str]] | None = None,
                 error_details: Optional[object] = None):
        self.violations = list(violations or [])
        super().__init__(error_message, error_details)

    def to_record(self) -> dict:
        record = super().to_record()
        record["violations"] = [{"t": t, "bound": kind} for t, kind in self.violations]
        return record


class UsageError(ConcentrationError):
    """Bad command-line usage; maps to exit status 2."""

    code = "usage_error"
