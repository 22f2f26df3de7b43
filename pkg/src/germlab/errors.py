"""Exception hierarchy shared across the package.

Every error carries a machine-readable ``code`` so the CLI can emit
structured error objects and pick the right exit status.
"""

from __future__ import annotations


class GermLabError(Exception):
    """Base class; ``code`` is a stable machine-readable identifier."""

    code = "ERROR"
    exit_status = 1

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def as_json(self) -> dict:
        obj = {"code": self.code, "message": self.message}
        if self.details:
            obj["details"] = {k: v for k, v in sorted(self.details.items())}
        return obj


class PolyParseError(GermLabError):
    code = "POLY_SYNTAX"

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(message, position=position)
        self.position = position
        self.text = text

    def __str__(self):
        return f"{self.message} (at position {self.position})"


class UnknownVariableError(PolyParseError):
    code = "UNKNOWN_VARIABLE"


class NegativeExponentError(PolyParseError):
    code = "NEGATIVE_EXPONENT"


class SubstitutionError(GermLabError):
    code = "SUBSTITUTION_CONFLICT"


class DimensionMismatchError(GermLabError):
    code = "DIMENSION_MISMATCH"


class CapExceededError(GermLabError):
    code = "CAP_EXCEEDED"


class NotIsolatedError(GermLabError):
    code = "NOT_ISOLATED"


class NotFiniteError(GermLabError):
    code = "INFINITE"


class NonIntegerResultError(GermLabError):
    code = "NON_INTEGER_RESULT"
    exit_status = 2


class NonIntegerMultiplicityError(GermLabError):
    code = "NON_INTEGER_MULTIPLICITY"
    exit_status = 2


class NonIntegerOrbitCountError(GermLabError):
    code = "NON_INTEGER_ORBIT_COUNT"
    exit_status = 2


class HoustonSumViolationError(GermLabError):
    code = "HOUSTON_SUM_VIOLATION"
    exit_status = 2


class CheckFailedError(GermLabError):
    code = "CHECK_FAILED"
    exit_status = 2


class StructureViolationError(GermLabError):
    code = "NOT_A_FINITE_OR_BUG"


class DegenerateFormError(GermLabError):
    code = "DEGENERATE_FORM"


class UnstableGenericMemberError(GermLabError):
    code = "UNSTABLE_GENERIC_MEMBER"


class InputError(GermLabError):
    code = "INPUT_ERROR"


class NormalFormViolationError(InputError):
    code = "NORMAL_FORM_VIOLATION"


class EmptyDoublePointsError(GermLabError):
    code = "EMPTY_DOUBLE_POINTS"
