"""Exception hierarchy.

Input problems derive from :class:`InputError` (a ``ValueError``); problems
discovered while analysing a valid input derive from :class:`AnalysisError`.
The CLI maps the first family to exit code 2 and :class:`CapExceeded` to 3.
"""

from __future__ import annotations


class MarkovError(Exception):
    """Base class for every error raised by this package."""


class InputError(MarkovError, ValueError):
    """Malformed or out-of-contract input."""


class NotSquare(InputError):
    pass


class NegativeEntry(InputError):
    pass


class RowSumViolation(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class BadBreakpoints(InputError):
    pass


class OutOfRange(InputError):
    pass


class EpsOutOfRange(InputError):
    pass


class NonpositiveArgument(InputError):
    pass


class DegenerateDimension(InputError):
    """n = 1: every quantity is trivial and the singular-value floor is undefined."""


class AnalysisError(MarkovError):
    """Raised when an analysis cannot be carried out on a valid input.

    ``s`` records the evolution parameter at which the problem occurred, when
    there is one.
    """

    def __init__(self, message: str, s: float | None = None):
        super().__init__(message)
        self.s = s


class StructureError(AnalysisError):
    pass


class MultipleRecurrentClasses(StructureError):
    pass


class PeriodicRecurrentClass(StructureError):
    pass


class NotErgodic(StructureError):
    """Strict mode only: the matrix is not irreducible and aperiodic."""


class RankWarning(AnalysisError):
    """rank(I - P) != n - 1 numerically."""


class CapExceeded(AnalysisError):
    """No admissible horizon was found at or below the cap.

    ``partial`` carries whatever result object the search had built so far
    (for instance the search log of a stable adiabatic time scan).
    """

    def __init__(self, message: str, s: float | None = None, partial=None):
        super().__init__(message, s)
        self.partial = partial
