"""
Exception types raised by cubicurve computations, and their translation to command line exit codes.

Every error derives from the closest Python builtin, so callers that only expect builtin exceptions
(``ValueError``, ``ArithmeticError``, ``RuntimeError``) keep working. All of them additionally derive from
``CubicurveError``, which makes it possible to catch every domain failure at once.
"""

from __future__ import annotations


class CubicurveError(Exception):
    """Marker base class for all errors raised by cubicurve."""


class ZeroSeries(CubicurveError, ArithmeticError):
    """A leading term was requested from the zero series."""


class InconsistentSeed(CubicurveError, ValueError):
    """A leading monomial contradicts the kneading bit at its position."""


class SeedRejected(CubicurveError, ValueError):
    """A seed vector fails the residual congruence at interior index ``index``."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NotACenter(CubicurveError, ValueError):
    """The critical orbit of ``z**2 + c`` does not close up at the requested period."""


class SingularSystem(CubicurveError, ArithmeticError):
    """A graded linearization of the fundamental system is (numerically) singular."""


class NoProgress(CubicurveError, RuntimeError):
    """Residual orders stopped increasing during series refinement."""


class NotPowerOfTwo(CubicurveError, ValueError):
    """A multiplicity (least common denominator of exponents) is not a power of two."""


class Inconsistent(CubicurveError, ValueError):
    """No marked grid reproduces the given vector of orders."""


class LevelAmbiguous(CubicurveError, ValueError):
    """An order difference falls strictly between two achievable level sums."""


class NotEscaping(CubicurveError, ValueError):
    """The free critical point has a bounded orbit within the iteration budget."""


class AmbiguousKneading(CubicurveError, ValueError):
    """An orbit point is nearly equidistant from ``a`` and ``-2a``."""


class OrbitOverflow(CubicurveError, OverflowError):
    """An orbit left the representable range, it is treated as escaped."""


class RootFindingStalled(CubicurveError, RuntimeError):
    """Simultaneous root iteration or Newton polishing failed to reach the residual target."""


class UnmatchedRoot(CubicurveError, RuntimeError):
    """Continuation lost track of a fiber root between two radii."""


class OrdRoundingAmbiguous(CubicurveError, ValueError):
    """An estimated exponent is not close to a dyadic rational."""


class SheetMismatch(CubicurveError, RuntimeError):
    """Continuation around an ideal point did not close up after the expected number of turns."""


class StepCollapse(CubicurveError, ArithmeticError):
    """Both partial derivatives of the curve equation vanished along a flow path."""


class NotConverged(CubicurveError, RuntimeError):
    """The fixed point iteration for ``v`` exhausted its sweep budget."""


class WrongKneading(CubicurveError, RuntimeError):
    """The fixed point iteration converged to a map of another escape region."""


EXIT_CODES: dict[type[BaseException], int] = {
    CubicurveError: 1,
    ValueError: 2,
}


def translate_error(error: BaseException) -> tuple[int, str]:
    """
    Convert an exception raised during a command to a process exit code and a message.

    Domain errors map to exit code 1 and are reported with their class name, which is stable API.
    Plain ``ValueError`` instances come from argument validation and map to exit code 2,
    the same code ``argparse`` uses for malformed flags.

    Parameters
    ----------
    error: BaseException
        The exception caught at the command boundary.

    Returns
    -------
    tuple[int, str]
        The exit code and a one-line description suitable for standard error.

    Raises
    ------
    BaseException
        The original error, if it is neither a domain error nor a ``ValueError``.
    """
    for exc_type, code in EXIT_CODES.items():
        if isinstance(error, exc_type):
            return code, f"{type(error).__name__}: {error}"
    raise error
