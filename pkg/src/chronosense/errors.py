"""Exception hierarchy.

Each top-level class maps to a CLI exit code (see ``cli.EXIT_CODES``).
"""


class ChronosenseError(Exception):
    """Base class for all library errors."""


class InputError(ChronosenseError, ValueError):
    """Caller supplied data that violates a precondition."""


class UnsortedProbabilitiesError(InputError):
    pass


class AsymmetricMatrixError(InputError):
    pass


class EnumerationBoundError(InputError):
    """Partition enumeration would exceed the configured cap."""


class InfeasibleError(ChronosenseError):
    """No allocation satisfies the budget and constraints."""


class NumericalError(ChronosenseError, ArithmeticError):
    pass


class DegenerateModelError(NumericalError):
    pass


class NoRootsError(NumericalError):
    pass


class NoFixedPointError(NumericalError):
    pass
