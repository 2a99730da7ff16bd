"""Exception hierarchy shared by the solver modules and the CLI."""


class PolysolError(Exception):
    """Base class for all errors raised by polysol."""


class DimensionMismatchError(PolysolError, ValueError):
    """Operands live in different ambient dimensions or have the wrong shape."""


class RingError(PolysolError, TypeError):
    """Coefficient values cannot be combined or converted between rings."""


class SolverPreconditionError(PolysolError, ValueError):
    """Parameters or inputs violate a solver precondition."""
