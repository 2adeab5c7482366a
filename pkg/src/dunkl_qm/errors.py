"""Exception hierarchy shared by all modules."""


class DunklError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DunklError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConvergenceError(DunklError, ArithmeticError):
    """A series or iteration did not reach its tolerance within its budget."""


class GridError(DunklError, ValueError):
    """Sampled functions live on incompatible or asymmetric grids."""


class CausticError(DunklError, ArithmeticError):
    """Real-time oscillator kernel requested at a caustic, sin(wT) = 0."""


class DivergenceError(DunklError, ArithmeticError):
    """Imaginary-time iteration produced unbounded or non-finite norms."""


class NumericalWarning(UserWarning):
    """Resolution or conditioning issue that does not invalidate the result."""
