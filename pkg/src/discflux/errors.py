"""Exception types raised by the solvers.

Every error the library raises on purpose derives from ``DiscfluxError`` so
callers (the CLI in particular) can map failures onto exit codes.
"""


class DiscfluxError(Exception):
    """Base class for library errors."""


class ParameterError(DiscfluxError, ValueError):
    """A parameter lies outside its admissible range."""


class GridError(ParameterError):
    """Grid construction violates the interface-at-zero layout."""


class ShapeError(DiscfluxError, ValueError):
    """Two grid functions live on different grids."""


class UnsupportedFluxError(DiscfluxError, ValueError):
    """The operation is not defined for the given flux."""


class MustUseExtendedSolverError(DiscfluxError):
    """Plain Picard iteration requested outside its contraction regime."""


class NonConvergenceError(DiscfluxError, RuntimeError):
    """An iteration hit its cap. ``path`` holds the residual history."""

    def __init__(self, message, path=None, step=None):
        super().__init__(message)
        self.path = list(path) if path is not None else []
        self.step = step


class ContinuationNonConvergenceError(NonConvergenceError):
    """The epsilon schedule ran out before the Cauchy criterion tripped.

    ``gaps`` holds the L1 distances between consecutive iterates.
    """

    def __init__(self, message, gaps=None, step=None):
        super().__init__(message, path=gaps, step=step)
        self.gaps = self.path


class OracleFailureError(DiscfluxError, RuntimeError):
    """The ODE oracle could not build an admissible splice."""
