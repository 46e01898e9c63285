"""Exception hierarchy shared by all deficit_atlas modules."""


class DeficitAtlasError(Exception):
    """Base class for every error raised by the package."""


class DomainError(DeficitAtlasError, ValueError):
    """A parameter point lies outside its domain of definition.

    ``constraint`` names the inequality that failed so callers (the CLI in
    particular) can report it verbatim.
    """

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class SingularInput(DeficitAtlasError, ValueError):
    """A closed-form expression is evaluated on its singular set."""


class ConvergenceError(DeficitAtlasError, RuntimeError):
    """An iterative method ran out of iterations."""


class BracketError(DeficitAtlasError, ValueError):
    """A root bracket does not enclose a sign change."""

    def __init__(self, message, lo=None, hi=None, f_lo=None, f_hi=None):
        super().__init__(message)
        self.lo, self.hi, self.f_lo, self.f_hi = lo, hi, f_lo, f_hi


class NoInteriorMinimum(DeficitAtlasError):
    """The measurement profile has no strictly interior local minimum."""


class EmptyCurve(DeficitAtlasError):
    """No point of a boundary curve could be located."""


class NotFound(DeficitAtlasError):
    """A requested special point (e.g. a triple point) does not exist."""


class IoError(DeficitAtlasError, OSError):
    """Writing an output sink failed."""
