"""Exception types shared across the package.

Everything raised deliberately by this package derives from SwsvddError so
that callers (and the CLI) can catch one base class.
"""


class SwsvddError(Exception):
    """Base class for all errors raised by this package."""


# --- file ingestion (geodata) ---

class ParseError(SwsvddError):
    """A field that should be numeric (or a header) could not be parsed."""


class MalformedLog(SwsvddError):
    """Well log violates its invariants (non-monotone depth, non-finite value)."""


class MalformedModel(SwsvddError):
    """Time-depth relationship is not strictly monotone in depth and time."""


class MalformedTrace(SwsvddError):
    """Seismic trace rows are structurally inconsistent (dt, t0, lengths)."""


class InsufficientData(SwsvddError):
    """Fewer samples or knots than the operation can work with."""


class IncompleteTrace(SwsvddError):
    """A trace is missing one or more required attributes."""


class DuplicateTrace(SwsvddError):
    """The same (inline, crossline, attribute) key appeared twice."""


# --- signal preparation ---

class OutOfRange(SwsvddError):
    """Log depth falls outside the time-depth relationship's depth range."""


class TooShortForSpline(SwsvddError):
    """Cubic spline resampling needs at least four knots."""


class NoOverlap(SwsvddError):
    """The time windows being integrated share no common sample."""


# --- feature selection ---

class DegenerateLabels(SwsvddError):
    """Labels do not contain two usable classes."""


class BadK(SwsvddError):
    """Requested top-k count is outside [1, number of features]."""


# --- kernels and the hypersphere model ---

class DimError(SwsvddError):
    """Vector dimensions do not match."""


class NumError(SwsvddError):
    """Non-finite values where finite numbers are required."""


class InfeasibleC(SwsvddError):
    """Box cap C makes the equality constraint sum(alpha) = 1 infeasible."""


class EmptyTraining(SwsvddError):
    """Training was invoked with zero samples."""


class ModelFormatError(SwsvddError):
    """Saved model file is truncated, malformed, or of an unknown version."""


# --- evaluation harness ---

class RangeError(SwsvddError):
    """Saturation or threshold value outside its admissible interval."""


class NoSuchWell(SwsvddError):
    """Referenced well id is not present in the dataset."""


class DegenerateWell(SwsvddError):
    """A training well contributes no minority-class rows."""


class UndefinedMetric(SwsvddError):
    """Confusion counts leave a class empty; the g-metric is undefined."""


class TableError(SwsvddError):
    """Comparison reports do not cover a consistent well/classifier grid."""


# --- volume classification ---

class NoSuchInline(SwsvddError):
    """Requested inline is not part of the classified volume."""


class IoError(SwsvddError):
    """Output file could not be written."""


# --- synthetic data generation ---

class SpecError(SwsvddError):
    """Synthetic dataset specification violates its own constraints."""
