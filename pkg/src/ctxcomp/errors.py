"""Exception hierarchy shared across the package.

Validation problems (bad values, shapes, budgets) subclass ``ValidationError``
so the CLI can map them all to exit code 2; genuine I/O problems stay plain
``OSError`` and map to exit code 1.
"""


class CtxcompError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CtxcompError, ValueError):
    """Input violates a documented precondition or invariant."""


class ShapeError(ValidationError):
    """Dimension mismatch between arrays that must agree."""


class FormatError(CtxcompError, ValueError):
    """Byte stream is not a valid embedding file (magic/version/dtype)."""


class TruncatedError(FormatError):
    """Embedding file payload is shorter than its header promises."""


class EmptyQueryError(ValidationError):
    """Query matrix has no rows."""


class EmptySegmentError(ValidationError):
    """A segment or group that must be non-empty is empty."""


class SelfComparisonError(ValidationError):
    """A peer set contains the index it is compared against."""


class InfeasibleBudgetError(ValidationError):
    """Token budget too small to give every group its minimum size."""


class DegenerateLabelsError(ValidationError):
    """Label vector contains only one class where both are required."""


class DegenerateSetError(ValidationError):
    """Selected feature set has a (near-)singular correlation block."""


class InfeasibleSpecError(ValidationError):
    """Requested correlation profile is too far from positive semidefinite."""
