"""Exception taxonomy shared across the package.

Three families matter to callers: data errors (bad inputs on disk or over
the wire), compute errors (a valid request that cannot produce a result),
and validation errors (caller broke a contract). The CLI and the HTTP
service map these onto exit codes and status codes respectively.
"""


class RepscapeError(Exception):
    """Base class for all package errors."""

    code = "error"


class ValidationError(RepscapeError):
    """A caller-supplied argument violates an operation's contract."""

    code = "validation"


class IngestError(RepscapeError):
    """A CSV source could not be parsed into a dataset."""

    code = "ingest"


class UnknownVariableError(RepscapeError):
    """A referenced variable does not exist in the dataset."""

    code = "unknown_variable"


class UnknownRegionError(RepscapeError):
    """A referenced region id does not exist in the dataset."""

    code = "unknown_region"


class EmptyFilterError(RepscapeError):
    """Every region was excluded by the filter predicates."""

    code = "empty_after_filter"


class DegenerateProjectionError(RepscapeError):
    """All axis scores are identical, so distances cannot be normalized."""

    code = "degenerate_projection"


class ConvergenceError(RepscapeError):
    """The eigensolver did not reach its off-diagonal target."""

    code = "no_convergence"

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


DATA_ERRORS = (IngestError, UnknownVariableError, UnknownRegionError)
COMPUTE_ERRORS = (EmptyFilterError, DegenerateProjectionError, ConvergenceError)
