"""Exception and warning classes raised across the package."""


class InvalidDimensionError(ValueError):
    """Input length is incompatible with the problem dimension."""


class InvalidLagError(ValueError):
    """Autocorrelation lag outside ``1 <= k <= N - 1``."""


class BudgetExceededError(ValueError):
    """Exhaustive search requested beyond the enumeration cap."""


class EmptyDatasetError(ValueError):
    """A loss or gradient was requested on an empty dataset."""


class InfeasibleUniquenessError(ValueError):
    """More unique binary vectors were requested than exist."""


class SequencingError(RuntimeError):
    """Dataset operation called at the wrong point of the optimization loop."""


class ReferenceValueError(ValueError):
    """An observed objective lies below the supplied optimum."""


class NumericFailureError(FloatingPointError):
    """Non-finite gradient component encountered during an optimizer step.

    Attributes
    ----------
    index : int
        Position of the first offending component in the flattened
        parameter vector ``[omega0, omega..., v...]``.
    """

    def __init__(self, index, message=None):
        self.index = int(index)
        super().__init__(message or f"non-finite gradient component at index {self.index}")


class ConfigError(ValueError):
    """Configuration file or override failed validation.

    ``field`` names the offending key when one can be identified.
    """

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class RunAborted(RuntimeError):
    """An FMA run failed part-way; ``record`` holds the partial trace."""

    def __init__(self, record, cause):
        self.record = record
        self.cause = cause
        super().__init__(f"FMA run aborted at iteration {len(record.trace)}: {cause!r}")


class ShortBatchWarning(UserWarning):
    """Fewer distinct sampler outputs than requested additions."""
