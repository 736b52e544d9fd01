"""Exception hierarchy shared across the package."""


class SamossaError(Exception):
    """Base class for all errors raised by this package."""


class IngestError(SamossaError):
    """Structurally invalid input data (ragged rows, missing observations)."""


class ParseError(SamossaError):
    """Unparseable cell or file content."""


class SplitError(SamossaError):
    """Invalid train/validation/test split."""


class ShapeError(SamossaError):
    """Dimension mismatch between inputs."""


class RankError(SamossaError):
    """Rank out of range, or no usable spectrum."""


class FitError(SamossaError):
    """A regression could not be carried out."""


class NonStationaryError(SamossaError):
    """AR characteristic roots on or outside the unit circle."""


class DegenerateRootsError(SamossaError):
    """AR characteristic roots too close to each other."""


class SpecError(SamossaError):
    """Invalid generator specification."""


class StateError(SamossaError):
    """Forecast/observe protocol violation or uninitialized state."""


class PersistError(SamossaError):
    """Unsupported model-file version."""


class MetricError(SamossaError):
    """Metric undefined for the given inputs."""


class SearchError(SamossaError):
    """Every configuration in a grid search failed.

    Carries the per-configuration failures in ``failures``.
    """

    def __init__(self, message: str, failures=None):
        super().__init__(message)
        self.failures = failures or []


class ConfigError(SamossaError):
    """Invalid pipeline configuration."""
