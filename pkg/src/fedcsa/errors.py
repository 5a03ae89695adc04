"""Exception types shared across the package."""


class FedcsaError(ValueError):
    """Base class for input-contract violations."""


class DimensionMismatch(FedcsaError):
    """Array arguments disagree on length or feature dimension."""


class SingularSystem(FedcsaError):
    """Normal equations are singular and no fallback was requested."""


class DegenerateData(FedcsaError):
    """Sample is too small or has zero spread for density-ratio fitting."""


class EmptyValidation(FedcsaError):
    """Validation evaluation has too few points for the requested statistic."""


class EmptyInput(FedcsaError):
    """An operation received an empty array where data is required."""


class TooFewRows(FedcsaError):
    """Dataset has fewer rows than the requested split needs."""


class MalformedCsv(FedcsaError):
    """A data file row does not match the expected column layout."""


class InconsistentReports(FedcsaError):
    """Source reports disagree on participants, shapes, or grid coverage."""


class ConfigError(FedcsaError):
    """Experiment configuration file is missing, malformed, or has bad values."""
