"""Exception hierarchy shared by the simulator, data loaders and CLI."""


class DelayLearnError(Exception):
    """Base class for all package errors."""


class ConfigError(DelayLearnError):
    """Invalid configuration or argument values."""


class DataError(DelayLearnError):
    """Missing or unusable dataset files."""


class FormatError(DataError):
    """Malformed IDX container."""


class SimulationFault(DelayLearnError):
    """Numerical blow-up or internal simulator inconsistency."""
