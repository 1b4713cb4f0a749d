"""Exception hierarchy shared by the library and the CLI."""


class QuganError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QuganError, ValueError):
    """Invalid configuration value (qubit counts, hyperparameters, config files)."""


class DataError(QuganError, ValueError):
    """Dataset cannot be used (empty, degenerate, malformed)."""


class TrainingError(QuganError, RuntimeError):
    """Training hit a non-finite cost or another unrecoverable numerical state."""
