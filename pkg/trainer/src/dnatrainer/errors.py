"""Exception types raised by the trainer."""


class TrainerError(Exception):
    """Base class for all trainer failures."""


class ConfigError(TrainerError, ValueError):
    """A configuration value is missing, malformed, or out of range."""


class FormatError(TrainerError):
    """A weight file is malformed, truncated, or fails its checksum."""


class DivergenceError(TrainerError):
    """The training loss became non-finite."""
