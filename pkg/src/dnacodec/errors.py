"""Exception hierarchy shared by all codec modules.

The CLI maps these to process exit codes: configuration errors exit 2,
format errors exit 3, capacity errors exit 4.
"""


class DnaCodecError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DnaCodecError, ValueError):
    """An input value violates an operation's precondition."""


class ConfigError(DnaCodecError, ValueError):
    """A configuration object or CLI option is invalid."""


class CapacityError(DnaCodecError):
    """A codebook cannot cover the requested symbol range."""


class FormatError(DnaCodecError):
    """A file or byte stream does not conform to its declared format."""


class InferenceError(DnaCodecError):
    """Shapes or layer parameters are inconsistent during a forward pass."""


class EncodeError(DnaCodecError):
    """A symbol stream cannot be encoded with the given codebook."""


class DecodeError(FormatError):
    """A nucleotide stream cannot be decoded strictly."""
