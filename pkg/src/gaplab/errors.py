"""Exception types shared across gaplab modules."""


class GaplabError(Exception):
    """Base class for all errors raised by gaplab."""


class InvalidRangeError(GaplabError):
    """A numeric limit or interval is outside the supported range."""


class InvalidConfigError(GaplabError):
    """A configuration value violates a structural requirement."""


class InvalidArgumentError(GaplabError):
    """An argument fails an operation's precondition."""


class CheckpointError(GaplabError):
    """Base class for run-checkpoint load failures."""


class CorruptCheckpointError(CheckpointError):
    """Checkpoint bytes fail magic or CRC validation."""


class UnsupportedVersionError(CheckpointError):
    """Checkpoint carries a version this build cannot read."""
