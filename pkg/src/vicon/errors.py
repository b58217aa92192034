"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage/config problems -> 1,
data problems -> 2, numerical failures -> 3.
"""


class ViconError(Exception):
    """Base class for all package errors."""


class ConfigError(ViconError):
    """Invalid configuration text, option value, or command usage."""


class DataError(ViconError):
    """Problem with training data, image files, or checkpoints."""


class UnsupportedImageFormat(DataError):
    """Graymap/pixmap magic number not supported."""


class MalformedImageHeader(DataError):
    """Graymap header could not be parsed."""


class TruncatedImageData(DataError):
    """Graymap payload ends before the declared pixel count."""


class CheckpointError(DataError):
    """Checkpoint file corrupt or inconsistent with the topology."""


class NumericalError(ViconError):
    """Numerical failure during evaluation or training."""


class DegenerateResponseError(NumericalError):
    """A neighbourhood's summed raw responses underflowed to zero."""


class TrainingDivergedError(NumericalError):
    """Non-finite parameter or objective detected during training."""


class FlatProfileError(ViconError):
    """Diagnostic undefined because the measured profile is constant."""
