"""Exception types shared across the toolkit.

``ValidationError`` and its subclasses signal bad inputs (data problems,
not code problems); the command-line front end maps them to exit code 2.
Anything else escaping a command is treated as an internal failure.
"""


class CpkitError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CpkitError, ValueError):
    """Invalid input data or parameter value."""


# --- probability vectors and scores ---------------------------------------

class EmptyVector(ValidationError):
    """A probability vector with no entries."""


class EntryOutOfRange(ValidationError):
    """A probability entry outside [0, 1]."""


class SumOutOfTolerance(ValidationError):
    """Probability entries whose sum is too far from 1."""


class EmptyScores(ValidationError):
    """An empty score list where at least one score is required."""


class NonFiniteScore(ValidationError):
    """A NaN or infinite nonconformity score."""


class OutOfRange(ValidationError):
    """A scalar argument outside its documented range."""


class NonFinite(ValidationError):
    """A NaN or infinite value where a finite one is required."""


class InvertedQuantiles(ValidationError):
    """A lower quantile prediction above the upper one."""


class MissingField(ValidationError):
    """An example lacking a field the chosen score needs."""


# --- calibration and prediction --------------------------------------------

class EmptyCalibration(ValidationError):
    """An empty calibration set."""


class ClassCountMismatch(ValidationError):
    """Probability vectors whose class count disagrees with the model."""


class InsufficientCalibration(CpkitError):
    """Too few calibration scores for the requested confidence."""


# --- evaluation -------------------------------------------------------------

class LengthMismatch(ValidationError):
    """Parallel sequences of different lengths."""


class EmptyInput(ValidationError):
    """An empty sequence where at least one element is required."""


class FewerThanTwoGroups(ValidationError):
    """A grouped standard error needs at least two distinct groups."""


# --- synthetic data and splits ----------------------------------------------

class InvalidSpec(ValidationError):
    """A synthetic data specification that fails its own constraints."""


class BadProportions(ValidationError):
    """Split proportions that are not positive or do not sum to 1."""


class TooFewGroups(ValidationError):
    """Fewer distinct groups than requested partitions."""


class TooFewPoints(ValidationError):
    """Fewer distinct coordinates than requested clusters."""


class DegenerateCoordinates(ValidationError):
    """All coordinates identical; clustering is meaningless."""


class KTooLarge(ValidationError):
    """More neighbours requested than training points available."""


# --- raster grids -----------------------------------------------------------

class HeaderParseError(ValidationError):
    """A grid header that is missing, malformed, or inconsistent."""


class PayloadSizeMismatch(ValidationError):
    """A grid payload whose byte length disagrees with its header."""


class UnsupportedBandCount(ValidationError):
    """More bands than the packed membership encoding supports."""


class ClassMismatch(ValidationError):
    """Grid bands that do not line up with the model's classes."""


class AllNodata(ValidationError):
    """A grid with no valid pixels to summarize."""
