"""Exception types raised across the package."""


class ChaptersegError(Exception):
    """Base class for all package-specific errors."""


class EmptyBookError(ChaptersegError):
    """Input file contains no non-whitespace text."""


class MalformedNumeralError(ChaptersegError):
    """A numeral capture violates its numeral grammar."""


class ScoreAlignmentError(ChaptersegError):
    """A per-line score vector does not align with the book's lines."""


class BookMismatchError(ChaptersegError):
    """Prediction and ground truth refer to different books."""


class SchemaError(ChaptersegError):
    """A JSON document does not match its declared schema."""


class GapMismatchError(ChaptersegError):
    """A score entry names a gap that is not a paragraph break."""


class ScoreDomainError(ChaptersegError):
    """A raw confidence score lies outside [0, 1)."""


class EmptySeriesError(ChaptersegError):
    """An operation requires at least one series entry."""


class DegenerateWindowError(ChaptersegError):
    """Metric window length k is not smaller than the sentence count."""


class UndefinedStatisticError(ChaptersegError):
    """The requested statistic is undefined for this input."""


class SingularDesignError(ChaptersegError):
    """Regression design matrix is rank deficient."""
