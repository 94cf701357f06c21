"""Exception types shared across the package."""


class SplitSvmError(Exception):
    """Base class for every error raised by this package."""


class InputError(SplitSvmError, ValueError):
    """Invalid argument values or mismatched dimensions."""


class DuplicatePointError(InputError):
    """Two identical inputs would make the kernel matrix singular."""


class DefinitenessError(SplitSvmError):
    """A matrix required to be symmetric positive definite is not."""


class ParseError(SplitSvmError):
    """A data or model file could not be parsed."""


class FormatVersionError(ParseError):
    """A model file declares an unsupported format version."""


class TrainingError(SplitSvmError):
    """No training start produced a usable solution."""
