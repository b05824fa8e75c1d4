"""Exception hierarchy shared by all cantordim modules."""


class CantorDimError(Exception):
    """Base class for every error raised by cantordim."""


class ParameterDomainError(CantorDimError, ValueError):
    """A family or gauge parameter lies outside its admissible domain."""


class SequenceValidationError(CantorDimError, ValueError):
    """A gap sequence violates positivity, monotonicity or tail consistency."""


class OutOfRangeError(CantorDimError, IndexError):
    """An index lies beyond the range a sequence can represent."""


class UnsupportedTailError(CantorDimError):
    """No closed form or certified remainder is available for a tail."""


class DomainError(CantorDimError, ValueError):
    """A gauge was evaluated or inverted outside of its domain."""


class InsufficientDataError(CantorDimError, ValueError):
    """Too few probe points (or too shallow a tree) for an estimate."""


class ResourceError(CantorDimError, MemoryError):
    """A requested construction would exceed desk-scale resources."""


class SynthesisInfeasibleError(CantorDimError, ValueError):
    """A gauge does not generate a legal (positive, non-increasing) gap sequence."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SpecFormatError(CantorDimError, ValueError):
    """A sequence-spec file or gauge-spec string is malformed."""
