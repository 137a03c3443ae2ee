"""Exception hierarchy shared by the nnsimplify modules."""


class NNSimplifyError(Exception):
    """Base class for every error raised by this package."""


class NNetError(NNSimplifyError, ValueError):
    """A problem found while reading an NNet document."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MalformedHeader(NNetError):
    pass


class DimensionMismatch(NNetError):
    pass


class NonNumericToken(NNetError):
    pass


class NonPositiveRange(NNetError):
    pass


class InvalidInputBox(NNetError):
    pass


class EmptyLayer(NNSimplifyError):
    """A hidden layer lost all of its neurons and must be cascaded away."""


class TooLarge(NNSimplifyError):
    """The exact oracle refuses subnetworks past its enumeration bound."""


class InputUnreadable(NNSimplifyError):
    pass


class InvalidConfig(NNSimplifyError, ValueError):
    pass
