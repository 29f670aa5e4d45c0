"""Exception types shared across the package."""


class VoakitError(Exception):
    """Base class for all package-specific errors."""


class TruncationError(VoakitError):
    """A value or pairing fell outside the declared weight or order window.

    Raised instead of silently truncating or extending by zero; the message
    names the window that would have been required.
    """


class ParameterError(VoakitError):
    """Arguments violate a stated precondition (e.g. s > k)."""


class MembershipError(VoakitError):
    """A vector required to lie in a computed subspace does not."""


class CutoffInconclusive(VoakitError):
    """Two computations that must agree at this cutoff disagree.

    Carries a witness so the mismatch is never silently passed.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
