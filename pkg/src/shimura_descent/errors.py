"""Exception types shared across the package."""


class SdkError(Exception):
    """Base class for all package errors."""


class DivisionByZero(SdkError):
    """Inversion of zero in a field or division ring."""


class NotTotallyReal(SdkError):
    """A number field was expected to be totally real but is not."""


class PrecisionExhausted(SdkError):
    """Interval refinement hit the precision cap without deciding a sign.

    Usually means the defining polynomial was reducible and the element is a
    zero divisor in disguise.
    """


class InvalidType(SdkError):
    """Illegal Dynkin type / rank combination."""


class NoWeylGroup(SdkError):
    """Operation requires a nonempty root system."""


class NotBasedAutomorphism(SdkError):
    """Lattice map does not preserve the simple roots."""


class NotCMSplit(SdkError):
    """Conjugation matrix fails to commute with the Galois action."""


class NoComplement(SdkError):
    """No anticommuting pure quaternion complement exists."""


class WrongModel(SdkError):
    """Split/nonsplit model requested at a place of the other kind."""


class NotAdmissible(SdkError):
    """Input fails the admissibility conditions for the construction."""


class OutOfScope(SdkError):
    """Input is valid but outside the supported rank/type range."""


class NoModel(SdkError):
    """No complex matrix model exists at this place (compact place)."""


class NoHodgeMap(SdkError):
    """No Hodge map exists at this place (compact place)."""


class Unsupported(SdkError):
    """Operation not supported for this model kind."""


class InternalError(SdkError):
    """An internal search or consistency check failed unexpectedly."""


class NotExtendable(SdkError):
    """Kernel check failed while extending the involution to the full group."""


class ParseError(SdkError):
    """Malformed JSON input."""
