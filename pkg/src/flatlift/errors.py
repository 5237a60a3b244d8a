"""Exception hierarchy for flatlift."""


class FlatliftError(Exception):
    """Base class for every error raised by this package."""


class InputError(FlatliftError):
    """The caller handed in something malformed."""


class DuplicateName(InputError):
    pass


class UnknownName(InputError):
    pass


class CycleDetected(InputError):
    pass


class BadParameter(InputError):
    pass


class ParseError(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class RingMismatch(InputError):
    pass


class IllTyped(InputError):
    """A matrix violates the divisibility constraint of its Hom-group."""


class IllFormed(InputError):
    pass


class NotACrown(InputError):
    pass


class NotFree(InputError):
    pass


class PreconditionViolated(FlatliftError):
    """A mathematical precondition of an operation does not hold."""


class NotOneConnected(PreconditionViolated):
    pass


class NotPurelyMonic(PreconditionViolated):
    pass


class NotIndFlat(PreconditionViolated):
    pass


class NotStablyCommutative(PreconditionViolated):
    pass


class NotStablyNatural(PreconditionViolated):
    pass


class NotQuasitree(PreconditionViolated):
    pass


class NoSolution(FlatliftError):
    pass


class FactorizationFailed(FlatliftError):
    pass


class InternalInconsistency(FlatliftError):
    """Two routes that must agree did not. Always a bug."""


class MethodDisagreement(InternalInconsistency):
    pass


class CharacterizationDisagreement(InternalInconsistency):
    pass


class PurityViolation(InternalInconsistency):
    pass


class IllDefinedTransition(InternalInconsistency):
    pass
