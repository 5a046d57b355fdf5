"""Exception hierarchy shared by all modules."""


class ExtLieError(Exception):
    """Base class for errors raised by this package."""


class UnknownType(ExtLieError, ValueError):
    pass


class IndexOutOfRange(ExtLieError, IndexError):
    pass


class NotDiagramAutomorphism(ExtLieError, ValueError):
    pass


class NotCoxeterWord(ExtLieError, ValueError):
    pass


class NotElliptic(ExtLieError, ValueError):
    pass


class PairingNotAlternating(ExtLieError, ValueError):
    pass


class SumNotRootOrZero(ExtLieError, ValueError):
    pass


class InvalidDatum(ExtLieError, ValueError):
    pass


class NotWInvariantEpsilon(ExtLieError, ValueError):
    pass


class NotDatumIsomorphism(ExtLieError, ValueError):
    pass


class NonCommutingPair(ExtLieError, ValueError):
    pass


class UnexpectedType(ExtLieError, ValueError):
    pass


class ActionConditionsViolated(ExtLieError, ValueError):
    pass


class CharacterDoesNotExtend(ExtLieError, ValueError):
    pass


class EpsilonNotEpsW(ExtLieError, ValueError):
    pass


class InvalidSpec(ExtLieError, ValueError):
    pass
