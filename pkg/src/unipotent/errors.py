"""Exception hierarchy.

``DomainError`` covers inputs that were validated and rejected (CLI exit
status 1); ``InvariantViolation`` signals a broken internal identity (exit
status 2).
"""


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class InvariantViolation(AssertionError):
    """An identity that must hold by construction failed."""


class PrimeMismatchError(DomainError):
    pass


class RingMismatchError(DomainError):
    pass


class ShapeMismatchError(DomainError):
    """Alphabet size or truncation degree of two operands differ."""


class PrecisionError(DomainError):
    """A p-adic result would carry no known digit."""


class DiskError(DomainError):
    """Evaluation point lies outside the open unit residue disk."""


class AugmentationError(DomainError):
    pass


class ParseError(DomainError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class PoleError(DomainError):
    """A rational function has a pole where none is permitted."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class DivergentIntegralError(DomainError):
    """An iterated integral diverges at the basepoint."""

    def __init__(self, word, message=None):
        from .ncseries import format_word

        super().__init__(message or f"iterated integral for word {format_word(word)} "
                         "diverges at the basepoint (tangential basepoint needed)")
        self.word = tuple(word)
