"""Custom exceptions for autfa package."""

from typing import Any, Optional, Tuple


class AutfaError(Exception):
    """Base exception for all autfa errors."""

    pass


class ValidationError(AutfaError):
    """Raised when a value breaks the invariants of its type."""

    pass


class ParseError(ValidationError):
    """Raised when word, automorphism or factor-count text cannot be parsed."""

    pass


class AxiomViolation(ValidationError):
    """Raised when a multiplication table fails a group axiom."""

    def __init__(self, kind: str, witness: Optional[Tuple[int, ...]] = None) -> None:
        self.kind = kind
        self.witness = witness
        detail = f" at {witness}" if witness is not None else ""
        super().__init__(f"{kind} axiom violated{detail}")


class IndexOutOfRange(AutfaError):
    """Raised when an element index is outside its group."""

    pass


class BoundExceeded(AutfaError):
    """Raised when an exhaustive search would exceed its configured bound."""

    pass


class BadLetter(ValidationError):
    """Raised when a syllable letter is invalid for its factor."""

    def __init__(self, factor: int, letter: Any) -> None:
        self.factor = factor
        self.letter = letter
        super().__init__(f"invalid letter {letter!r} for factor {factor}")


class SignatureMismatch(AutfaError):
    """Raised when words or automorphisms over different free products are combined."""

    pass


class ShapeMismatch(AutfaError):
    """Raised when a signature cannot be realised by the requested graph shape."""

    pass


class InfiniteDegree(AutfaError):
    """Raised when a Bass-Serre tree vertex would have infinitely many neighbours."""

    pass


class BaseMismatch(AutfaError):
    """Raised when a loop is not based at the tree's base vertex."""

    pass


class NotDisjoint(AutfaError):
    """Raised when a bridge is requested between intersecting subtrees."""

    pass


class NotCommuting(AutfaError):
    """Raised when subgroup generators that must commute do not."""

    pass


class TrivialProduct(AutfaError):
    """Raised when a free product has fewer than two factors."""

    pass


class UnsupportedZ(AutfaError):
    """Raised for infinite cyclic factor configurations the decision rule does not cover."""

    pass


class NotProjectable(AutfaError):
    """Raised when an automorphism does not descend to a quotient."""

    pass


class TooFewFactors(AutfaError):
    """Raised when a construction needs more free factors than given."""

    pass


class UndecidedInner(AutfaError):
    """Raised when the bounded conjugator search cannot settle innerness."""

    def __init__(self, bound: int, context: str = "") -> None:
        self.bound = bound
        suffix = f" ({context})" if context else ""
        super().__init__(f"inner search undecided at bound {bound}{suffix}")


class StabilizerAmbiguity(AutfaError):
    """Raised when vertex stabilizers do not determine an induced tree map."""

    pass
