"""Exceptions raised by graphshuffle."""

from __future__ import annotations


class GraphShuffleError(Exception):
    """Base class for all graphshuffle errors."""


# -----------------------------
# Input errors (cli exit 2)
# -----------------------------
class InputError(GraphShuffleError):
    """Malformed or inconsistent user input."""


class ParseError(InputError):
    """Text could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PointOutOfRange(InputError):
    pass


class DuplicatePoint(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class LengthMismatch(InputError):
    pass


class VertexOutOfRange(InputError):
    pass


class NotAGraph(InputError):
    """A hypergraph has a hyperedge whose size is not 2."""


class EmptyInstance(InputError):
    """Protocols need at least one vertex."""


class ProtocolMismatch(InputError):
    pass


class ConfigError(InputError):
    pass


# -----------------------------
# Card table errors
# -----------------------------
class CardError(GraphShuffleError):
    """An illegal move on the card table."""


class UnequalPileSizes(CardError):
    pass


class PayloadExposure(CardError):
    """Turning a payload card would leak a secret input."""


class AlreadyFaceUp(CardError):
    pass


class HiddenKey(CardError):
    pass


class DuplicateKey(CardError):
    pass


# -----------------------------
# Caps (cli exit 3)
# -----------------------------
class CapExceeded(GraphShuffleError):
    """A configured size cap would be exceeded."""


class GroupTooLarge(CapExceeded):
    pass


class ExactTooLarge(CapExceeded):
    def __init__(self, estimate: int, cap: int):
        self.estimate = estimate
        self.cap = cap
        super().__init__(f"{estimate} branches exceed the cap of {cap}")


class SampleTooSmall(CapExceeded):
    """Too few trials for a meaningful chi-square test."""


# -----------------------------
# Internal consistency
# -----------------------------
class IsomorphismNotFound(GraphShuffleError):
    pass


class InvariantViolation(GraphShuffleError):
    pass


class GearPropositionFails(GraphShuffleError):
    pass
