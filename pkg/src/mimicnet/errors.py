"""Exception types shared across the package."""

from __future__ import annotations


class MimicError(Exception):
    """Base class for all library errors."""


class NotAClique(MimicError):
    pass


class BadIdentification(MimicError):
    pass


class InvalidEmbedding(MimicError):
    pass


class TooLarge(MimicError):
    pass


class MissingCapacities(MimicError):
    pass


class NotInFamily(MimicError):
    pass


class NotFound(MimicError):
    pass


class NotAFace(MimicError):
    pass


class UnanchoredDiffs(MimicError):
    pass


class DimensionMismatch(MimicError):
    pass


class TooManyTerminals(MimicError):
    pass


class CorruptLog(MimicError):
    pass


class FormatError(MimicError):
    """Malformed edge-list or DIMACS input."""
