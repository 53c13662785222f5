"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class HSRCError(Exception):
    """Base class for every error raised by this package."""


class FieldError(HSRCError, ValueError):
    """Invalid field construction or an operation mixing two fields."""


class CodeError(HSRCError, ValueError):
    """Code parameters violate a structural bound."""


class DomainError(HSRCError):
    """A well-formed request that cannot be satisfied by the data at hand."""


class Unrecoverable(DomainError):
    def __init__(self, rank: int, k: int):
        self.rank = rank
        self.k = k
        super().__init__(f"unrecoverable: rank {rank} < k={k}")


class CorruptFragments(DomainError):
    def __init__(self, detail: str = ""):
        msg = "corrupt fragments"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class Irreparable(DomainError):
    """The target point is outside the span of the available points."""


class ContainerError(HSRCError, ValueError):
    """Malformed fragment file."""
