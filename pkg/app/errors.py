"""
SolAut Errors Module
Domain exceptions shared by the library, the CLI and the HTTP API.

Every exception carries the CLI exit code it maps to, so the command
line layer never needs a lookup table of its own.
"""

from typing import Optional


class SolAutError(Exception):
    """Base class for all domain errors."""
    exit_code: int = 1
    http_status: int = 400

    def __init__(self, message: str = "", detail: Optional[dict] = None):
        super().__init__(message or self.__class__.__name__)
        self.detail = detail or {}

    @property
    def code(self) -> str:
        return self.__class__.__name__


# ----- Input parsing -----

class ParseError(SolAutError):
    exit_code = 2
    http_status = 422


# ----- Matrix domain -----

class NotUnimodular(SolAutError):
    exit_code = 3


class NotAnosov(SolAutError):
    exit_code = 3


class DegenerateInput(SolAutError):
    exit_code = 3


class NoReverser(SolAutError):
    exit_code = 3


class NotAReverser(SolAutError):
    exit_code = 3


class RootSearchExhausted(SolAutError):
    """The primitive-root scan hit its configured cap without finding a unit."""
    exit_code = 3


# ----- Group construction -----

class NotSol(SolAutError):
    exit_code = 5


class DetMinusOne(SolAutError):
    exit_code = 5


class TorusBundleDegenerate(SolAutError):
    exit_code = 5


# ----- Word engine and realizations -----

class GroupMismatch(SolAutError):
    pass


class NotInvertible(SolAutError):
    pass


class InfiniteTree(SolAutError):
    pass


class TooLarge(SolAutError):
    pass


class VerificationError(SolAutError):
    """A structural claim failed its independent check."""
    exit_code = 4
    http_status = 500
