"""Exception hierarchy shared across the package."""

from __future__ import annotations

from typing import Optional


class OsdnpError(Exception):
    """Base class for all package-specific errors."""


class ParseError(OsdnpError):
    """Input document is not well-formed in the declared format."""


class ValidationError(OsdnpError):
    """Structurally invalid instance; carries the first offending entity."""

    def __init__(self, message: str, entity: Optional[str] = None):
        super().__init__(message)
        self.entity = entity


class ConnectivityError(ValidationError):
    """Stop graph is disconnected and allow_disconnected is off."""


class UnreachablePairError(OsdnpError):
    """An OD-positive pair has no path between its access stops."""

    def __init__(self, origin: str, destination: str):
        super().__init__(f"no path between access stops of OD pair ({origin}, {destination})")
        self.pair = (origin, destination)


class EmptyCandidateError(OsdnpError):
    """A zone has an empty candidate set, making any model trivially infeasible."""

    def __init__(self, zone: str):
        super().__init__(f"zone {zone} has an empty candidate set")
        self.zone = zone


class GuardError(OsdnpError):
    """Instance exceeds a hard size guard of the requested routine."""


class ConsistencyError(OsdnpError):
    """Two views of the same solution disagree; indicates a modeling bug."""
