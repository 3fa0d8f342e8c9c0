# haptickit/errors.py
"""
Named domain errors. The class name of each error is its stable, documented
name; the CLI prints it verbatim on stderr.
"""
from __future__ import annotations

from typing import Any, Optional, Sequence, Tuple


class HaptickitError(Exception):
    """Base class. ``stage`` is filled in by the device layer."""

    def __init__(self, message: str = "", **extra: Any):
        super().__init__(message)
        self.message = message
        self.stage: Optional[str] = None
        for key, value in extra.items():
            setattr(self, key, value)

    @property
    def name(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        prefix = f"[{self.stage}] " if self.stage else ""
        return f"{self.name}: {prefix}{self.message}"


# --- geometry / configuration ------------------------------------------------
class GeometryError(HaptickitError):
    pass


class NonPositiveLength(GeometryError):
    pass


class EmptyStroke(GeometryError):
    pass


class BadAngleLimit(GeometryError):
    pass


class ParseError(GeometryError):
    pass


class SchemaError(GeometryError):
    pass


# --- kinematics --------------------------------------------------------------
class KinematicsError(HaptickitError):
    pass


class LegError(KinematicsError):
    """An error attributable to one or more legs (1-based indices)."""

    def __init__(self, message: str = "", legs: Sequence[int] = (), **extra: Any):
        super().__init__(message, **extra)
        self.legs: Tuple[int, ...] = tuple(int(i) for i in legs)


class OutsideCylinder(LegError):
    pass


class StrokeExceeded(LegError):
    pass


class ConeExceeded(LegError):
    pass


class BoundarySingular(LegError):
    pass


class NoIntersection(KinematicsError):
    pass


class BranchAmbiguous(KinematicsError):
    pass


class SingularConfiguration(KinematicsError):
    pass


class GimbalSingular(KinematicsError):
    pass


class BendOutOfRange(KinematicsError):
    pass


class WristLimitExceeded(KinematicsError):
    pass


class UnsupportedVariant(KinematicsError):
    pass


# --- workspace ---------------------------------------------------------------
class WorkspaceError(HaptickitError):
    pass


class BadBounds(WorkspaceError):
    pass


class BadResolution(WorkspaceError):
    pass


class EmptyWorkspace(WorkspaceError):
    pass


class CubeNotFeasible(WorkspaceError):
    pass


# --- sizing ------------------------------------------------------------------
class SizingError(HaptickitError):
    pass


class Unachievable(SizingError):
    pass


class BadBound(SizingError):
    pass


class EmptyInput(SizingError):
    pass


# Order matters: it is the precedence used when a point fails several checks.
LEG_FAILURES = (OutsideCylinder, BoundarySingular, StrokeExceeded, ConeExceeded)


def error_names() -> Tuple[str, ...]:
    """Every concrete error name, for documentation and the CLI help."""
    found = []
    stack = list(HaptickitError.__subclasses__())
    while stack:
        cls = stack.pop(0)
        subs = cls.__subclasses__()
        if subs:
            stack.extend(subs)
        elif cls is not LegError:
            found.append(cls.__name__)
    return tuple(sorted(found))
