# haptickit/model.py
"""
Shared domain types, geometric conventions and geometry file loading.

Units are meters and radians internally; geometry files carry angles in
degrees (keys with a ``_deg`` suffix). The three prismatic axes are the
fixed frame axes e1=x, e2=y, e3=z, and every leg is modelled as a point
constraint: leg i keeps the platform at distance L from rho_i * e_i.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from . import rotations
from .errors import BadAngleLimit, EmptyStroke, NonPositiveLength, ParseError, SchemaError
from .utils import DEG, to_degrees_exact

AXES = np.eye(3)

# Default geometry (CLI and geometry.json).
DEFAULT_LEG_LENGTH = 1.0
DEFAULT_STROKE = (0.05, 2.0)
DEFAULT_HALF_CONE = 60.0 * DEG
DEFAULT_WRIST_LIMIT = 45.0 * DEG

# Half-cone used when the parallelogram angle should never bind.
OPEN_HALF_CONE = math.pi / 2.0 - 1e-9

# 90 deg as read from a file may round one ulp above pi/2.
RIGHT_ANGLE = max(math.pi / 2.0, 90.0 * DEG)

REQUIRED_KEYS = ("leg_length", "stroke")
OPTIONAL_KEYS = ("parallelogram_half_cone_deg", "wrist_pitch_yaw_limit_deg", "variant")


class Variant(str, Enum):
    THREE_T_TWO_R_ONE_R = "3T2R1R"
    THREE_T_THREE_R = "3T3R"


@dataclass(frozen=True)
class DeviceGeometry:
    leg_length: float
    stroke_min: float
    stroke_max: float
    parallelogram_half_cone: float = DEFAULT_HALF_CONE
    wrist_pitch_yaw_limit: float = DEFAULT_WRIST_LIMIT
    variant: Variant = Variant.THREE_T_TWO_R_ONE_R

    @property
    def stroke(self) -> Tuple[float, float]:
        return (self.stroke_min, self.stroke_max)

    @classmethod
    def default(cls) -> "DeviceGeometry":
        return cls(DEFAULT_LEG_LENGTH, *DEFAULT_STROKE)

    @classmethod
    def unconstrained(cls, leg_length: float = DEFAULT_LEG_LENGTH) -> "DeviceGeometry":
        """Unbounded strokes and a parallelogram cone that never binds."""
        return cls(leg_length, -math.inf, math.inf, parallelogram_half_cone=OPEN_HALF_CONE)

    def with_leg_length(self, leg_length: float) -> "DeviceGeometry":
        return replace(self, leg_length=float(leg_length))


def _frozen_array(values, size: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (size,):
        raise ValueError(f"{name} needs {size} values, got {arr.size}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TranslationJoints:
    """Prismatic joint values rho (meters), one per orthogonal leg."""
    rho: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", _frozen_array(self.rho, 3, "rho"))


@dataclass(frozen=True, eq=False)
class WristJoints:
    """theta1 about x, theta2 about the rotated y, theta3 roll about the rotated z."""
    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen_array(self.theta, 3, "theta"))


@dataclass(frozen=True, eq=False)
class Pose:
    position: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: rotations.IDENTITY.copy())

    def __post_init__(self):
        object.__setattr__(self, "position", _frozen_array(self.position, 3, "position"))
        q = rotations.canonical(_frozen_array(self.orientation, 4, "orientation"))
        q.setflags(write=False)
        object.__setattr__(self, "orientation", q)


@dataclass(frozen=True)
class CardanChainState:
    """Transmission of one leg: motor shaft -> U-joint 1 -> U-joint 2."""
    bend_angle: float
    phase: float
    phi_motor: float
    phi_after_u1: float
    phi_after_u2: float


def as_vector(values, size: int = 3) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape != (size,):
        raise ValueError(f"expected {size} values, got {arr.size}")
    return arr


def rho_of(joints: Union[TranslationJoints, Any]) -> np.ndarray:
    return as_vector(getattr(joints, "rho", joints))


def theta_of(joints: Union[WristJoints, Any]) -> np.ndarray:
    return as_vector(getattr(joints, "theta", joints))


# -------------------------------------------------------------------
# Validation and geometry documents
# -------------------------------------------------------------------

def validate_geometry(geom: DeviceGeometry) -> DeviceGeometry:
    """Return ``geom`` unchanged when every geometry invariant holds."""
    L = geom.leg_length
    if not (math.isfinite(L) and L > 0.0):
        raise NonPositiveLength(f"leg_length must be finite and > 0, got {L!r}")
    if math.isnan(geom.stroke_min) or math.isnan(geom.stroke_max) or not geom.stroke_min < geom.stroke_max:
        raise EmptyStroke(f"stroke interval [{geom.stroke_min!r}, {geom.stroke_max!r}] is empty")
    cone = geom.parallelogram_half_cone
    if not (0.0 < cone < math.pi / 2.0):
        raise BadAngleLimit(f"parallelogram_half_cone must lie in (0, 90) deg, got {cone / DEG!r} deg")
    wrist = geom.wrist_pitch_yaw_limit
    if not (0.0 < wrist <= RIGHT_ANGLE):
        raise BadAngleLimit(f"wrist_pitch_yaw_limit must lie in (0, 90] deg, got {wrist / DEG!r} deg")
    if not isinstance(geom.variant, Variant):
        raise SchemaError(f"unknown variant {geom.variant!r}")
    return geom


def _number(doc: Dict[str, Any], key: str) -> float:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"'{key}' must be a number, got {value!r}")
    return float(value)


def _stroke_bound(value: Any, unbounded: float) -> float:
    if value is None:
        return unbounded
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"stroke bounds must be numbers or null, got {value!r}")
    return float(value)


def load_geometry(text: str) -> DeviceGeometry:
    """
    Parse a geometry JSON document:

        {"leg_length": 1.0, "stroke": [0.2, 2.0],
         "parallelogram_half_cone_deg": 60, "wrist_pitch_yaw_limit_deg": 45,
         "variant": "3T2R1R"}

    ``leg_length`` and ``stroke`` are required; the others default to the
    values of ``DeviceGeometry``. ``null`` in ``stroke`` leaves that side
    unbounded.
    """
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError, TypeError) as e:
        raise ParseError(f"geometry is not valid JSON ({e})") from None
    if not isinstance(doc, dict):
        raise SchemaError("geometry document must be a JSON object")

    missing = [k for k in REQUIRED_KEYS if k not in doc]
    extra = sorted(set(doc) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS))
    if missing:
        raise SchemaError(f"missing field(s): {', '.join(missing)}")
    if extra:
        raise SchemaError(f"unknown field(s): {', '.join(extra)}")

    stroke = doc["stroke"]
    if not isinstance(stroke, list) or len(stroke) != 2:
        raise SchemaError("'stroke' must be a two-element list [min, max]")

    kwargs: Dict[str, Any] = {
        "leg_length": _number(doc, "leg_length"),
        "stroke_min": _stroke_bound(stroke[0], -math.inf),
        "stroke_max": _stroke_bound(stroke[1], math.inf),
    }
    if "parallelogram_half_cone_deg" in doc:
        kwargs["parallelogram_half_cone"] = _number(doc, "parallelogram_half_cone_deg") * DEG
    if "wrist_pitch_yaw_limit_deg" in doc:
        kwargs["wrist_pitch_yaw_limit"] = _number(doc, "wrist_pitch_yaw_limit_deg") * DEG
    if "variant" in doc:
        try:
            kwargs["variant"] = Variant(doc["variant"])
        except ValueError:
            tags = ", ".join(v.value for v in Variant)
            raise SchemaError(f"variant must be one of {tags}, got {doc['variant']!r}") from None

    return validate_geometry(DeviceGeometry(**kwargs))


def load_geometry_file(path: Union[str, Path]) -> DeviceGeometry:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read geometry file {path}: {e.strerror}") from None
    except UnicodeDecodeError as e:
        raise ParseError(f"geometry file {path} is not UTF-8 text ({e.reason} at byte {e.start})") from None
    return load_geometry(text)


def geometry_to_dict(geom: DeviceGeometry) -> Dict[str, Any]:
    def bound(v: float):
        return None if math.isinf(v) else v

    return {
        "leg_length": geom.leg_length,
        "stroke": [bound(geom.stroke_min), bound(geom.stroke_max)],
        "parallelogram_half_cone_deg": to_degrees_exact(geom.parallelogram_half_cone),
        "wrist_pitch_yaw_limit_deg": to_degrees_exact(geom.wrist_pitch_yaw_limit),
        "variant": geom.variant.value,
    }


def serialize_geometry(geom: DeviceGeometry) -> str:
    return json.dumps(geometry_to_dict(geom), indent=2)
