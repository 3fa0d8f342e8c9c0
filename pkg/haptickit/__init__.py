"""Kinematics, workspace analysis and sizing of a 6-dof haptic device built
from an orthogonal translational stage and a 2R+1R wrist."""

from .errors import HaptickitError
from .model import DeviceGeometry, Pose, TranslationJoints, Variant, WristJoints, load_geometry

__version__ = "0.1.0"

__all__ = [
    "DeviceGeometry",
    "HaptickitError",
    "Pose",
    "TranslationJoints",
    "Variant",
    "WristJoints",
    "load_geometry",
]
