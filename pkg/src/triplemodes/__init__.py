"""Triple modes of the electromagnetic field at a dielectric half-space."""
from .errors import *  # noqa: F401,F403
from .medium import HalfSpaceMedium, ModeKinematics, Region, Side, make_kinematics
from .modes import NormalizationVariant, Polarization, TripleMode, build_mode

__all__ = [
    "HalfSpaceMedium",
    "ModeKinematics",
    "NormalizationVariant",
    "Polarization",
    "Region",
    "Side",
    "TripleMode",
    "build_mode",
    "make_kinematics",
]
