"""Curved tetrahedra from four closed SU(2) holonomies."""

from .closure import (ClosureConfig, CurvatureClass, SignedNormals, SpecialEdge,
                      classify, fix_signs, gram, validate_closure)
from .errors import HolotetError
from .reconstruction import CurvedTetrahedron, reconstruct
from .rotor import AxisAngle, Rotor, exp_su2, lift_so3, log_su2, rotor_to_rotation

__all__ = [
    "AxisAngle", "ClosureConfig", "CurvatureClass", "CurvedTetrahedron",
    "HolotetError", "Rotor", "SignedNormals", "SpecialEdge", "classify",
    "exp_su2", "fix_signs", "gram", "lift_so3", "log_su2", "reconstruct",
    "rotor_to_rotation", "validate_closure",
]

__version__ = "0.1.0"
