"""Castability and fatness analysis of convex polyhedra."""

__version__ = "0.1.0"

from .bounds import CaseBound, all_cases, theorem_constant
from .casting import CastVerdict, DirectionRegion, castable_faces, check_lemma2, direction_lp, thickness
from .errors import (CapExceeded, CenterOutside, DegenerateCut, DegenerateInput, FatcastError, InvalidPolyhedron,
                     NotCastable, OFFParseError, PerturbationFailed, PreconditionFailed)
from .fatness import FatnessReport, annulus_at, best_center, check_lemma1
from .geometry import (ConvexPolyhedron, CutResult, Plane, build_hull, clip, diameter, edge_lengths, face_area,
                       validate_general_position, volume)
from .offio import read_off, write_off

__all__ = [
    "CaseBound", "all_cases", "theorem_constant",
    "CastVerdict", "DirectionRegion", "castable_faces", "check_lemma2", "direction_lp", "thickness",
    "CapExceeded", "CenterOutside", "DegenerateCut", "DegenerateInput", "FatcastError", "InvalidPolyhedron",
    "NotCastable", "OFFParseError", "PerturbationFailed", "PreconditionFailed",
    "FatnessReport", "annulus_at", "best_center", "check_lemma1",
    "ConvexPolyhedron", "CutResult", "Plane", "build_hull", "clip", "diameter", "edge_lengths", "face_area",
    "validate_general_position", "volume",
    "read_off", "write_off",
]
