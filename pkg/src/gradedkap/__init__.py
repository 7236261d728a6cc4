"""Exact computations with dg manifolds, PBW maps and Kapranov L-infinity[1] towers.

Everything is polynomial over the rationals: functions on a graded chart,
vector fields, symmetric tensor fields and differential operators, affine
connections with their Atiyah cocycles, the PBW map and its defect, the
Kapranov tower R_n, the Fedosov-type construction of B, and
Chevalley-Eilenberg complexes for L-infinity[1] algebras.
"""

from __future__ import annotations

from .core import (GradedKapError, InternalInconsistency, InvalidInput, NotAnLInftyStructure,
                   SpecParseError)
from .functions import Chart, FormalFunction, LInftySpec, VectorField, check_homological, q_from_spec
from .coalgebra import BundleMap, SymTensorField
from .diffops import DiffOp
from .connections import Connection, atiyah_cocycle
from .linfty import parse_spec, parse_connection

__all__ = [
    "BundleMap", "Chart", "Connection", "DiffOp", "FormalFunction", "GradedKapError",
    "InternalInconsistency", "InvalidInput", "LInftySpec", "NotAnLInftyStructure",
    "SpecParseError", "SymTensorField", "VectorField", "atiyah_cocycle", "check_homological",
    "parse_connection", "parse_spec", "q_from_spec",
]
