"""Exact free divisor certificates for solvable block representations on matrix spaces."""

from __future__ import annotations

from .factor import Factorization, existence_conditions, factorize, uniqueness_probe
from .poly import PolyMatrix, Polynomial, Variable, determinant, gcd, is_squarefree, pfaffian
from .saito import DivisorReport, SaitoMatrix, assemble, classify, tower_step
from .spaces import FamilySpec, build_family
from .vfields import PolyVectorField, lie_bracket, verify_bracket_closure

__all__ = [
    "DivisorReport",
    "FamilySpec",
    "Factorization",
    "PolyMatrix",
    "PolyVectorField",
    "Polynomial",
    "SaitoMatrix",
    "Variable",
    "assemble",
    "build_family",
    "classify",
    "determinant",
    "existence_conditions",
    "factorize",
    "gcd",
    "is_squarefree",
    "lie_bracket",
    "pfaffian",
    "tower_step",
    "uniqueness_probe",
    "verify_bracket_closure",
]
__version__ = "0.1.0"
