"""Optimal cell average decompositions for bound-preserving schemes."""

from .polyspace import Polynomial2D, SpaceId, SymOrbit
from .cad import CAD1D, GeneralCAD, SymmetricCAD

__all__ = [
    "Polynomial2D",
    "SpaceId",
    "SymOrbit",
    "CAD1D",
    "GeneralCAD",
    "SymmetricCAD",
]

__version__ = "0.1.0"
