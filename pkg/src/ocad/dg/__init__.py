"""2D Cartesian bound-preserving modal DG solver."""

from .mesh import Mesh2D
from .solver import DGField, run_case

__all__ = ["Mesh2D", "DGField", "run_case"]
