"""Uniform Cartesian mesh with per-side boundary conditions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BC_KINDS = ("periodic", "outflow", "inflow")
SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class Mesh2D:
    nx: int
    ny: int
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    bc: dict = field(default_factory=lambda: {s: "periodic" for s in SIDES})

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("cell counts must be positive")
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValueError("domain bounds must be increasing")
        for side in SIDES:
            kind = self.bc.get(side, "periodic")
            if kind not in BC_KINDS:
                raise ValueError(f"unknown boundary condition {kind!r} on {side}")
        # periodic sides must come in pairs
        for a, b in (("left", "right"), ("bottom", "top")):
            if (self.bc.get(a) == "periodic") != (self.bc.get(b) == "periodic"):
                raise ValueError(f"periodic boundary must pair {a}/{b}")

    @property
    def dx(self) -> float:
        return (self.xmax - self.xmin) / self.nx

    @property
    def dy(self) -> float:
        return (self.ymax - self.ymin) / self.ny

    @property
    def centers_x(self) -> np.ndarray:
        return self.xmin + self.dx * (np.arange(self.nx) + 0.5)

    @property
    def centers_y(self) -> np.ndarray:
        return self.ymin + self.dy * (np.arange(self.ny) + 0.5)
