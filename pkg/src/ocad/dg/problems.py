"""Hyperbolic problems: fluxes, wave speeds, and admissible-state tests.

State arrays carry the component axis second-to-last, shape (..., m, npts);
scalar problems use m = 1.
"""

from __future__ import annotations

import numpy as np


class Advection:
    """u_t + a.grad(u) = 0 with constant velocity."""

    m = 1
    kind = "advection"
    constant_speeds = True

    def __init__(self, ax: float = 1.0, ay: float = 1.0):
        self.ax = ax
        self.ay = ay

    def flux_x(self, u):
        return self.ax * u

    def flux_y(self, u):
        return self.ay * u

    def fluxes(self, u):
        return self.ax * u, self.ay * u

    def wave_speeds(self, traces):
        return abs(self.ax), abs(self.ay)


class Burgers:
    """u_t + (u^2/2)_x + (u^2/2)_y = 0."""

    m = 1
    kind = "burgers"

    def flux_x(self, u):
        return 0.5 * u * u

    flux_y = flux_x

    def fluxes(self, u):
        f = 0.5 * u * u
        return f, f

    def wave_speeds(self, traces):
        a = max(float(np.max(np.abs(t))) for t in traces)
        return max(a, 1e-12), max(a, 1e-12)


class Euler:
    """Compressible Euler equations, state (rho, m1, m2, E)."""

    m = 4
    kind = "euler"

    def __init__(self, gamma: float = 1.4):
        self.gamma = gamma

    def _primitive(self, u):
        rho = u[..., 0, :]
        inv = 1.0 / rho
        v1 = u[..., 1, :] * inv
        v2 = u[..., 2, :] * inv
        E = u[..., 3, :]
        P = (self.gamma - 1.0) * (E - 0.5 * (u[..., 1, :] * v1 + u[..., 2, :] * v2))
        return rho, v1, v2, E, P

    def pressure(self, u):
        return self._primitive(u)[4]

    def rho_e(self, u):
        rho = u[..., 0, :]
        return u[..., 3, :] - 0.5 * (u[..., 1, :] ** 2 + u[..., 2, :] ** 2) / rho

    def flux_x(self, u):
        _, v1, _, E, P = self._primitive(u)
        out = np.empty_like(u)
        out[..., 0, :] = u[..., 1, :]
        out[..., 1, :] = u[..., 1, :] * v1 + P
        out[..., 2, :] = u[..., 2, :] * v1
        out[..., 3, :] = (E + P) * v1
        return out

    def flux_y(self, u):
        _, _, v2, E, P = self._primitive(u)
        out = np.empty_like(u)
        out[..., 0, :] = u[..., 2, :]
        out[..., 1, :] = u[..., 1, :] * v2
        out[..., 2, :] = u[..., 2, :] * v2 + P
        out[..., 3, :] = (E + P) * v2
        return out

    def fluxes(self, u):
        """Both directional fluxes from one primitive evaluation."""
        _, v1, v2, E, P = self._primitive(u)
        f1 = np.empty_like(u)
        f2 = np.empty_like(u)
        f1[..., 0, :] = u[..., 1, :]
        f1[..., 1, :] = u[..., 1, :] * v1 + P
        f1[..., 2, :] = u[..., 2, :] * v1
        f1[..., 3, :] = (E + P) * v1
        f2[..., 0, :] = u[..., 2, :]
        f2[..., 1, :] = u[..., 1, :] * v2
        f2[..., 2, :] = u[..., 2, :] * v2 + P
        f2[..., 3, :] = (E + P) * v2
        return f1, f2

    def sound_speed(self, u):
        rho = u[..., 0, :]
        P = self.pressure(u)
        return np.sqrt(self.gamma * np.maximum(P, 0.0) / rho)

    def wave_speeds(self, traces):
        a1 = a2 = 1e-12
        for t in traces:
            # floored density: near-vacuum traces may round a hair negative
            rho = np.maximum(t[..., 0, :], 1e-300)
            v1 = t[..., 1, :] / rho
            v2 = t[..., 2, :] / rho
            P = (self.gamma - 1.0) * (
                t[..., 3, :] - 0.5 * (t[..., 1, :] * v1 + t[..., 2, :] * v2)
            )
            c = np.sqrt(self.gamma * np.maximum(P, 0.0) / rho)
            a1 = max(a1, float(np.max(np.abs(v1) + c)))
            a2 = max(a2, float(np.max(np.abs(v2) + c)))
        return a1, a2

    def admissible(self, u) -> np.ndarray:
        return (u[..., 0, :] > 0.0) & (self.rho_e(u) > 0.0)


def conservative_state(gamma, rho, v1, v2, P):
    """Stack primitive fields into the conservative state (component axis -2)."""
    E = 0.5 * rho * (v1 * v1 + v2 * v2) + P / (gamma - 1.0)
    return np.stack([rho, rho * v1, rho * v2, E], axis=-2)
