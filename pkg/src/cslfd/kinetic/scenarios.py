"""Initial data and domains of the kinetic and fluid benchmark problems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cslfd.grid import Field, Grid1D, Grid2D

V_MAX = 6.0


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str  # "vlasov", "guiding_center" or "euler"
    grid: Grid2D
    initial: Field
    t_end: float
    snapshot_times: tuple[float, ...] = ()

    @property
    def model(self) -> str:
        return self.kind


def _phase_grid(k: float, nx: int, nv: int, v_max: float = V_MAX) -> Grid2D:
    return Grid2D(Grid1D(nx, 0.0, 2 * np.pi / k), Grid1D(nv, -v_max, v_max, periodic=False))


def _maxwellian(v):
    return np.exp(-0.5 * v**2) / np.sqrt(2 * np.pi)


def landau(alpha: float, k: float = 0.5, nx: int = 128, nv: int = 128) -> tuple[Grid2D, np.ndarray]:
    grid = _phase_grid(k, nx, nv)
    X, V = grid.mesh()
    return grid, (1 + alpha * np.cos(k * X)) * _maxwellian(V)


def two_stream(alpha: float = 0.01, k: float = 0.5, nx: int = 128, nv: int = 128) -> tuple[Grid2D, np.ndarray]:
    grid = _phase_grid(k, nx, nv)
    X, V = grid.mesh()
    pert = 1 + alpha * ((np.cos(2 * k * X) + np.cos(3 * k * X)) / 1.2 + np.cos(k * X))
    return grid, 2.0 / (7.0 * np.sqrt(2 * np.pi)) * (1 + 5 * V**2) * pert * np.exp(-0.5 * V**2)


def symmetric_two_stream(
    alpha: float = 0.05, u: float = 0.99, v_th: float = 0.3, k: float = 2.0 / 13.0, nx: int = 256, nv: int = 128
) -> tuple[Grid2D, np.ndarray]:
    grid = _phase_grid(k, nx, nv)
    X, V = grid.mesh()
    beams = np.exp(-((V - u) ** 2) / (2 * v_th**2)) + np.exp(-((V + u) ** 2) / (2 * v_th**2))
    return grid, beams / (2 * v_th * np.sqrt(2 * np.pi)) * (1 + alpha * np.cos(k * X))


def _square(nx: int, ny: int, lx: float, ly: float) -> Grid2D:
    return Grid2D(Grid1D(nx, 0.0, lx), Grid1D(ny, 0.0, ly))


def kelvin_helmholtz(nx: int = 128, ny: int = 128, k: float = 0.5) -> tuple[Grid2D, np.ndarray]:
    grid = _square(nx, ny, 4 * np.pi, 2 * np.pi)
    X, Y = grid.mesh()
    return grid, np.sin(Y) + 0.015 * np.cos(k * X)


def euler_stationary(nx: int = 40, ny: int | None = None) -> tuple[Grid2D, np.ndarray]:
    grid = _square(nx, ny or nx, 2 * np.pi, 2 * np.pi)
    X, Y = grid.mesh()
    return grid, -2 * np.sin(X) * np.sin(Y)


def vortex_patch(nx: int = 128, ny: int | None = None) -> tuple[Grid2D, np.ndarray]:
    """``-1`` on ``[pi/2, 3pi/2] x [pi/4, 3pi/4]``, ``+1`` on ``[pi/2, 3pi/2] x [5pi/4, 7pi/4]``."""
    grid = _square(nx, ny or nx, 2 * np.pi, 2 * np.pi)
    X, Y = grid.mesh()
    tol = 1e-12
    in_x = (X >= np.pi / 2 - tol) & (X <= 1.5 * np.pi + tol)
    lower = in_x & (Y >= np.pi / 4 - tol) & (Y <= 0.75 * np.pi + tol)
    upper = in_x & (Y >= 1.25 * np.pi - tol) & (Y <= 1.75 * np.pi + tol)
    return grid, np.where(lower, -1.0, 0.0) + np.where(upper, 1.0, 0.0)


def shear_flow(nx: int = 128, ny: int | None = None, delta: float = 0.05, rho: float = np.pi / 15) -> tuple[Grid2D, np.ndarray]:
    """Double shear layer with a ``delta cos(x)`` perturbation."""
    grid = _square(nx, ny or nx, 2 * np.pi, 2 * np.pi)
    X, Y = grid.mesh()
    lower = delta * np.cos(X) - np.cosh((Y - np.pi / 2) / rho) ** -2 / rho
    upper = delta * np.cos(X) + np.cosh((1.5 * np.pi - Y) / rho) ** -2 / rho
    return grid, np.where(Y <= np.pi, lower, upper)


_LIBRARY = {
    "landau_weak": ("vlasov", lambda nx, ny: landau(0.01, 0.5, nx, ny), 60.0, ()),
    "landau_strong": ("vlasov", lambda nx, ny: landau(0.5, 0.5, nx, ny), 60.0, ()),
    "two_stream": ("vlasov", lambda nx, ny: two_stream(0.01, 0.5, nx, ny), 53.0, (53.0,)),
    "symmetric_two_stream": ("vlasov", lambda nx, ny: symmetric_two_stream(nx=nx, nv=ny), 70.0, (70.0,)),
    "kelvin_helmholtz": ("guiding_center", kelvin_helmholtz, 40.0, (40.0,)),
    "euler_stationary": ("euler", euler_stationary, 1.2, ()),
    "vortex_patch": ("euler", vortex_patch, 5.0, (5.0,)),
    "shear_flow": ("euler", shear_flow, 8.0, (6.0, 8.0)),
}

DEFAULT_MESH = {
    "symmetric_two_stream": (256, 128),
    "euler_stationary": (40, 40),
}


def scenario_names() -> list[str]:
    return sorted(_LIBRARY)


def scenario_library(name: str, mesh: tuple[int, int] | None = None) -> Scenario:
    """Initial state, domain, final time and snapshot times of a named problem."""
    if name not in _LIBRARY:
        raise ValueError(f"unknown scenario {name!r}; known: {', '.join(scenario_names())}")
    kind, build, t_end, snaps = _LIBRARY[name]
    nx, ny = mesh or DEFAULT_MESH.get(name, (128, 128))
    if nx < 8 or ny < 8:
        raise ValueError("mesh must have at least 8 points per direction")
    grid, values = build(nx, ny)
    return Scenario(name, kind, grid, Field(grid, values), t_end, snaps)
