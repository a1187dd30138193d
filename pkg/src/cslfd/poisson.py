"""Periodic spectral Poisson solves and the fields derived from them.

Potentials are gauge fixed to zero mean. Sources are projected onto zero
mean before the solve; in 1D a mean of ``rho - 1`` beyond the neutrality
tolerance is an error because it signals mass drift.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from cslfd.grid import Field, Grid1D, Grid2D

logger = logging.getLogger(__name__)

SIGNS = {"guiding_center": -1.0, "euler": 1.0}
"""``sigma`` in ``Laplace(Phi) = sigma * source`` for each 2D model."""

_CENTRAL6 = np.array([-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60])


@dataclass(frozen=True)
class ElectricField1D:
    E: Field
    phi: Field


@dataclass(frozen=True)
class FieldPair2D:
    """``(E1, E2) = -grad(Phi)`` and the potential.

    The transport velocity of both 2D models is ``(E2, -E1) = (-Phi_y, Phi_x)``.
    """

    E1: Field
    E2: Field
    phi: Field

    @property
    def velocity(self) -> tuple[np.ndarray, np.ndarray]:
        return self.E2.values, -self.E1.values


def _wavenumbers_2d(grid: Grid2D):
    kx = grid.gx.wavenumbers()
    ky = 2.0 * np.pi * np.fft.rfftfreq(grid.gy.n, d=grid.gy.dx)
    KX, KY = np.meshgrid(kx, ky, indexing="ij")
    return KX, KY


def _require_periodic(*axes: Grid1D):
    for g in axes:
        if not g.periodic:
            raise ValueError("spectral Poisson solves need a periodic grid")


def solve_poisson_1d(rho: Field, neutrality_tol: float = 1e-10) -> ElectricField1D:
    """Solve ``-phi_xx = rho - 1`` and return ``E = -phi_x``.

    Raises ``ValueError`` when ``|mean(rho) - 1| > neutrality_tol``; a smaller
    offset is projected out.
    """
    grid = rho.grid
    if not isinstance(grid, Grid1D):
        raise TypeError("solve_poisson_1d needs a 1D field")
    _require_periodic(grid)
    src = rho.values - 1.0
    offset = float(np.mean(src))
    if abs(offset) > neutrality_tol:
        raise ValueError(f"charge neutrality violated: mean(rho) - 1 = {offset:.3e}")
    n = grid.n
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=grid.dx)
    src_hat = np.fft.rfft(src - offset)
    phi_hat = np.zeros_like(src_hat)
    phi_hat[1:] = src_hat[1:] / k[1:] ** 2
    E_hat = -1j * k * phi_hat
    if n % 2 == 0:
        E_hat[-1] = 0.0
    phi = np.fft.irfft(phi_hat, n)
    E = np.fft.irfft(E_hat, n)
    return ElectricField1D(Field(grid, E), Field(grid, phi))


def solve_poisson_2d(source: Field, sign: str = "guiding_center", warn: bool = True) -> FieldPair2D:
    """Solve ``Laplace(Phi) = sigma * source`` with ``sigma = -1`` (guiding centre) or ``+1`` (Euler)."""
    grid = source.grid
    if not isinstance(grid, Grid2D):
        raise TypeError("solve_poisson_2d needs a 2D field")
    if sign not in SIGNS:
        raise ValueError(f"sign must be one of {sorted(SIGNS)}, got {sign!r}")
    return _solve_2d(grid, SIGNS[sign] * source.values, warn)


def _solve_2d(grid: Grid2D, rhs: np.ndarray, warn: bool) -> FieldPair2D:
    """``Laplace(Phi) = rhs`` after removing the mean of ``rhs``."""
    _require_periodic(grid.gx, grid.gy)
    mean = float(np.mean(rhs))
    if warn and abs(mean) > 1e-10:
        warnings.warn(f"Poisson source has mean {mean:.3e}; projecting it out", RuntimeWarning, stacklevel=3)
    nx, ny = grid.shape
    KX, KY = _wavenumbers_2d(grid)
    k2 = KX**2 + KY**2
    rhs_hat = np.fft.rfft2(rhs - mean)
    phi_hat = np.zeros_like(rhs_hat)
    nz = k2 > 0
    phi_hat[nz] = -rhs_hat[nz] / k2[nz]
    # derivatives of the Nyquist modes are dropped so real data stay real
    dx_hat = 1j * KX * phi_hat
    dy_hat = 1j * KY * phi_hat
    if nx % 2 == 0:
        dx_hat[nx // 2, :] = 0.0
    if ny % 2 == 0:
        dy_hat[:, -1] = 0.0
    phi = np.fft.irfft2(phi_hat, (nx, ny))
    E1 = -np.fft.irfft2(dx_hat, (nx, ny))
    E2 = -np.fft.irfft2(dy_hat, (nx, ny))
    return FieldPair2D(Field(grid, E1), Field(grid, E2), Field(grid, phi))


def central_difference(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Sixth-order central first derivative on a periodic axis."""
    out = np.zeros_like(values, dtype=float)
    for shift, w in zip(range(-3, 4), _CENTRAL6):
        if w:
            out += w * np.roll(values, -shift, axis=axis)
    return out / h


def solve_field_time_derivative(fields: FieldPair2D, source: Field, sign: str = "guiding_center") -> FieldPair2D:
    """Time derivative of ``E`` implied by transporting ``source`` with ``(E2, -E1)``.

    ``w_t = -div(w U)`` with ``U = (E2, -E1)``; differentiating
    ``Laplace(Phi) = sigma w`` in time gives ``Laplace(Phi_t) = -sigma div(w U)``,
    whose right-hand side is built with sixth-order central differences.
    Returns ``(E1_t, E2_t, Phi_t)``.
    """
    if sign not in SIGNS:
        raise ValueError(f"sign must be one of {sorted(SIGNS)}, got {sign!r}")
    grid = source.grid
    w = source.values
    u, v = fields.velocity
    div = central_difference(w * u, grid.gx.dx, 0) + central_difference(w * v, grid.gy.dx, 1)
    return _solve_2d(grid, -SIGNS[sign] * div, warn=False)


def field_time_derivative_1d(current: np.ndarray) -> np.ndarray:
    """``E_t = -(J - mean J)`` for the 1D field, from ``E_x = rho - 1`` and ``rho_t + J_x = 0``."""
    return -(current - np.mean(current))
