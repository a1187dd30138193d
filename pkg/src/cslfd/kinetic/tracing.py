"""Characteristic tracing for self-consistent transport.

The models here advect a scalar ``w`` with a velocity ``U`` that is a global
functional of ``w`` (through a Poisson solve), so a Runge-Kutta integrator
cannot be used for the feet. Instead a predictor/corrector cascade is used:

* order 1: ``D = U^n tau``
* order 2: ``D = (U^{(1)} + U^n(foot_1)) tau / 2`` where ``U^{(1)}`` is solved from
  ``w`` interpolated at ``foot_1``
* order 3: ``D = U^{(2)} tau - tau^2/2 (2/3 DU^{(2)} + 1/3 DU^n(foot_2))`` with
  the material derivative ``DU = U_t + (U . grad) U``

``D`` is the displacement ``arrival - foot`` at every grid point. A model
supplies the velocity and its material derivative at grid points for a given
state, and evaluates them at feet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cslfd.grid import Field, Grid1D, Grid2D
from cslfd.poisson import (
    SIGNS,
    central_difference,
    field_time_derivative_1d,
    solve_field_time_derivative,
    solve_poisson_1d,
    solve_poisson_2d,
)
from cslfd.weno import StencilSpec, interpolate_2d, interpolate_departure


@dataclass
class ModelFields:
    """Velocity ``(u, v)`` at grid points and, when requested, its material derivative."""

    u: np.ndarray
    v: np.ndarray
    du: np.ndarray | None = None
    dv: np.ndarray | None = None
    aux: dict | None = None


class TransportModel:
    """Interface shared by the self-consistent and frozen-field models."""

    grid: Grid2D
    boundary: tuple[str, str] = ("periodic", "periodic")
    field_spec: StencilSpec

    def fields(self, w: np.ndarray, material: bool = False) -> ModelFields:
        raise NotImplementedError

    def velocity_at(self, fields: ModelFields, disp_x, disp_y) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def material_at(self, fields: ModelFields, disp_x, disp_y) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def state_at(self, w: np.ndarray, disp_x, disp_y, spec: StencilSpec) -> np.ndarray:
        """``w`` interpolated at the feet ``grid point - disp``."""
        g = self.grid
        return interpolate_2d(w, disp_x / g.gx.dx, disp_y / g.gy.dx, spec, self.boundary)

    def _interp(self, values, disp_x, disp_y):
        g = self.grid
        return interpolate_2d(values, disp_x / g.gx.dx, disp_y / g.gy.dx, self.field_spec, ("periodic", "periodic"))


def _field_spec(order: int) -> StencilSpec:
    """Linear interpolation of smooth fields; even orders are bumped to the next odd one."""
    return StencilSpec(order if order % 2 else order + 1, "linear")


class PlanarModel(TransportModel):
    """Guiding-centre (``Laplace Phi = -rho``) or Euler (``Laplace psi = omega``) transport.

    The velocity is ``(E2, -E1) = (-Phi_y, Phi_x)`` in both cases.
    """

    def __init__(self, grid: Grid2D, sign: str = "guiding_center", field_order: int = 5):
        if sign not in SIGNS:
            raise ValueError(f"sign must be one of {sorted(SIGNS)}, got {sign!r}")
        self.grid = grid
        self.sign = sign
        self.field_spec = _field_spec(field_order)

    def fields(self, w, material=False):
        src = Field(self.grid, w)
        pair = solve_poisson_2d(src, self.sign, warn=False)
        u, v = pair.velocity
        out = ModelFields(np.array(u), np.array(v), aux={"pair": pair})
        if material:
            dpair = solve_field_time_derivative(pair, src, self.sign)
            ut, vt = dpair.velocity
            hx, hy = self.grid.gx.dx, self.grid.gy.dx
            out.du = ut + u * central_difference(u, hx, 0) + v * central_difference(u, hy, 1)
            out.dv = vt + u * central_difference(v, hx, 0) + v * central_difference(v, hy, 1)
        return out

    def velocity_at(self, fields, disp_x, disp_y):
        return self._interp(fields.u, disp_x, disp_y), self._interp(fields.v, disp_x, disp_y)

    def material_at(self, fields, disp_x, disp_y):
        return self._interp(fields.du, disp_x, disp_y), self._interp(fields.dv, disp_x, disp_y)


class VlasovModel(TransportModel):
    """1D1V Vlasov-Poisson in ``(x, v)``: ``U = (v, E(x))``, ``-phi_xx = rho - background``.

    ``x`` is periodic; ``f`` vanishes beyond the velocity grid.
    """

    boundary = ("periodic", "zero")

    def __init__(self, grid: Grid2D, background: float = 1.0, field_order: int = 5):
        self.grid = grid
        self.background = background
        self.field_spec = _field_spec(field_order)
        self._x = Grid1D(grid.gx.n, grid.gx.x_min, grid.gx.x_max)
        self._V = np.broadcast_to(grid.gy.points[None, :], grid.shape)

    def solve_field(self, f: np.ndarray, neutrality_tol: float = np.inf) -> np.ndarray:
        """Electric field at the ``x`` nodes; the source is rescaled to unit background."""
        rho = f.sum(axis=1) * self.grid.gy.dx / self.background
        return self.background * solve_poisson_1d(Field(self._x, rho), neutrality_tol).E.values

    def fields(self, w, material=False):
        E = self.solve_field(w)
        nv = self.grid.gy.n
        out = ModelFields(np.array(self._V), np.repeat(E[:, None], nv, axis=1), aux={"E": E})
        if material:
            dv = self.grid.gy.dx
            rho = w.sum(axis=1) * dv
            J = (w * self._V).sum(axis=1) * dv
            Et = field_time_derivative_1d(J)
            Ex = rho - np.mean(rho)
            out.du = np.array(out.v)
            out.dv = Et[:, None] + self._V * Ex[:, None]
            out.aux.update(Et=Et, Ex=Ex)
        return out

    def _interp_x(self, values_1d, disp_x):
        shift = disp_x / self.grid.gx.dx
        return interpolate_departure(np.broadcast_to(values_1d[:, None], shift.shape), shift, self.field_spec, axis=0)

    def velocity_at(self, fields, disp_x, disp_y):
        return self._V - disp_y, self._interp_x(fields.aux["E"], disp_x)

    def material_at(self, fields, disp_x, disp_y):
        E = self._interp_x(fields.aux["E"], disp_x)
        Et = self._interp_x(fields.aux["Et"], disp_x)
        Ex = self._interp_x(fields.aux["Ex"], disp_x)
        return E, Et + (self._V - disp_y) * Ex


class FrozenModel(TransportModel):
    """Time-independent velocity given analytically; used as a tracing oracle.

    ``velocity(x, y)`` returns ``(u, v)`` and ``material(x, y)`` returns
    ``(u u_x + v u_y, u v_x + v v_y)``.
    """

    def __init__(self, grid: Grid2D, velocity, material):
        self.grid = grid
        self._vel = velocity
        self._mat = material
        self.field_spec = _field_spec(5)
        self._X, self._Y = grid.mesh()

    def fields(self, w, material=False):
        u, v = self._vel(self._X, self._Y)
        out = ModelFields(np.broadcast_to(u, self.grid.shape), np.broadcast_to(v, self.grid.shape))
        if material:
            out.du, out.dv = self._mat(self._X, self._Y)
        return out

    def velocity_at(self, fields, disp_x, disp_y):
        return self._vel(self._X - disp_x, self._Y - disp_y)

    def material_at(self, fields, disp_x, disp_y):
        return self._mat(self._X - disp_x, self._Y - disp_y)


def trace_cascade(
    model: TransportModel,
    w: np.ndarray,
    fields_n: ModelFields,
    tau: float,
    order: int,
    spec: StencilSpec,
) -> tuple[np.ndarray, np.ndarray]:
    """Displacement ``grid point - foot`` over a backward interval of length ``tau``."""
    if order not in (1, 2, 3):
        raise ValueError(f"tracing order must be 1, 2 or 3, got {order}")
    if order == 3 and fields_n.du is None:
        raise ValueError("order-3 tracing needs the material derivative at t^n")
    dx1 = fields_n.u * tau
    dy1 = fields_n.v * tau
    if order == 1 or tau == 0:
        return np.array(dx1, dtype=float), np.array(dy1, dtype=float)
    w1 = model.state_at(w, dx1, dy1, spec)
    f1 = model.fields(w1)
    u0, v0 = model.velocity_at(fields_n, dx1, dy1)
    dx2 = 0.5 * (f1.u + u0) * tau
    dy2 = 0.5 * (f1.v + v0) * tau
    if order == 2:
        return dx2, dy2
    w2 = model.state_at(w, dx2, dy2, spec)
    f2 = model.fields(w2, material=True)
    du0, dv0 = model.material_at(fields_n, dx2, dy2)
    h = 0.5 * tau * tau
    dx3 = f2.u * tau - h * (2.0 / 3.0 * f2.du + 1.0 / 3.0 * du0)
    dy3 = f2.v * tau - h * (2.0 / 3.0 * f2.dv + 1.0 / 3.0 * dv0)
    return dx3, dy3


def gc_trace(
    grid: Grid2D,
    w: np.ndarray,
    dt: float,
    order: int,
    sign: str = "guiding_center",
    spec: StencilSpec | None = None,
    model: TransportModel | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Feet ``(x*, y*)`` at ``t^n`` of the planar characteristics through every grid point."""
    spec = spec or StencilSpec(5, "linear")
    model = model or PlanarModel(grid, sign, spec.order)
    fields_n = model.fields(w, material=order == 3)
    dxs, dys = trace_cascade(model, w, fields_n, dt, order, spec)
    X, Y = grid.mesh()
    return X - dxs, Y - dys


def vp_trace(
    grid: Grid2D,
    f: np.ndarray,
    dt: float,
    order: int,
    spec: StencilSpec | None = None,
    model: TransportModel | None = None,
    background: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Feet ``(x*, v*)`` at ``t^n`` of the phase-space characteristics ``x' = v, v' = E``."""
    spec = spec or StencilSpec(5, "linear")
    model = model or VlasovModel(grid, background, spec.order)
    fields_n = model.fields(f, material=order == 3)
    dxs, dvs = trace_cascade(model, f, fields_n, dt, order, spec)
    X, V = grid.mesh()
    return X - dxs, V - dvs


def rk4_feet(velocity, x, y, dt: float, substeps: int = 100):
    """Feet of ``(x', y') = velocity(x, y)`` traced backward over ``dt`` by classical RK4."""
    h = -dt / substeps
    x = np.array(x, dtype=float)
    y = np.array(y, dtype=float)
    for _ in range(substeps):
        k1 = velocity(x, y)
        k2 = velocity(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1])
        k3 = velocity(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1])
        k4 = velocity(x + h * k3[0], y + h * k3[1])
        x = x + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y = y + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return x, y
