"""Conservative steps for Vlasov-Poisson, guiding-centre and Euler transport."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from cslfd.grid import Field, Grid2D
from cslfd.kinetic.tracing import ModelFields, PlanarModel, TransportModel, VlasovModel, trace_cascade
from cslfd.quadrature import QuadratureRule, builtin_rule
from cslfd.sl_solver import BLOWUP_THRESHOLD, BlowUpError
from cslfd.weno import StencilSpec, flux_difference

logger = logging.getLogger(__name__)

E_FLOOR = 1e-8


@dataclass(frozen=True)
class KineticConfig:
    rule: QuadratureRule = field(default_factory=lambda: builtin_rule("gl2"))
    spec: StencilSpec = field(default_factory=lambda: StencilSpec(5, "weno"))
    cfl: float = 1.15
    trace_order: int = 3
    dt_rule: str = "sum"

    def __post_init__(self):
        if not self.cfl > 0:
            raise ValueError(f"cfl must be positive, got {self.cfl}")
        if self.trace_order not in (1, 2, 3):
            raise ValueError(f"trace_order must be 1, 2 or 3, got {self.trace_order}")
        if self.dt_rule not in ("sum", "max"):
            raise ValueError(f"dt_rule must be 'sum' or 'max', got {self.dt_rule!r}")


def _winds(ubar: np.ndarray, axis: int, boundary: str) -> np.ndarray:
    """Upwind sign at each interface from the average of the two neighbouring velocities."""
    if boundary == "periodic":
        face = ubar + np.roll(ubar, -1, axis=axis)
    else:
        pad = [(0, 0)] * ubar.ndim
        pad[axis] = (1, 1)
        p = np.pad(ubar, pad, mode="edge")
        lo = np.take(p, np.arange(0, p.shape[axis] - 1), axis=axis)
        hi = np.take(p, np.arange(1, p.shape[axis]), axis=axis)
        face = lo + hi
    return np.where(face >= 0, 1, -1)


def conservative_step(
    model: TransportModel,
    w: np.ndarray,
    dt: float,
    cfg: KineticConfig,
    fields_n: ModelFields | None = None,
) -> np.ndarray:
    """One flux-difference step of ``w_t + (u w)_x + (v w)_y = 0`` with self-consistent ``(u, v)``.

    For each quadrature node the feet are traced over ``c dt``, the stage value
    is interpolated there and the stage velocity is re-solved from it. The
    time-integrated fluxes ``sum b u w`` and ``sum b v w`` are then reconstructed
    and differenced; boundaries of a ``zero`` axis have closed outer faces.
    """
    if not np.all(np.isfinite(w)):
        raise ValueError("state contains non-finite values")
    grid = model.grid
    if fields_n is None:
        fields_n = model.fields(w, material=cfg.trace_order == 3)
    flux_x = np.zeros(grid.shape)
    flux_y = np.zeros(grid.shape)
    ubar = np.zeros(grid.shape)
    vbar = np.zeros(grid.shape)
    for c, b in zip(cfg.rule.c, cfg.rule.b):
        tau = c * dt
        if tau == 0:
            stage, stage_fields = w, fields_n
        else:
            dx, dy = trace_cascade(model, w, fields_n, tau, cfg.trace_order, cfg.spec)
            stage = model.state_at(w, dx, dy, cfg.spec)
            stage_fields = model.fields(stage)
        flux_x += b * stage_fields.u * stage
        flux_y += b * stage_fields.v * stage
        ubar += b * stage_fields.u
        vbar += b * stage_fields.v
    bx, by = model.boundary
    wind_x = _winds(ubar, 0, bx)
    wind_y = _winds(vbar, 1, by)
    return (
        w
        - dt / grid.gx.dx * flux_difference(flux_x, cfg.spec, wind_x, axis=0, boundary=bx)
        - dt / grid.gy.dx * flux_difference(flux_y, cfg.spec, wind_y, axis=1, boundary=by)
    )


def fluid_dt(grid: Grid2D, fields: ModelFields, cfl: float, rule: str = "sum") -> float:
    """``cfl / (max|u|/dx + max|v|/dy)``, or the larger directional rate for ``rule='max'``."""
    rx = float(np.max(np.abs(fields.u))) / grid.gx.dx
    ry = float(np.max(np.abs(fields.v))) / grid.gy.dx
    rate = rx + ry if rule == "sum" else max(rx, ry)
    return math.inf if rate == 0 else cfl / rate


def vp_dt(grid: Grid2D, E: np.ndarray, cfl: float) -> float:
    """``cfl * min(dx / v_max, dv / max|E|)`` with ``max|E|`` floored at ``1e-8``."""
    v_max = max(abs(grid.gy.x_min), abs(grid.gy.x_max))
    e_max = max(float(np.max(np.abs(E))), E_FLOOR)
    return cfl * min(grid.gx.dx / v_max, grid.gy.dx / e_max)


def fluid_step(w: Field, cfg: KineticConfig, model: str = "guiding_center", dt: float | None = None) -> tuple[Field, float]:
    """Advance a guiding-centre density or Euler vorticity by one step; returns ``(state, dt)``."""
    m = PlanarModel(w.grid, model, cfg.spec.order)
    fields_n = m.fields(w.values, material=cfg.trace_order == 3)
    dt = fluid_dt(w.grid, fields_n, cfg.cfl, cfg.dt_rule) if dt is None else dt
    return w.with_values(conservative_step(m, w.values, dt, cfg, fields_n)), dt


def vp_step(f: Field, cfg: KineticConfig, background: float = 1.0, dt: float | None = None) -> tuple[Field, float]:
    """Advance a 1D1V distribution by one step; returns ``(state, dt)``."""
    m = VlasovModel(f.grid, background, cfg.spec.order)
    fields_n = m.fields(f.values, material=cfg.trace_order == 3)
    dt = vp_dt(f.grid, fields_n.aux["E"], cfg.cfl) if dt is None else dt
    return f.with_values(conservative_step(m, f.values, dt, cfg, fields_n)), dt


def check_blowup(values: np.ndarray, t: float, step: int) -> None:
    norm = float(np.max(np.abs(values)))
    if not np.isfinite(norm) or norm > BLOWUP_THRESHOLD:
        raise BlowUpError(t, step, norm)
