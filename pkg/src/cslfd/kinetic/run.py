"""Time marching of the kinetic and fluid scenarios with diagnostics."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from cslfd.grid import Field
from cslfd.kinetic.diagnostics import DiagnosticsRecord, mass_deviation, phase_space_diagnostics, planar_diagnostics
from cslfd.kinetic.scenarios import Scenario
from cslfd.kinetic.solvers import KineticConfig, check_blowup, conservative_step, fluid_dt, vp_dt
from cslfd.kinetic.tracing import PlanarModel, VlasovModel

logger = logging.getLogger(__name__)


@dataclass
class ScenarioRun:
    scenario: Scenario
    final: Field
    t: float
    steps: int
    history: list[DiagnosticsRecord]
    snapshots: dict[float, Field]

    def mass_deviation(self) -> float:
        return mass_deviation(self.history)


def _model(scenario: Scenario, cfg: KineticConfig):
    if scenario.kind == "vlasov":
        f0 = scenario.initial
        # the ion background equals the initial mean density so the system is neutral
        background = float(np.sum(f0.values) * f0.grid.gy.dx / f0.grid.gx.n)
        return VlasovModel(scenario.grid, background, cfg.spec.order)
    return PlanarModel(scenario.grid, scenario.kind, cfg.spec.order)


def _record(model, w: Field, fields, t: float) -> DiagnosticsRecord:
    if isinstance(model, VlasovModel):
        return phase_space_diagnostics(w, fields.aux["E"], t)
    pair = fields.aux["pair"]
    return planar_diagnostics(w, pair.E1.values, pair.E2.values, t)


def run_scenario(
    scenario: Scenario,
    cfg: KineticConfig,
    t_end: float | None = None,
    max_steps: int | None = None,
    diag_every: int = 1,
    snapshot_times=None,
    fixed_dt: float | None = None,
) -> ScenarioRun:
    """March a scenario to ``t_end`` (or ``max_steps``), landing exactly on snapshot times."""
    t_end = scenario.t_end if t_end is None else float(t_end)
    snaps = scenario.snapshot_times if snapshot_times is None else tuple(snapshot_times)
    stops = sorted({float(s) for s in snaps if 0 < s < t_end} | {t_end})
    model = _model(scenario, cfg)
    w = scenario.initial
    need_material = cfg.trace_order == 3
    fields = model.fields(w.values, material=need_material)
    history = [_record(model, w, fields, 0.0)]
    snapshots: dict[float, Field] = {}
    t, steps = 0.0, 0
    for stop in stops:
        while stop - t > 1e-12 * max(1.0, stop):
            if fixed_dt is not None:
                dt = fixed_dt
            elif isinstance(model, VlasovModel):
                dt = vp_dt(scenario.grid, fields.aux["E"], cfg.cfl)
            else:
                dt = fluid_dt(scenario.grid, fields, cfg.cfl, cfg.dt_rule)
            dt = min(dt, stop - t)
            values = conservative_step(model, w.values, dt, cfg, fields)
            steps += 1
            t = stop if stop - (t + dt) <= 1e-12 * max(1.0, stop) else t + dt
            check_blowup(values, t, steps)
            w = w.with_values(values)
            fields = model.fields(w.values, material=need_material)
            done = max_steps is not None and steps >= max_steps
            if steps % diag_every == 0 or done or t >= stop:
                history.append(_record(model, w, fields, t))
            if done:
                snapshots[t] = w
                return ScenarioRun(scenario, w, t, steps, history, snapshots)
        if stop in snaps:
            snapshots[stop] = w
    return ScenarioRun(scenario, w, t, steps, history, snapshots)
