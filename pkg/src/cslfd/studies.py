"""Error and convergence-order studies against exact solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cslfd.grid import Field, Grid1D
from cslfd.kinetic.run import run_scenario
from cslfd.kinetic.scenarios import scenario_library
from cslfd.kinetic.solvers import KineticConfig
from cslfd.sl_solver import SLConfig, advect_1d, run_transport
from cslfd.weno import StencilSpec

EXACT_SCENARIOS = ("advection1d", "advection", "euler_stationary")


@dataclass(frozen=True)
class ErrorRow:
    param: float
    l1: float
    linf: float
    l1_order: float | None = None
    linf_order: float | None = None


def observed_order(e1: float, e2: float, p1: float, p2: float) -> float:
    """``log(e1/e2) / log(p2/p1)`` for mesh sizes ``p`` (use ``p = 1/cfl`` for time-step sweeps)."""
    return math.log(e1 / e2) / math.log(p2 / p1)


def _errors(num: np.ndarray, exact: np.ndarray) -> tuple[float, float]:
    """Domain-averaged L1 error and max error."""
    diff = np.abs(num - exact)
    return float(diff.mean()), float(diff.max())


def solve_error(scenario: str, n: int, cfl: float, t_end: float, cfg) -> tuple[float, float]:
    """L1 (domain average) and Linf errors of one run against the exact solution."""
    if scenario == "advection1d":
        grid = Grid1D(n, 0.0, 1.0)
        x = grid.points
        f = advect_1d(Field(grid, np.sin(2 * np.pi * x)), cfl, t_end, cfg)
        return _errors(f.values, np.sin(2 * np.pi * (x - t_end)))
    if scenario == "advection":
        run = run_transport("advection", cfg, n, t_end)
        X, Y = run.grid.mesh()
        return _errors(run.final.values, np.sin(X - t_end) * np.sin(Y - t_end))
    if scenario == "euler_stationary":
        sc = scenario_library("euler_stationary", (n, n))
        run = run_scenario(sc, cfg, t_end=t_end)
        return _errors(run.final.values, sc.initial.values)
    raise ValueError(f"no exact solution for scenario {scenario!r}; choose from {EXACT_SCENARIOS}")


def _with_orders(params, errors, order_param) -> list[ErrorRow]:
    rows = []
    for i, (p, (l1, linf)) in enumerate(zip(params, errors)):
        if i == 0:
            rows.append(ErrorRow(p, l1, linf))
            continue
        p0, (l10, linf0) = params[i - 1], errors[i - 1]
        a, b = order_param(p0), order_param(p)
        rows.append(ErrorRow(p, l1, linf, observed_order(l10, l1, a, b), observed_order(linf0, linf, a, b)))
    return rows


def spatial_study(scenario: str, meshes, cfl: float, t_end: float, cfg) -> list[ErrorRow]:
    """Errors and orders under mesh refinement at fixed CFL."""
    errors = [solve_error(scenario, n, cfl, t_end, cfg) for n in meshes]
    return _with_orders(list(meshes), errors, float)


def temporal_study(scenario: str, n: int, cfls, t_end: float, cfg_for_cfl) -> list[ErrorRow]:
    """Errors and orders on a fixed mesh as the CFL number (hence the time step) decreases."""
    errors = [solve_error(scenario, n, c, t_end, cfg_for_cfl(c)) for c in cfls]
    return _with_orders(list(cfls), errors, lambda c: 1.0 / c)


def default_config(scenario: str, order: int, mode: str, rule, cfl: float, dt_rule: str = "sum", trace_order: int = 3):
    """Solver configuration matching the scenario's family."""
    spec = StencilSpec(order, mode)
    if scenario in ("advection1d", "advection", "rotation", "swirl"):
        return SLConfig(rule, spec, cfl, dt_rule=dt_rule)
    return KineticConfig(rule, spec, cfl, trace_order=trace_order, dt_rule=dt_rule)
