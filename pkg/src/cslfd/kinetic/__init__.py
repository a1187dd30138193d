"""Vlasov-Poisson, guiding-center and incompressible Euler solvers."""

from cslfd.kinetic.diagnostics import DiagnosticsRecord, mass_deviation, write_diagnostics_csv
from cslfd.kinetic.run import ScenarioRun, run_scenario
from cslfd.kinetic.scenarios import Scenario, scenario_library, scenario_names
from cslfd.kinetic.solvers import KineticConfig, conservative_step, fluid_step, vp_step
from cslfd.kinetic.tracing import gc_trace, rk4_feet, vp_trace

__all__ = [
    "DiagnosticsRecord",
    "KineticConfig",
    "Scenario",
    "ScenarioRun",
    "conservative_step",
    "fluid_step",
    "gc_trace",
    "mass_deviation",
    "rk4_feet",
    "run_scenario",
    "scenario_library",
    "scenario_names",
    "vp_step",
    "vp_trace",
    "write_diagnostics_csv",
]
