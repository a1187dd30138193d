import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cslfd.grid import Field, Grid1D, Grid2D
from cslfd.kinetic import (
    KineticConfig,
    conservative_step,
    fluid_step,
    gc_trace,
    mass_deviation,
    rk4_feet,
    run_scenario,
    scenario_library,
    scenario_names,
    vp_step,
    vp_trace,
    write_diagnostics_csv,
)
from cslfd.kinetic.diagnostics import CSV_HEADER, phase_space_diagnostics, planar_diagnostics, relative_deviation
from cslfd.kinetic.solvers import fluid_dt, vp_dt
from cslfd.kinetic.tracing import FrozenModel, PlanarModel, VlasovModel, trace_cascade
from cslfd.weno import StencilSpec

KINETIC = [
    "landau_weak",
    "landau_strong",
    "two_stream",
    "symmetric_two_stream",
    "kelvin_helmholtz",
    "vortex_patch",
    "shear_flow",
    "euler_stationary",
]


def test_scenario_names_cover_library():
    assert sorted(KINETIC) == scenario_names()


@pytest.mark.parametrize("name", KINETIC)
def test_scenario_initial_data(name):
    sc = scenario_library(name, (32, 32))
    assert sc.initial.values.shape == (32, 32)
    assert sc.t_end > 0
    assert all(0 < t <= sc.t_end for t in sc.snapshot_times)
    if sc.kind == "vlasov":
        assert sc.initial.values.min() >= 0.0
        assert not sc.grid.gy.periodic


def test_scenario_errors():
    with pytest.raises(ValueError):
        scenario_library("nope")
    with pytest.raises(ValueError):
        scenario_library("landau_weak", (4, 4))


@pytest.mark.parametrize("kwargs", [{"cfl": 0.0}, {"trace_order": 4}, {"dt_rule": "min"}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        KineticConfig(**kwargs)


def test_landau_diagnostics_at_rest():
    sc = scenario_library("landau_weak", (64, 64))
    f = sc.initial
    rec = phase_space_diagnostics(f, np.zeros(64))
    assert rec.mass == pytest.approx(4 * np.pi, rel=1e-8)
    assert rec.l1 == pytest.approx(rec.mass)
    assert rec.e_l2 == 0.0


@pytest.mark.parametrize("name,trace_order", [("landau_strong", 3), ("two_stream", 2), ("kelvin_helmholtz", 3), ("vortex_patch", 1), ("shear_flow", 3)])
def test_few_steps_conserve_mass(name, trace_order):
    sc = scenario_library(name, (32, 32))
    run = run_scenario(sc, KineticConfig(trace_order=trace_order), max_steps=5)
    assert run.steps == 5
    assert run.mass_deviation() < 1e-13
    assert len(run.history) == 6


def test_run_lands_on_snapshot_times():
    sc = scenario_library("kelvin_helmholtz", (16, 16))
    run = run_scenario(sc, KineticConfig(spec=StencilSpec(3, "weno")), t_end=0.6, snapshot_times=(0.25,))
    assert sorted(run.snapshots) == [0.25]
    assert run.t == pytest.approx(0.6, abs=1e-14)
    assert any(abs(r.t - 0.25) < 1e-14 for r in run.history)


def test_stationary_euler_one_step_error_shrinks_with_mesh():
    errs = []
    for n in (32, 64):
        sc = scenario_library("euler_stationary", (n, n))
        new, dt = fluid_step(sc.initial, KineticConfig(), "euler")
        assert dt > 0
        errs.append(np.abs(new.values - sc.initial.values).max())
    assert errs[0] / errs[1] > 2**4


@given(seed=st.integers(0, 1000))
def test_vp_step_conserves_mass_for_random_perturbations(seed):
    rng = np.random.default_rng(seed)
    grid = Grid2D(Grid1D(16, 0.0, 4 * np.pi), Grid1D(16, -6.0, 6.0, periodic=False))
    V = grid.mesh()[1]
    f0 = np.exp(-0.5 * V**2) * (1 + 0.1 * rng.standard_normal(grid.shape))
    f = Field(grid, f0)
    new, _ = vp_step(f, KineticConfig(spec=StencilSpec(5)), background=float(f.total() / grid.gx.length))
    assert new.total() == pytest.approx(f.total(), rel=1e-13)


def test_time_step_rules():
    grid = Grid2D(Grid1D(10, 0.0, 1.0), Grid1D(20, -2.0, 2.0, periodic=False))
    assert vp_dt(grid, np.array([0.5, -2.0]), 1.0) == pytest.approx(min(0.1 / 2.0, 0.2 / 2.0))
    assert vp_dt(grid, np.zeros(3), 1.0) == pytest.approx(0.05)
    sq = Grid2D(Grid1D(16, 0.0, 2 * np.pi), Grid1D(16, 0.0, 2 * np.pi))
    X, Y = sq.mesh()
    fields = PlanarModel(sq, "euler").fields(-2 * np.sin(X) * np.sin(Y))
    h = sq.gx.dx
    assert fluid_dt(sq, fields, 1.0, "sum") == pytest.approx(h / (np.abs(fields.u).max() + np.abs(fields.v).max()))
    assert fluid_dt(sq, fields, 1.0, "max") > fluid_dt(sq, fields, 1.0, "sum")


def test_trace_cascade_argument_checks():
    grid = Grid2D(Grid1D(16, 0.0, 2 * np.pi), Grid1D(16, 0.0, 2 * np.pi))
    model = PlanarModel(grid)
    w = np.sin(grid.mesh()[0])
    fields = model.fields(w)
    with pytest.raises(ValueError):
        trace_cascade(model, w, fields, 0.1, 4, StencilSpec(5))
    with pytest.raises(ValueError):
        trace_cascade(model, w, fields, 0.1, 3, StencilSpec(5))
    with pytest.raises(ValueError):
        PlanarModel(grid, "vlasov")


def _frozen_planar():
    grid = Grid2D(Grid1D(16, 0.0, 2 * np.pi), Grid1D(16, 0.0, 2 * np.pi))

    def vel(x, y):
        return -np.sin(x) * np.cos(y), np.cos(x) * np.sin(y)

    def mat(x, y):
        return np.sin(x) * np.cos(x), np.sin(y) * np.cos(y)

    return grid, FrozenModel(grid, vel, mat)


def _frozen_phase_space():
    grid = Grid2D(Grid1D(16, 0.0, 4 * np.pi), Grid1D(16, -6.0, 6.0, periodic=False))

    def vel(x, v):
        return v, 0.5 * np.sin(0.5 * x)

    def mat(x, v):
        return 0.5 * np.sin(0.5 * x), 0.25 * np.cos(0.5 * x) * v

    return grid, FrozenModel(grid, vel, mat)


@pytest.mark.parametrize("kind", ["planar", "phase"])
@pytest.mark.parametrize("order", [1, 2, 3])
def test_tracing_local_error_order(kind, order):
    grid, model = _frozen_planar() if kind == "planar" else _frozen_phase_space()
    trace = gc_trace if kind == "planar" else vp_trace
    X, Y = grid.mesh()
    errs = []
    for dt in (0.1, 0.05):
        xs, ys = trace(grid, np.zeros(grid.shape), dt, order, model=model)
        xo, yo = rk4_feet(model._vel, X, Y, dt, 50)
        errs.append(max(np.abs(xs - xo).max(), np.abs(ys - yo).max()))
    assert errs[0] / errs[1] >= 2 ** (order + 0.7)


def test_self_consistent_models_build_material_derivative():
    sc = scenario_library("landau_weak", (16, 16))
    model = VlasovModel(sc.grid, 1.0)
    f = model.fields(sc.initial.values, material=True)
    assert f.du.shape == sc.grid.shape and "Et" in f.aux
    # free streaming: du = E
    assert np.allclose(f.du, f.v)


def test_diagnostics_csv(tmp_path):
    grid = Grid2D(Grid1D(8, 0.0, 1.0), Grid1D(8, 0.0, 1.0))
    w = Field(grid, np.ones(grid.shape))
    hist = [planar_diagnostics(w, np.zeros(grid.shape), np.zeros(grid.shape), t) for t in (0.0, 0.5)]
    write_diagnostics_csv(tmp_path / "d.csv", hist)
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert tuple(lines[0].split(",")) == CSV_HEADER
    assert len(lines) == 3
    assert mass_deviation(hist) == 0.0
    assert np.all(relative_deviation(hist, "l2") == 0.0)


def test_conservative_step_rejects_non_finite():
    grid, model = _frozen_planar()
    with pytest.raises(ValueError):
        conservative_step(model, np.full(grid.shape, np.nan), 0.1, KineticConfig(trace_order=1))
