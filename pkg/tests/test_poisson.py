import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cslfd.grid import Field, Grid1D, Grid2D
from cslfd.poisson import (
    SIGNS,
    central_difference,
    field_time_derivative_1d,
    solve_field_time_derivative,
    solve_poisson_1d,
    solve_poisson_2d,
)


def _grid2(nx=32, ny=24, lx=2 * np.pi, ly=2 * np.pi):
    return Grid2D(Grid1D(nx, 0.0, lx), Grid1D(ny, 0.0, ly))


@given(alpha=st.floats(-0.9, 0.9), k=st.sampled_from([0.5, 1.0]))
def test_1d_cosine_density(alpha, k):
    g = Grid1D(64, 0.0, 2 * np.pi / k)
    x = g.points
    res = solve_poisson_1d(Field(g, 1.0 + alpha * np.cos(k * x)))
    assert np.allclose(res.E.values, alpha / k * np.sin(k * x), atol=1e-12)
    assert abs(res.phi.values.mean()) < 1e-14


def test_1d_neutrality_checked():
    g = Grid1D(16, 0.0, 1.0)
    with pytest.raises(ValueError):
        solve_poisson_1d(Field(g, np.full(16, 1.1)))
    solve_poisson_1d(Field(g, np.full(16, 1.1)), neutrality_tol=0.2)
    with pytest.raises(TypeError):
        solve_poisson_1d(Field(_grid2(), np.ones((32, 24))))


def test_1d_needs_periodic_grid():
    g = Grid1D(16, 0.0, 1.0, periodic=False)
    with pytest.raises(ValueError):
        solve_poisson_1d(Field(g, np.ones(16)))


@pytest.mark.parametrize("sign", sorted(SIGNS))
def test_2d_mode_solution(sign):
    g = _grid2(32, 24, 4 * np.pi, 2 * np.pi)
    X, Y = g.mesh()
    source = np.cos(0.5 * X) * np.sin(2 * Y)
    pair = solve_poisson_2d(Field(g, source), sign)
    k2 = 0.25 + 4.0
    phi = -SIGNS[sign] * source / k2
    assert np.allclose(pair.phi.values, phi, atol=1e-13)
    assert np.allclose(pair.E1.values, -SIGNS[sign] * 0.5 * np.sin(0.5 * X) * np.sin(2 * Y) / k2, atol=1e-13)
    u, v = pair.velocity
    assert np.allclose(u, pair.E2.values) and np.allclose(v, -pair.E1.values)


def test_2d_warns_and_projects_mean():
    g = _grid2(16, 16)
    with pytest.warns(RuntimeWarning):
        pair = solve_poisson_2d(Field(g, np.full((16, 16), 2.0)))
    assert np.allclose(pair.phi.values, 0.0)


def test_2d_sign_validation():
    with pytest.raises(ValueError):
        solve_poisson_2d(Field(_grid2(), np.zeros((32, 24))), "vlasov")


@given(st.integers(1, 5))
def test_central_difference_sixth_order(k):
    errs = []
    for n in (32, 64):
        x = 2 * np.pi * np.arange(n) / n
        d = central_difference(np.sin(k * x)[:, None], 2 * np.pi / n, 0)[:, 0]
        errs.append(np.abs(d - k * np.cos(k * x)).max())
    assert errs[1] < errs[0] / 2**5.5 or errs[0] < 1e-12


@pytest.mark.parametrize("sign", sorted(SIGNS))
def test_time_derivative_matches_finite_difference(sign):
    # evolve w_t = -div(w U) with a tiny explicit step and compare E(t+h)-E(t-h)
    g = _grid2(48, 48)
    X, Y = g.mesh()
    w = np.sin(X) * np.cos(Y) + 0.5 * np.cos(2 * X + Y)
    pair = solve_poisson_2d(Field(g, w), sign, warn=False)
    dt_pair = solve_field_time_derivative(pair, Field(g, w), sign)
    u, v = pair.velocity
    wt = -(central_difference(w * u, g.gx.dx, 0) + central_difference(w * v, g.gy.dx, 1))
    h = 1e-5
    plus = solve_poisson_2d(Field(g, w + h * wt), sign, warn=False)
    minus = solve_poisson_2d(Field(g, w - h * wt), sign, warn=False)
    fd = (plus.E1.values - minus.E1.values) / (2 * h)
    assert np.abs(fd - dt_pair.E1.values).max() < 1e-8


def test_1d_time_derivative_removes_mean():
    j = np.array([1.0, 2.0, 3.0, 6.0])
    assert np.allclose(field_time_derivative_1d(j), -(j - 3.0))
