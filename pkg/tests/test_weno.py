import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cslfd.weno import (
    StencilSpec,
    flux_difference,
    interp_linear_weights,
    interpolate_2d,
    interpolate_departure,
    linear_interp_weights,
    reconstruction_coefficients,
    weno_nonlinear_weights,
)

ALL_ORDERS = list(range(1, 11))
WENO_ORDERS = [3, 5, 7, 9]


@pytest.mark.parametrize("order,mode", [(0, "linear"), (11, "linear"), (4, "weno"), (1, "weno"), (3, "spline")])
def test_stencil_spec_validation(order, mode):
    with pytest.raises(ValueError):
        StencilSpec(order, mode)


@pytest.mark.parametrize("order", ALL_ORDERS)
def test_linear_weights_partition_of_unity(order):
    t = np.linspace(-1.0, 0.0, 7)
    assert np.allclose(linear_interp_weights(order, t).sum(axis=-1), 1.0)


@pytest.mark.parametrize("order", WENO_ORDERS)
def test_optimal_weights_sum_to_one(order):
    d = interp_linear_weights(order, np.linspace(-1.0, 0.0, 9))
    assert np.allclose(d.sum(axis=-1), 1.0)


@pytest.mark.parametrize("order", ALL_ORDERS)
def test_reconstruction_coefficients_sum(order):
    assert reconstruction_coefficients(order).sum() == pytest.approx(1.0)


@pytest.mark.parametrize("order", ALL_ORDERS)
@pytest.mark.parametrize("shift", [0.3, -0.7, 2.45, -3.2])
def test_linear_interpolation_exact_on_polynomials(order, shift):
    # a polynomial of degree order-1 on a long non-periodic stretch is reproduced exactly
    n = 60
    x = np.arange(n, dtype=float)
    coeffs = np.arange(1, order + 1) / 10.0
    f = np.polyval(coeffs, x / n)
    out = interpolate_departure(f, shift, StencilSpec(order), boundary="zero")
    interior = slice(order + 5, n - order - 5)
    exact = np.polyval(coeffs, (x - shift) / n)
    assert np.allclose(out[interior], exact[interior], atol=1e-12)


@pytest.mark.parametrize("order", [3, 4, 5, 7, 9])
def test_interpolation_converges_at_design_order(order):
    errs = []
    for n in (32, 64):
        x = 2 * np.pi * np.arange(n) / n
        out = interpolate_departure(np.sin(x), 0.37, StencilSpec(order))
        errs.append(np.abs(out - np.sin(x - 0.37 * 2 * np.pi / n)).max())
    assert math.log2(errs[0] / errs[1]) > order - 0.3


@pytest.mark.parametrize("order", WENO_ORDERS)
def test_weno_interpolation_smooth_and_step(order):
    n = 64
    x = 2 * np.pi * np.arange(n) / n
    out = interpolate_departure(np.sin(x), 0.5, StencilSpec(order, "weno"))
    assert np.abs(out - np.sin(x - np.pi / n)).max() < 10 * (2 * np.pi / n) ** order
    step = (np.arange(n) < n // 2).astype(float)
    weno = interpolate_departure(step, 0.5, StencilSpec(order, "weno"))
    lin = interpolate_departure(step, 0.5, StencilSpec(order))
    overshoot = lambda v: max(v.max() - 1.0, -v.min())  # noqa: E731
    assert overshoot(weno) < 0.5 * overshoot(lin)


@given(arrays(float, (3, 5), elements=st.floats(-10, 10)))
def test_nonlinear_weights_convex(stencils):
    d = interp_linear_weights(5, -0.4)
    w = weno_nonlinear_weights(stencils, d, kind="interpolate")
    assert np.all(w >= 0.0)
    assert np.allclose(w.sum(axis=-1), 1.0)


@pytest.mark.parametrize("spec", [StencilSpec(o) for o in ALL_ORDERS] + [StencilSpec(o, "weno") for o in WENO_ORDERS])
@given(values=arrays(float, 24, elements=st.floats(-5, 5)), wind=st.sampled_from([1, -1]))
def test_flux_difference_telescopes(spec, values, wind):
    assert abs(flux_difference(values, spec, wind).sum()) < 1e-10


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5, 6, 7])
def test_flux_difference_approximates_derivative(order):
    errs = []
    for n in (40, 80):
        x = 2 * np.pi * np.arange(n) / n
        dx = 2 * np.pi / n
        d = flux_difference(np.sin(x), StencilSpec(order), 1) / dx
        errs.append(np.abs(d - np.cos(x)).max())
    assert math.log2(errs[0] / errs[1]) > order - 0.3


def test_zero_boundary_closes_outer_faces():
    f = np.ones(10)
    d = flux_difference(f, StencilSpec(3), np.ones(11), boundary="zero")
    assert d.sum() == pytest.approx(0.0, abs=1e-14)
    assert np.allclose(d[3:-3], 0.0)
    assert d[0] > 0.0 and d[-1] < 0.0


def test_interpolate_2d_separable():
    n = 32
    x = 2 * np.pi * np.arange(n) / n
    X, Y = np.meshgrid(x, x, indexing="ij")
    f = np.sin(X) * np.cos(Y)
    sx, sy = 0.3 * np.ones_like(X), -1.6 * np.ones_like(X)
    out = interpolate_2d(f, sx, sy, StencilSpec(7))
    h = 2 * np.pi / n
    assert np.abs(out - np.sin(X - 0.3 * h) * np.cos(Y + 1.6 * h)).max() < 1e-7
