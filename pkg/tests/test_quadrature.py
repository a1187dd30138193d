import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cslfd.quadrature import (
    PUBLISHED_MAX_CFL,
    QuadratureRule,
    abs_R2,
    builtin_rule,
    degree_of_precision,
    imag_axis_interval,
    margin_F,
    margin_F_factored,
    optimize_symmetric_rule,
    optimized_residual,
    region_contour,
    stability_R,
    symmetric_rule,
    unstable_near_origin,
)


@pytest.mark.parametrize(
    "c,b",
    [((), ()), ((0.5,), (0.9,)), ((0.0, 1.2), (0.5, 0.5)), ((0.6, 0.4), (0.5, 0.5))],
)
def test_rule_validation(c, b):
    with pytest.raises(ValueError):
        QuadratureRule(c, b)


@pytest.mark.parametrize("name", ["nope", "gl0", "s5", "gauss_legendre"])
def test_unknown_rules_rejected(name):
    with pytest.raises(ValueError):
        builtin_rule(name)


@pytest.mark.parametrize(
    "name,degree",
    [("midpoint", 1), ("trapezoid", 1), ("simpson", 3), ("gl2", 3), ("gl3", 5), ("gl4", 7), ("s4", 3), ("s8", 7)],
)
def test_degree_of_precision(name, degree):
    assert degree_of_precision(builtin_rule(name)) == degree


@pytest.mark.parametrize("s", sorted(PUBLISHED_MAX_CFL))
def test_builtin_optimized_rules_are_symmetric_and_stable(s):
    rule = builtin_rule("optimized", s)
    assert rule.is_symmetric
    assert optimized_residual(rule) < 1e-6
    assert imag_axis_interval(rule, y_max=5 * s + 20).a_star == pytest.approx(PUBLISHED_MAX_CFL[s], abs=1e-3)


@given(st.floats(-30.0, 30.0))
def test_abs_R2_matches_complex_evaluation(y):
    rule = builtin_rule("gl3")
    assert abs_R2(rule, y) == pytest.approx(abs(stability_R(rule, 1j * y)) ** 2, rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("name", ["trapezoid", "gl2", "gl4", "s4", "s8"])
def test_factored_margin(name):
    rule = builtin_rule(name)
    y = np.linspace(0.01, 20.0, 200)
    assert np.allclose(margin_F(rule, y), margin_F_factored(rule, y), atol=1e-12)


def test_factored_margin_needs_symmetric_even_rule():
    with pytest.raises(ValueError):
        margin_F_factored(builtin_rule("simpson"), 1.0)


def test_margin_sign_matches_R2():
    rule = builtin_rule("gl2")
    y = np.linspace(0.1, 10.0, 50)
    # |R(iy)|^2 - 1 = -2 y F(y)
    assert np.allclose(abs_R2(rule, y) - 1.0, -2.0 * y * margin_F(rule, y), atol=1e-12)


@pytest.mark.parametrize("name,flag", [("gl3", True), ("gl5", True), ("midpoint", True), ("gl2", False), ("gl4", False), ("trapezoid", False), ("s4", False)])
def test_unstable_near_origin(name, flag):
    assert unstable_near_origin(builtin_rule(name)) is flag


def test_trapezoid_interval_is_pi():
    rep = imag_axis_interval(builtin_rule("trapezoid"))
    assert rep.y_star == pytest.approx(np.pi, abs=1e-8)
    assert rep.samples.shape[1] == 2


def test_interval_argument_checks():
    with pytest.raises(ValueError):
        imag_axis_interval(builtin_rule("gl2"), dy=0.0)


@pytest.mark.parametrize("s", [4, 8])
def test_optimizer_reproduces_builtin(s):
    rule = optimize_symmetric_rule(s)
    ref = builtin_rule("optimized", s)
    assert np.abs(rule.weights - ref.weights).max() < 1e-10
    assert np.abs(rule.nodes - ref.nodes).max() < 1e-10


def test_optimizer_two_nodes():
    rule = optimize_symmetric_rule(2)
    assert np.allclose(rule.nodes, [0.25, 0.75])


@pytest.mark.parametrize("s", [0, 3, -2])
def test_optimizer_rejects_odd(s):
    with pytest.raises(ValueError):
        optimize_symmetric_rule(s)


@given(st.lists(st.floats(0.05, 1.0), min_size=1, max_size=4, unique=True))
def test_symmetric_rule_construction(raw):
    c_half = sorted(0.45 * v for v in raw)
    b_half = [1.0 / (2 * len(c_half))] * len(c_half)
    rule = symmetric_rule(b_half, c_half)
    assert rule.is_symmetric and rule.s == 2 * len(c_half)


def test_region_contour_passes_through_trapezoid_crossing():
    lines = region_contour(builtin_rule("trapezoid"))
    pts = np.concatenate(lines)
    near_axis = pts[np.abs(pts[:, 0]) < 0.05]
    assert np.min(np.abs(np.abs(near_axis[:, 1]) - np.pi)) < 0.1
