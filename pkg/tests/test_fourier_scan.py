import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cslfd.fourier_scan import ScanConfig, amplification, amplification_factors, exact_cfl, max_amplification, max_cfl
from cslfd.quadrature import builtin_rule
from cslfd.weno import StencilSpec

RULES = ["midpoint", "trapezoid", "simpson", "gl2", "s4"]


@pytest.mark.parametrize("rule", RULES)
@pytest.mark.parametrize("order", [1, 2, 5, 8])
def test_zero_lambda_and_zero_wavenumber(rule, order):
    r, spec = builtin_rule(rule), StencilSpec(order)
    assert amplification(0.0, 1.3, r, spec) == pytest.approx(1.0, abs=1e-15)
    assert amplification(0.83, 0.0, r, spec) == pytest.approx(1.0, abs=1e-13)


@given(lam=st.floats(0.0, 3.0), xi=st.floats(0.0, 2 * np.pi), order=st.integers(1, 10))
def test_conjugate_symmetry(lam, xi, order):
    r, spec = builtin_rule("gl2"), StencilSpec(order)
    q1 = amplification(lam, xi, r, spec)
    q2 = amplification(lam, 2 * np.pi - xi, r, spec)
    assert q1 == pytest.approx(q2.conjugate(), abs=1e-12)


@pytest.mark.parametrize("order", [3, 5, 7])
def test_amplification_consistent_with_exact_shift(order):
    lam, xi = 0.9, 0.05
    q = amplification(lam, xi, builtin_rule("gl2"), StencilSpec(order))
    assert abs(q - np.exp(-1j * lam * xi)) < 10 * xi ** (order + 1)


def test_weno_and_negative_lambda_rejected():
    with pytest.raises(ValueError):
        amplification(0.5, 1.0, builtin_rule("gl2"), StencilSpec(5, "weno"))
    with pytest.raises(ValueError):
        amplification(-0.5, 1.0, builtin_rule("gl2"), StencilSpec(5))


def test_trapezoid_first_order_inside_bound():
    assert max_amplification(1.5, builtin_rule("trapezoid"), StencilSpec(1)) <= 1.0 + 1e-11


def test_trapezoid_first_order_unit_lambda_is_stable():
    # damped, not unimodular: the two stage values straddle the unit shift
    q = np.abs(amplification_factors(1.0, ScanConfig().xi(), builtin_rule("trapezoid"), StencilSpec(1)))
    assert q.max() <= 1.0 + 1e-12
    assert q.min() == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "rule,order,expected",
    [("gl2", 5, 1.19), ("trapezoid", 1, 1.99), ("midpoint", 2, 2.00), ("midpoint", 5, 0.14), ("s8", 4, 1.99)],
)
def test_max_cfl_entries(rule, order, expected):
    assert max_cfl(builtin_rule(rule), StencilSpec(order)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("rule,expected", [("midpoint", 0.0), ("trapezoid", 1.0), ("simpson", 0.0), ("s4", 4.81), ("s8", 9.41)])
def test_exact_column(rule, expected):
    assert exact_cfl(builtin_rule(rule)) == pytest.approx(expected)


def test_fully_discrete_bound_below_semi_discrete():
    gl2 = builtin_rule("gl2")
    assert max_cfl(gl2, StencilSpec(3)) <= exact_cfl(gl2)


@pytest.mark.parametrize("kwargs", [{"n_xi": 0}, {"lambda_step": 0.0}, {"tol": -1.0}, {"lambda_max": 0.0}])
def test_scan_config_validation(kwargs):
    with pytest.raises(ValueError):
        ScanConfig(**kwargs)
