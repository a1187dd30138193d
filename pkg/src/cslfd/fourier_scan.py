"""Von Neumann analysis of the fully discrete scheme for ``u_t + u_x = 0``.

The amplification factor is measured by running the solver's own 1D step on
the complex mode ``exp(i j xi)`` and dividing at interior points whose
stencils never wrap around the probe grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cslfd.quadrature import QuadratureRule, builtin_rule, imag_axis_interval, unstable_near_origin
from cslfd.sl_solver import sl_step_1d_array
from cslfd.weno import StencilSpec

TABLE_RULES = ("midpoint", "trapezoid", "simpson", "gl2", "s4", "s8", "s12")
ODD_ORDERS = (1, 3, 5, 7, 9)
EVEN_ORDERS = (2, 4, 6, 8, 10)


@dataclass(frozen=True)
class ScanConfig:
    n_xi: int = 100
    lambda_step: float = 0.01
    tol: float = 1e-11
    lambda_max: float = 20.0

    def __post_init__(self):
        if self.n_xi < 1 or not (self.lambda_step > 0 and self.tol > 0 and self.lambda_max > 0):
            raise ValueError("scan parameters must be positive")

    def xi(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_xi) / self.n_xi


def _probe_size(lam: float, spec: StencilSpec) -> int:
    return max(64, 2 * (spec.order + int(math.ceil(abs(lam)))) + 8)


def amplification_factors(lam: float, xi, rule: QuadratureRule, spec: StencilSpec, check: bool = True) -> np.ndarray:
    """``Q_lambda(xi)`` for an array of wavenumbers."""
    if spec.mode != "linear":
        raise ValueError("Fourier analysis needs linear weights; WENO weights depend on the data")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    n = _probe_size(lam, spec)
    j = np.arange(n)
    modes = np.exp(1j * np.outer(xi, j))
    new = sl_step_1d_array(modes, lam, rule, spec)
    c = n // 2
    q = new[:, c] / modes[:, c]
    if check:
        probe = [c - 2, c - 1, c + 1, c + 2]
        spread = np.abs(new[:, probe] / modes[:, probe] - q[:, None]).max()
        if spread > 1e-13:
            raise AssertionError(f"amplification factor depends on the grid point (spread {spread:.2e})")
    return q


def amplification(lam: float, xi: float, rule: QuadratureRule, spec: StencilSpec) -> complex:
    """``Q_lambda(xi)``: the factor one step multiplies the mode ``exp(i j xi)`` by."""
    return complex(amplification_factors(lam, [xi], rule, spec)[0])


def max_amplification(lam: float, rule: QuadratureRule, spec: StencilSpec, cfg: ScanConfig = ScanConfig()) -> float:
    return float(np.abs(amplification_factors(lam, cfg.xi(), rule, spec)).max())


def max_cfl(rule: QuadratureRule, spec: StencilSpec, cfg: ScanConfig = ScanConfig()) -> float:
    """Largest ``lambda = k * lambda_step`` with ``max|Q| <= 1 + tol`` for it and every smaller step."""
    k_max = int(round(cfg.lambda_max / cfg.lambda_step))
    for k in range(1, k_max + 1):
        if max_amplification(k * cfg.lambda_step, rule, spec, cfg) > 1.0 + cfg.tol:
            return round((k - 1) * cfg.lambda_step, 10)
    return round(k_max * cfg.lambda_step, 10)


def exact_cfl(rule: QuadratureRule) -> float:
    """Semi-discrete bound ``a*`` truncated to two decimals, as tabulated.

    Rules that amplify arbitrarily small imaginary-axis modes get ``0``.
    """
    if unstable_near_origin(rule):
        return 0.0
    a = imag_axis_interval(rule).a_star
    return math.floor(a * 100 + 1e-9) / 100


@dataclass(frozen=True)
class CflRow:
    rule: str
    odd: tuple[float, ...]
    even: tuple[float, ...]
    exact: float


def cfl_table(rules=TABLE_RULES, cfg: ScanConfig = ScanConfig()) -> list[CflRow]:
    """CFL bounds of every rule for odd orders 1..9 and even orders 2..10, plus the exact column."""
    rows = []
    for name in rules:
        rule = builtin_rule(name)
        odd = tuple(max_cfl(rule, StencilSpec(o), cfg) for o in ODD_ORDERS)
        even = tuple(max_cfl(rule, StencilSpec(o), cfg) for o in EVEN_ORDERS)
        rows.append(CflRow(name, odd, even, exact_cfl(rule)))
    return rows
