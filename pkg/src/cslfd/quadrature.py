"""Time quadrature rules on [0, 1] and their stability on the imaginary axis.

A rule with nodes ``c`` and weights ``b`` integrates ``z' = y z`` over one
step with the stability function ``R(y) = 1 + y * sum(b * exp(c * y))``. The
conservative scheme applied to a Fourier mode of the advection equation
multiplies it by ``R(-i xi)``, so the largest interval ``[0, y*]`` of the
imaginary axis with ``|R(iy)| <= 1`` bounds the usable CFL number by
``y*/pi``.

Symmetric rules with an even number of nodes can be written in terms of
``c~ = 1 - 2c`` and ``C~(y) = sum_{l <= s/2} b_l cos(c~_l y / 2)``. Forcing
``C~`` to vanish at ``y = 2 pi k`` together with ``s/2`` even-moment
conditions gives rules with very wide stability intervals; those are computed
here by damped Newton iteration with continuation from Gauss-Legendre.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy.optimize import brentq

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureRule:
    c: tuple[float, ...]
    b: tuple[float, ...]
    name: str = ""

    def __post_init__(self):
        c = tuple(float(v) for v in self.c)
        b = tuple(float(v) for v in self.b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        if len(c) != len(b) or not c:
            raise ValueError("nodes and weights must be non-empty and of equal length")
        if abs(sum(b) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(b)!r}")
        if any(v < 0.0 or v > 1.0 for v in c):
            raise ValueError("nodes must lie in [0, 1]")
        if any(c1 >= c2 for c1, c2 in zip(c, c[1:])):
            raise ValueError("nodes must be strictly increasing")

    @property
    def s(self) -> int:
        return len(self.c)

    @property
    def nodes(self) -> np.ndarray:
        return np.array(self.c)

    @property
    def weights(self) -> np.ndarray:
        return np.array(self.b)

    @property
    def is_symmetric(self) -> bool:
        c, b = self.nodes, self.weights
        return bool(np.allclose(c + c[::-1], 1.0, atol=1e-13) and np.allclose(b, b[::-1], atol=1e-13))

    @property
    def ctilde(self) -> np.ndarray:
        return 1.0 - 2.0 * self.nodes


# Nodes are listed on [0, 1]; only the first half is given, the rest follows
# from c_{s-l+1} = 1 - c_l and b_{s-l+1} = b_l.
_OPTIMIZED_HALVES = {
    4: (
        (0.199889211759008, 0.300110788240992),
        (0.083205952308564, 0.347904700949451),
        4.8125674352016,
    ),
    8: (
        (0.058702317190867, 0.119923212650690, 0.154113350301760, 0.167261119856682),
        (0.023248965963790, 0.114686793929813, 0.253867587586135, 0.415892817555109),
        9.4130380474585,
    ),
    12: (
        (
            0.027182888487959,
            0.059633412276882,
            0.084799522112170,
            0.101625491473440,
            0.111259037829236,
            0.115499647820313,
        ),
        (
            0.010668025829619,
            0.054560771376909,
            0.127471263371368,
            0.221353922812027,
            0.328318059665840,
            0.442082833046309,
        ),
        13.7671988660496,
    ),
}

PUBLISHED_MAX_CFL = {s: v[2] for s, v in _OPTIMIZED_HALVES.items()}


def symmetric_rule(b_half, c_half, name: str = "") -> QuadratureRule:
    """Assemble a symmetric rule from the first half of its weights and nodes."""
    b_half = [float(v) for v in b_half]
    c_half = [float(v) for v in c_half]
    b = b_half + b_half[::-1]
    c = c_half + [1.0 - v for v in c_half[::-1]]
    # the printed halves sum to 1/2 only to ~1e-15
    total = sum(b)
    b = [v / total for v in b]
    return QuadratureRule(tuple(c), tuple(b), name)


def gauss_legendre(s: int) -> QuadratureRule:
    if not 1 <= s <= 8:
        raise ValueError(f"Gauss-Legendre rules are available for s in 1..8, got {s}")
    x, w = np.polynomial.legendre.leggauss(s)
    return QuadratureRule(tuple((x + 1.0) / 2.0), tuple(w / 2.0), f"GL{s}")


def builtin_rule(name: str, s: int | None = None) -> QuadratureRule:
    """Named rules: midpoint, trapezoid, simpson, gauss_legendre(s), optimized(s).

    Short forms ``gl2`` and ``s4`` / ``optimized4`` are accepted as well.
    """
    key = name.strip().lower().replace("-", "_")
    if key.startswith("gl") and key[2:].isdigit():
        key, s = "gauss_legendre", int(key[2:])
    elif key.startswith("optimized") and key[9:].isdigit():
        key, s = "optimized", int(key[9:])
    elif key.startswith("s") and key[1:].isdigit():
        key, s = "optimized", int(key[1:])
    if key == "midpoint" or key == "mid_point":
        return QuadratureRule((0.5,), (1.0,), "midpoint")
    if key in ("trapezoid", "trapezoidal"):
        return QuadratureRule((0.0, 1.0), (0.5, 0.5), "trapezoid")
    if key == "simpson":
        return QuadratureRule((0.0, 0.5, 1.0), (1 / 6, 2 / 3, 1 / 6), "simpson")
    if key == "gauss_legendre":
        if s is None:
            raise ValueError("gauss_legendre needs a node count")
        return gauss_legendre(s)
    if key == "optimized":
        if s not in _OPTIMIZED_HALVES:
            raise ValueError(f"optimized rules exist for s in {sorted(_OPTIMIZED_HALVES)}, got {s}")
        b_half, c_half, _ = _OPTIMIZED_HALVES[s]
        return symmetric_rule(b_half, c_half, f"s={s}")
    raise ValueError(f"unknown quadrature rule {name!r}")


# ---------------------------------------------------------------------------
# stability functions


def stability_R(rule: QuadratureRule, y):
    """``R(y) = 1 + y * sum_l b_l exp(c_l y)`` for complex ``y``."""
    y = np.asarray(y, dtype=complex)
    return 1.0 + y * (np.exp(np.multiply.outer(y, rule.nodes)) @ rule.weights)


def abs_R2(rule: QuadratureRule, y) -> np.ndarray:
    """``|R(iy)|^2`` for real ``y``, written as ``1 - 2 y S + y^2 (C^2 + S^2)``."""
    y = np.asarray(y, dtype=float)
    arg = np.multiply.outer(y, rule.nodes)
    C = np.cos(arg) @ rule.weights
    S = np.sin(arg) @ rule.weights
    return 1.0 - 2.0 * y * S + y * y * (C * C + S * S)


def ctilde_sum(rule: QuadratureRule, y) -> np.ndarray:
    """``C~(y) = sum over the first half of b_l cos(c~_l y / 2)``."""
    h = rule.s // 2
    y = np.asarray(y, dtype=float)
    return np.cos(np.multiply.outer(y, rule.ctilde[:h]) / 2.0) @ rule.weights[:h]


def margin_F(rule: QuadratureRule, y) -> np.ndarray:
    """``F(y) = S(y) - y/2 (C^2 + S^2)``; the rule is stable at ``y`` iff ``y F(y) >= 0``."""
    y = np.asarray(y, dtype=float)
    arg = np.multiply.outer(y, rule.nodes)
    C = np.cos(arg) @ rule.weights
    S = np.sin(arg) @ rule.weights
    return S - 0.5 * y * (C * C + S * S)


def margin_F_factored(rule: QuadratureRule, y) -> np.ndarray:
    """``2 C~(y) (sin(y/2) - y C~(y))``; equals :func:`margin_F` for symmetric even rules."""
    if not rule.is_symmetric or rule.s % 2:
        raise ValueError("factored form needs a symmetric rule with an even node count")
    y = np.asarray(y, dtype=float)
    ct = ctilde_sum(rule, y)
    return 2.0 * ct * (np.sin(y / 2.0) - y * ct)


def _mp_coefficients(rule: QuadratureRule):
    """Nodes and weights as mpmath numbers; Gauss-Legendre rules are recomputed exactly."""
    if rule.name.startswith("GL") and rule.name[2:].isdigit():
        s = rule.s
        nodes, weights = [], []
        for x0 in 2.0 * rule.nodes - 1.0:
            x = mp.mpf(x0)
            for _ in range(8):
                x -= mp.legendre(s, x) / mp.diff(lambda v: mp.legendre(s, v), x)
            dp = mp.diff(lambda v: mp.legendre(s, v), x)
            nodes.append((x + 1) / 2)
            weights.append(1 / ((1 - x * x) * dp * dp))
        return nodes, weights
    return [mp.mpf(v) for v in rule.c], [mp.mpf(v) for v in rule.b]


def margin_F_mp(rule: QuadratureRule, y, dps: int = 50):
    """``y F(y)`` in extended precision; near the origin it is below double round-off."""
    with mp.workdps(dps):
        c, b = _mp_coefficients(rule)
        out = []
        for yv in np.atleast_1d(y):
            yv = mp.mpf(float(yv))
            C = mp.fsum(bb * mp.cos(cc * yv) for cc, bb in zip(c, b))
            S = mp.fsum(bb * mp.sin(cc * yv) for cc, bb in zip(c, b))
            out.append(float(yv * (S - yv / 2 * (C * C + S * S))))
    return np.array(out)


def unstable_near_origin(rule: QuadratureRule, y_max: float = 0.5, n: int = 51) -> bool:
    """True if ``y F(y) < 0`` somewhere in ``(0, y_max)``, evaluated in extended precision."""
    y = np.linspace(0.0, y_max, n)[1:]
    return bool(np.any(margin_F_mp(rule, y) < 0.0))


@dataclass
class StabilityReport:
    y_star: float
    a_star: float
    samples: np.ndarray = field(repr=False)  # columns: y, |R(iy)|^2 - 1


def imag_axis_interval(
    rule: QuadratureRule,
    y_max: float = 100.0,
    dy: float = 1e-3,
    tol: float = 1e-12,
    refine: bool = True,
) -> StabilityReport:
    """Largest ``y*`` with ``|R(iy)|^2 <= 1 + tol`` on the whole scanned ``[0, y*]``.

    The scan uses step ``dy``; with ``refine`` the first crossing is located by
    bracketing root-finding between the last passing and first failing sample.
    """
    if dy <= 0 or tol < 0:
        raise ValueError("dy must be positive and tol non-negative")
    y = np.arange(0.0, y_max + 0.5 * dy, dy)
    excess = abs_R2(rule, y) - 1.0
    bad = np.flatnonzero(excess > tol)
    samples = np.column_stack([y, excess])
    if bad.size == 0:
        y_star = float(y[-1])
    elif bad[0] == 0:
        y_star = 0.0
    else:
        k = int(bad[0])
        y_star = float(y[k - 1])
        if refine:
            g = lambda v: abs_R2(rule, v) - 1.0 - tol  # noqa: E731
            y_star = brentq(g, y[k - 1], y[k], xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return StabilityReport(y_star=y_star, a_star=y_star / np.pi, samples=samples)


def region_contour(rule: QuadratureRule, re_range=(-6.0, 2.0), im_range=(-16.0, 16.0), n: int = 401):
    """Polylines of ``|R(z)| = 1`` in the complex plane as a list of ``(k, 2)`` arrays."""
    import contourpy

    re = np.linspace(*re_range, n)
    im = np.linspace(*im_range, n)
    z = re[None, :] + 1j * im[:, None]
    mag = np.abs(stability_R(rule, z))
    gen = contourpy.contour_generator(re, im, mag)
    return gen.lines(1.0)


def degree_of_precision(rule: QuadratureRule, tol: float = 1e-12, max_degree: int = 64) -> int:
    """Largest ``d`` such that monomials up to degree ``d`` integrate exactly on [0, 1]."""
    c, b = rule.nodes, rule.weights
    d = -1
    for k in range(max_degree + 1):
        if abs(b @ c**k - 1.0 / (k + 1)) > tol:
            break
        d = k
    return d


# ---------------------------------------------------------------------------
# optimization of symmetric rules


class NewtonFailure(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


def _moment(b, ct, k):
    return 2.0 * b @ ct ** (2 * k) - 1.0 / (2 * k + 1)


def _moment_jac(b, ct, k):
    db = 2.0 * ct ** (2 * k)
    dc = 4.0 * k * b * ct ** (2 * k - 1) if k else np.zeros_like(ct)
    return np.concatenate([db, dc])


def _zero(b, ct, k):
    return b @ np.cos(np.pi * k * ct)


def _zero_jac(b, ct, k):
    return np.concatenate([np.cos(np.pi * k * ct), -np.pi * k * b * np.sin(np.pi * k * ct)])


def _homotopy_system(u, tau, h):
    """Residual and Jacobian: ``h`` even moments, then ``h`` blended equations.

    At ``tau = 0`` the blended rows are the next ``h`` moments (Gauss-Legendre);
    at ``tau = 1`` they are ``C~(2 pi k) = 0``.
    """
    b, ct = u[:h], u[h:]
    res = np.empty(2 * h)
    jac = np.empty((2 * h, 2 * h))
    for k in range(h):
        res[k] = _moment(b, ct, k)
        jac[k] = _moment_jac(b, ct, k)
    for k in range(1, h + 1):
        row = h + k - 1
        res[row] = (1 - tau) * _moment(b, ct, h + k - 1) + tau * _zero(b, ct, k)
        jac[row] = (1 - tau) * _moment_jac(b, ct, h + k - 1) + tau * _zero_jac(b, ct, k)
    return res, jac


def _damped_newton(u, tau, h, tol, max_iter=100, min_damping=1.0 / 64):
    res, jac = _homotopy_system(u, tau, h)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm < tol:
            return u, norm
        step = np.linalg.solve(jac, -res)
        damping = 1.0
        while True:
            trial = u + damping * step
            tres, tjac = _homotopy_system(trial, tau, h)
            tnorm = np.max(np.abs(tres))
            if tnorm < norm or damping <= min_damping:
                break
            damping /= 2.0
        u, res, jac, norm = trial, tres, tjac, tnorm
    if norm < tol:
        return u, norm
    raise NewtonFailure(f"Newton did not converge at tau={tau:.4f}", norm)


def optimize_symmetric_rule(
    s: int,
    tol: float = 1e-13,
    initial_step: float = 0.05,
    min_step: float = 1e-5,
) -> QuadratureRule:
    """Symmetric ``s``-node rule with degree of precision ``s-1`` and ``C~(2 pi k) = 0``.

    Unknowns are the first-half weights ``b_l`` and ``c~_l = 1 - 2 c_l``. The
    homotopy parameter moves the last ``s/2`` equations from the Gauss-Legendre
    moment conditions to the stability conditions; every continuation step is a
    damped Newton solve, and the step is halved whenever Newton fails.
    """
    if s < 2 or s % 2:
        raise ValueError(f"s must be an even integer >= 2, got {s}")
    h = s // 2
    if s == 2:
        # b = 1/2 and cos(pi c~) = 0
        return symmetric_rule([0.5], [0.25], "optimized s=2")
    gl = gauss_legendre(s) if s <= 8 else None
    if gl is not None:
        b0, c0 = gl.weights[:h], gl.nodes[:h]
    else:
        x, w = np.polynomial.legendre.leggauss(s)
        b0, c0 = w[:h] / 2.0, (x[:h] + 1.0) / 2.0
    u = np.concatenate([b0, 1.0 - 2.0 * c0])
    tau, step, last = 0.0, initial_step, 0.0
    while tau < 1.0:
        target = min(1.0, tau + step)
        try:
            u_new, last = _damped_newton(u.copy(), target, h, tol if target == 1.0 else 1e-10)
        except NewtonFailure as exc:
            last = exc.residual
            step /= 2.0
            if step < min_step:
                raise NewtonFailure(f"continuation stalled at tau={tau:.6f} for s={s}", last) from None
            continue
        u, tau = u_new, target
        step = min(step * 1.5, 0.25)
    logger.debug("s=%d solved, residual %.2e", s, last)
    u = _polish(u, h)
    b_half, ct_half = u[:h], u[h:]
    order = np.argsort(-ct_half)  # ascending nodes c = (1 - c~)/2
    return symmetric_rule(b_half[order], (1.0 - ct_half[order]) / 2.0, f"optimized s={s}")


def _polish(u, h, dps: int = 40, iters: int = 6):
    """Newton iterations in extended precision; the system is ill-conditioned for large s."""
    with mp.workdps(dps):
        x = [mp.mpf(float(v)) for v in u]
        for _ in range(iters):
            b, ct = x[:h], x[h:]
            res, jac = [], []
            for k in range(h):
                res.append(2 * mp.fsum(bb * cc ** (2 * k) for bb, cc in zip(b, ct)) - mp.mpf(1) / (2 * k + 1))
                jac.append([2 * cc ** (2 * k) for cc in ct] + [4 * k * bb * cc ** (2 * k - 1) if k else 0 for bb, cc in zip(b, ct)])
            for k in range(1, h + 1):
                res.append(mp.fsum(bb * mp.cos(mp.pi * k * cc) for bb, cc in zip(b, ct)))
                jac.append([mp.cos(mp.pi * k * cc) for cc in ct] + [-mp.pi * k * bb * mp.sin(mp.pi * k * cc) for bb, cc in zip(b, ct)])
            step = mp.lu_solve(mp.matrix(jac), -mp.matrix(res))
            x = [xi + step[i] for i, xi in enumerate(x)]
        return np.array([float(v) for v in x])


def optimized_residual(rule: QuadratureRule) -> float:
    """Max residual of the moment and zero conditions for a symmetric rule."""
    h = rule.s // 2
    b, ct = rule.weights[:h], rule.ctilde[:h]
    res = [_moment(b, ct, k) for k in range(h)] + [_zero(b, ct, k) for k in range(1, h + 1)]
    return float(np.max(np.abs(res)))
