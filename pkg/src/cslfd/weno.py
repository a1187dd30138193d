"""Point-value interpolation at characteristic feet and flux reconstruction.

Two stencil families are supported. Odd orders ``2r+1`` interpolate on the
nodes ``j-m-r .. j-m+r`` around the cell ``[x_{j-m-1}, x_{j-m}]`` containing
the departure point and reconstruct ``F_{i+1/2}`` from ``F_{i-r} .. F_{i+r}``.
Even orders ``2r`` use the symmetric node set ``j-m-r .. j-m+r-1`` and the
symmetric flux stencil ``F_{i-r+1} .. F_{i+r}``. Negative shifts and
negative winds use the mirror image of these stencils.

All coefficient tables are built once per order in exact rational arithmetic
and cached as floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

WENO_EPS = 1e-6
WENO_POWER = 2


@dataclass(frozen=True)
class StencilSpec:
    order: int
    mode: str = "linear"

    def __post_init__(self):
        if not 1 <= self.order <= 10:
            raise ValueError(f"order must be in 1..10, got {self.order}")
        if self.mode not in ("linear", "weno"):
            raise ValueError(f"mode must be 'linear' or 'weno', got {self.mode!r}")
        if self.mode == "weno" and (self.order % 2 == 0 or self.order < 3 or self.order > 9):
            raise ValueError("WENO weighting is available for odd orders 3..9 only")

    @property
    def reach(self) -> int:
        """Half-width of the stencils in grid points."""
        return self.order // 2 + 1


# ---------------------------------------------------------------------------
# exact coefficient tables


def interp_offsets(order: int) -> tuple[int, ...]:
    r = order // 2
    if order % 2:
        return tuple(range(-r, r + 1))
    return tuple(range(-r, r))


def recon_offsets(order: int) -> tuple[int, ...]:
    r = order // 2
    if order % 2:
        return tuple(range(-r, r + 1))
    return tuple(range(-r + 1, r + 1))


def _inverse(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == k)) for k in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                fac = aug[r][col]
                aug[r] = [a - fac * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _interp_poly(nodes) -> list[list[Fraction]]:
    """Matrix ``P`` with ``p(t) = sum_p t**p * (P @ v)[p]`` interpolating ``v`` at ``nodes``."""
    vander = [[Fraction(o) ** p for p in range(len(nodes))] for o in nodes]
    return _inverse(vander)


def _average_poly(cells) -> list[list[Fraction]]:
    """Matrix mapping cell averages over ``[o-1/2, o+1/2]`` to monomial coefficients."""
    half = Fraction(1, 2)
    k = len(cells)
    mat = [
        [((o + half) ** (p + 1) - (o - half) ** (p + 1)) / (p + 1) for p in range(k)]
        for o in cells
    ]
    return _inverse(mat)


def _eval_rows(coef: list[list[Fraction]], t: Fraction) -> list[Fraction]:
    """Row vector ``powers(t) @ coef``."""
    k = len(coef)
    return [sum(t**p * coef[p][c] for p in range(k)) for c in range(k)]


def _smoothness_form(coef: list[list[Fraction]], lo: Fraction, hi: Fraction) -> np.ndarray:
    """Quadratic form of sum_l int_lo^hi (d^l p / dt^l)^2 dt for l = 1..deg."""
    k = len(coef)
    gram = [
        [(hi ** (a + b + 1) - lo ** (a + b + 1)) / (a + b + 1) for b in range(k)] for a in range(k)
    ]
    form = [[Fraction(0)] * k for _ in range(k)]
    deriv = [list(row) for row in coef]
    for _ in range(1, k):
        # differentiate: new[p] = (p+1) * old[p+1]
        deriv = [[(p + 1) * deriv[p + 1][c] for c in range(k)] for p in range(k - 1)] + [
            [Fraction(0)] * k
        ]
        for a in range(k):
            for b in range(k):
                g = gram[a][b]
                if g == 0:
                    continue
                for c1 in range(k):
                    da = deriv[a][c1]
                    if da == 0:
                        continue
                    for c2 in range(k):
                        form[c1][c2] += da * g * deriv[b][c2]
    return np.array([[float(v) for v in row] for row in form])


@lru_cache(maxsize=None)
def lagrange_table(order: int) -> np.ndarray:
    """``P[p, k]``: coefficient of ``t**p`` in the Lagrange basis of node ``k``."""
    return np.array([[float(v) for v in row] for row in _interp_poly(interp_offsets(order))])


@lru_cache(maxsize=None)
def reconstruction_coefficients(order: int) -> np.ndarray:
    """Linear flux weights on ``recon_offsets(order)`` for ``F_{i+1/2}``."""
    coef = _average_poly(recon_offsets(order))
    return np.array([float(v) for v in _eval_rows(coef, Fraction(1, 2))])


@dataclass(frozen=True)
class _WenoTables:
    sub_poly: np.ndarray  # (r+1 substencils, r+1 powers, r+1 values)
    smooth: np.ndarray  # (r+1, r+1, r+1) quadratic forms
    linear: np.ndarray  # interpolation: (r+1 powers, r+1 substencils); reconstruction: (r+1,)


@lru_cache(maxsize=None)
def _weno_interp_tables(order: int) -> _WenoTables:
    r = order // 2
    nodes = interp_offsets(order)
    subs = [nodes[k : k + r + 1] for k in range(r + 1)]
    polys = [_interp_poly(s) for s in subs]
    full = _interp_poly(nodes)
    # linear weights d_k(t) are polynomials of degree r; sample at r+1 non-nodal
    # points, solve the triangular consistency system, then fit exactly
    samples = [Fraction(-(2 * i + 1), 2 * (r + 1)) for i in range(r + 1)]
    d_samples = []
    for t in samples:
        target = _eval_rows(full, t)
        locals_ = [_eval_rows(p, t) for p in polys]
        d = []
        for i in range(r + 1):
            acc = target[i] - sum(d[k] * locals_[k][i - k] for k in range(i))
            d.append(acc / locals_[i][0])
        d_samples.append(d)
    vinv = _inverse([[t**p for p in range(r + 1)] for t in samples])
    lin = [[sum(vinv[p][s] * d_samples[s][k] for s in range(r + 1)) for k in range(r + 1)] for p in range(r + 1)]
    return _WenoTables(
        sub_poly=np.array([[[float(v) for v in row] for row in p] for p in polys]),
        smooth=np.stack([_smoothness_form(p, Fraction(-1), Fraction(0)) for p in polys]),
        linear=np.array([[float(v) for v in row] for row in lin]),
    )


@lru_cache(maxsize=None)
def _weno_recon_tables(order: int) -> _WenoTables:
    r = order // 2
    cells = recon_offsets(order)
    subs = [cells[k : k + r + 1] for k in range(r + 1)]
    polys = [_average_poly(s) for s in subs]
    half = Fraction(1, 2)
    target = _eval_rows(_average_poly(cells), half)
    locals_ = [_eval_rows(p, half) for p in polys]
    d = []
    for i in range(r + 1):
        acc = target[i] - sum(d[k] * locals_[k][i - k] for k in range(i))
        d.append(acc / locals_[i][0])
    return _WenoTables(
        sub_poly=np.array([[float(v) for v in row] for row in locals_])[:, None, :],
        smooth=np.stack([_smoothness_form(p, -half, half) for p in polys]),
        linear=np.array([float(v) for v in d]),
    )


def _powers(t: np.ndarray, n: int) -> np.ndarray:
    """``t**0 .. t**(n-1)`` stacked in a new last axis."""
    out = np.empty(t.shape + (n,))
    out[..., 0] = 1.0
    for p in range(1, n):
        out[..., p] = out[..., p - 1] * t
    return out


def linear_interp_weights(order: int, t) -> np.ndarray:
    """Interpolation weights on ``interp_offsets(order)`` at oriented position ``t``."""
    t = np.asarray(t, dtype=float)
    powers = _powers(t, order)
    return powers @ lagrange_table(order)


def interp_linear_weights(order: int, t) -> np.ndarray:
    """Optimal WENO weights ``d_k(t)`` for the ``r+1`` interpolation substencils."""
    tab = _weno_interp_tables(order)
    t = np.asarray(t, dtype=float)
    powers = _powers(t, tab.linear.shape[0])
    return powers @ tab.linear


def recon_linear_weights(order: int) -> np.ndarray:
    return _weno_recon_tables(order).linear.copy()


def smoothness_indicators(values: np.ndarray, order: int, kind: str = "reconstruct") -> np.ndarray:
    """Smoothness indicator of every substencil, shape ``values.shape[:-1] + (r+1,)``."""
    tab = _weno_recon_tables(order) if kind == "reconstruct" else _weno_interp_tables(order)
    r = order // 2
    out = []
    for k in range(r + 1):
        v = values[..., k : k + r + 1]
        out.append(np.sum((v @ tab.smooth[k]) * v, axis=-1))
    return np.stack(out, axis=-1)


def weno_nonlinear_weights(
    stencil_values: np.ndarray,
    linear_weights: np.ndarray,
    kind: str = "reconstruct",
    eps: float = WENO_EPS,
    power: int = WENO_POWER,
) -> np.ndarray:
    """Convex WENO weights for the substencils of a full odd-order stencil.

    ``stencil_values`` holds the ``2r+1`` values of the full stencil in the
    last axis; ``linear_weights`` the ``r+1`` optimal weights (broadcastable).
    """
    stencil_values = np.asarray(stencil_values)
    order = stencil_values.shape[-1]
    if order % 2 == 0 or order < 3:
        raise ValueError("WENO weights need an odd stencil of at least 3 values")
    beta = smoothness_indicators(stencil_values, order, kind)
    if np.iscomplexobj(beta):
        beta = np.abs(beta)
    alpha = np.asarray(linear_weights) / (eps + beta) ** power
    return alpha / alpha.sum(axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# kernels on oriented stencils (last axis = stencil)


def interp_kernel(stencil: np.ndarray, t, spec: StencilSpec) -> np.ndarray:
    """Evaluate the interpolant of ``stencil`` at oriented position ``t`` in (-1, 0]."""
    if spec.mode == "linear":
        w = linear_interp_weights(spec.order, t)
        return np.einsum("...k,...k->...", w, stencil) if np.ndim(w) > 1 else stencil @ w
    tab = _weno_interp_tables(spec.order)
    r = spec.order // 2
    t = np.asarray(t, dtype=float)
    powers = _powers(t, r + 1)
    d = powers @ tab.linear
    omega = weno_nonlinear_weights(stencil, d, kind="interpolate")
    out = 0.0
    for k in range(r + 1):
        lk = powers @ tab.sub_poly[k]
        sub = stencil[..., k : k + r + 1]
        pk = np.einsum("...i,...i->...", lk, sub) if lk.ndim > 1 else sub @ lk
        out = out + omega[..., k] * pk
    return out


def recon_kernel(stencil: np.ndarray, spec: StencilSpec) -> np.ndarray:
    """Flux at the right interface from values on ``recon_offsets`` (wind +1)."""
    if spec.mode == "linear":
        return stencil @ reconstruction_coefficients(spec.order)
    tab = _weno_recon_tables(spec.order)
    r = spec.order // 2
    omega = weno_nonlinear_weights(stencil, tab.linear, kind="reconstruct")
    out = 0.0
    for k in range(r + 1):
        out = out + omega[..., k] * (stencil[..., k : k + r + 1] @ tab.sub_poly[k, 0])
    return out


# ---------------------------------------------------------------------------
# gathering along an axis


def _split_shift(shift):
    shift = np.asarray(shift, dtype=float)
    sign = np.where(shift >= 0, 1, -1)
    a = np.abs(shift)
    m = np.floor(a)
    return sign, m.astype(np.int64), -(a - m)


def _gather(values: np.ndarray, idx: np.ndarray, boundary: str) -> np.ndarray:
    """``values[..., idx]`` along the last axis with periodic wrap or zero ghosts.

    ``idx`` has shape ``values.shape + (k,)`` or ``(n, k)``.
    """
    n = values.shape[-1]
    if boundary == "periodic":
        idx = idx % n
        mask = None
    elif boundary == "zero":
        mask = (idx >= 0) & (idx < n)
        idx = np.clip(idx, 0, n - 1)
    else:
        raise ValueError(f"unknown boundary {boundary!r}")
    if idx.ndim == 2:
        out = values[..., idx]
    else:
        flat = idx.reshape(idx.shape[:-2] + (-1,))
        out = np.take_along_axis(values, flat, axis=-1).reshape(idx.shape)
    if mask is not None:
        out = np.where(mask, out, 0.0)
    return out


def interpolate_departure(
    values: np.ndarray,
    shift,
    spec: StencilSpec,
    axis: int = -1,
    boundary: str = "periodic",
) -> np.ndarray:
    """Values at ``x_j - shift_j * dx`` along ``axis`` for every ``j``.

    ``shift`` is a scalar or an array broadcastable to ``values``. The integer
    part of ``|shift|`` translates the stencil; the fractional part selects the
    position inside the cell.
    """
    values = np.asarray(values)
    if np.ndim(shift):
        shift = np.moveaxis(np.broadcast_to(np.asarray(shift, dtype=float), values.shape), axis, -1)
    values = np.moveaxis(values, axis, -1)
    n = values.shape[-1]
    offs = np.array(interp_offsets(spec.order))
    j = np.arange(n)
    if np.ndim(shift) == 0:
        sign, m, t = _split_shift(shift)
        idx = (j - sign * m)[:, None] + sign * offs[None, :]
        out = interp_kernel(_gather(values, idx, boundary), t, spec)
    else:
        sign, m, t = _split_shift(shift)
        idx = (j - sign * m)[..., None] + sign[..., None] * offs
        out = interp_kernel(_gather(values, idx, boundary), t, spec)
    return np.moveaxis(out, -1, axis)


def interpolate_at_departure(f, j: int, shift: float, spec: StencilSpec) -> float:
    """Single-point version of :func:`interpolate_departure` on a periodic field."""
    values = np.asarray(getattr(f, "values", f))
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite input values")
    n = values.shape[-1]
    sign, m, t = _split_shift(shift)
    offs = np.array(interp_offsets(spec.order))
    idx = (j - sign * m + sign * offs) % n
    return interp_kernel(values[idx], t, spec)[()]


def interpolate_2d(
    values: np.ndarray,
    shift_x,
    shift_y,
    spec: StencilSpec,
    boundary: tuple[str, str] = ("periodic", "periodic"),
) -> np.ndarray:
    """Tensor-product interpolation at ``(x_i - sx*dx, y_j - sy*dy)``: x first, then y.

    ``shift_x`` and ``shift_y`` are arrays of the grid shape (or scalars).
    """
    values = np.asarray(values)
    nx, ny = values.shape
    sx = np.broadcast_to(np.asarray(shift_x, dtype=float), (nx, ny))
    sy = np.broadcast_to(np.asarray(shift_y, dtype=float), (nx, ny))
    offs = np.array(interp_offsets(spec.order))
    gx, mx, tx = _split_shift(sx)
    gy, my, ty = _split_shift(sy)
    ix = (np.arange(nx)[:, None] - gx * mx)[..., None] + gx[..., None] * offs
    iy = (np.arange(ny)[None, :] - gy * my)[..., None] + gy[..., None] * offs
    mask = None
    ix, mask = _index(ix, nx, boundary[0], mask)
    iy, mask = _index(iy, ny, boundary[1], mask, second=True)
    block = values[ix[..., :, None], iy[..., None, :]]  # (nx, ny, ax, by)
    if mask is not None:
        block = np.where(mask, block, 0.0)
    rows = interp_kernel(np.swapaxes(block, -1, -2), tx[..., None], spec)  # (nx, ny, by)
    return interp_kernel(rows, ty, spec)


def _index(idx, n, boundary, mask, second=False):
    if boundary == "periodic":
        return idx % n, mask
    if boundary != "zero":
        raise ValueError(f"unknown boundary {boundary!r}")
    ok = (idx >= 0) & (idx < n)
    ok = ok[..., None, :] if second else ok[..., :, None]
    mask = ok if mask is None else (mask & ok)
    return np.clip(idx, 0, n - 1), mask


def reconstruct_fluxes(
    values: np.ndarray,
    spec: StencilSpec,
    wind=1,
    axis: int = -1,
    boundary: str = "periodic",
) -> np.ndarray:
    """Interface fluxes ``F_{i+1/2}`` along ``axis``.

    Periodic: ``n`` interfaces ``i = 0..n-1``. Zero boundary: ``n+1`` interfaces
    ``i = -1..n-1`` computed with zero ghost values. ``wind`` is +1, -1 or an
    array of signs with the output's shape.
    """
    values = np.moveaxis(np.asarray(values), axis, -1)
    n = values.shape[-1]
    offs = np.array(recon_offsets(spec.order))
    faces = np.arange(n) if boundary == "periodic" else np.arange(-1, n)
    wind_arr = np.asarray(wind)
    if wind_arr.ndim:
        wind_arr = np.moveaxis(wind_arr, axis, -1)
    out = None
    for w in (1, -1):
        if wind_arr.ndim == 0 and int(wind_arr) != w:
            continue
        if wind_arr.ndim and not np.any(wind_arr == w):
            continue
        idx = faces[:, None] + (offs if w > 0 else 1 - offs)[None, :]
        flux = recon_kernel(_gather(values, idx, boundary), spec)
        out = flux if out is None else np.where(wind_arr == w, flux, out)
    if out is None:
        out = np.zeros(values.shape[:-1] + (faces.size,), dtype=values.dtype)
    return np.moveaxis(out, -1, axis)


def reconstruct_interface_flux(F, i_face: int, wind: int, spec: StencilSpec) -> float:
    """``F_{i+1/2}`` for a single interface of a periodic grid function."""
    values = np.asarray(getattr(F, "values", F))
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite input values")
    n = values.shape[-1]
    offs = np.array(recon_offsets(spec.order))
    idx = (i_face + (offs if wind > 0 else 1 - offs)) % n
    return recon_kernel(values[idx], spec)[()]


def flux_difference(
    values: np.ndarray,
    spec: StencilSpec,
    wind=1,
    axis: int = -1,
    boundary: str = "periodic",
) -> np.ndarray:
    """``F_{i+1/2} - F_{i-1/2}`` for every point; zero boundary closes the outer faces."""
    flux = np.moveaxis(reconstruct_fluxes(values, spec, wind, axis, boundary), axis, -1)
    if boundary == "periodic":
        diff = flux - np.roll(flux, 1, axis=-1)
    else:
        flux = flux.copy()
        flux[..., 0] = 0.0
        flux[..., -1] = 0.0
        diff = flux[..., 1:] - flux[..., :-1]
    return np.moveaxis(diff, -1, axis)
