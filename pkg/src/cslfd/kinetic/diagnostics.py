"""Conserved-quantity diagnostics on the grid (midpoint sums)."""

from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from cslfd.grid import Field

ENTROPY_FLOOR = 1e-14
CSV_HEADER = ("t", "mass", "l1", "l2", "energy", "entropy", "e_l2", "e_linf")


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    l1: float
    l2: float
    energy: float
    entropy: float
    e_l2: float
    e_linf: float


def _entropy(values: np.ndarray) -> np.ndarray:
    pos = values > ENTROPY_FLOOR
    out = np.zeros_like(values)
    out[pos] = values[pos] * np.log(values[pos])
    return out


def phase_space_diagnostics(f: Field, E: np.ndarray, t: float = 0.0) -> DiagnosticsRecord:
    """Mass, norms, kinetic plus field energy, entropy and field norms of a 1D1V state."""
    f_vals = f.values
    dx, dv = f.grid.gx.dx, f.grid.gy.dx
    cell = dx * dv
    v = f.grid.gy.points[None, :]
    e_l2 = float(np.sqrt(np.sum(E**2) * dx))
    return DiagnosticsRecord(
        t=t,
        mass=float(np.sum(f_vals) * cell),
        l1=float(np.sum(np.abs(f_vals)) * cell),
        l2=float(np.sqrt(np.sum(f_vals**2) * cell)),
        energy=float(np.sum(f_vals * v**2) * cell + np.sum(E**2) * dx),
        entropy=float(np.sum(_entropy(f_vals)) * cell),
        e_l2=e_l2,
        e_linf=float(np.max(np.abs(E))) if E.size else 0.0,
    )


def planar_diagnostics(w: Field, E1: np.ndarray, E2: np.ndarray, t: float = 0.0) -> DiagnosticsRecord:
    """The same record for a guiding-centre density or Euler vorticity; energy is ``sum |E|^2``."""
    vals = w.values
    cell = w.grid.cell_area
    e2 = E1**2 + E2**2
    return DiagnosticsRecord(
        t=t,
        mass=float(np.sum(vals) * cell),
        l1=float(np.sum(np.abs(vals)) * cell),
        l2=float(np.sqrt(np.sum(vals**2) * cell)),
        energy=float(np.sum(e2) * cell),
        entropy=float(np.sum(_entropy(vals)) * cell),
        e_l2=float(np.sqrt(np.sum(e2) * cell)),
        e_linf=float(np.sqrt(np.max(e2))),
    )


def relative_deviation(history: list[DiagnosticsRecord], name: str) -> np.ndarray:
    """``(q(t) - q(0)) / |q(0)|`` for one diagnostic."""
    q = np.array([getattr(r, name) for r in history])
    return (q - q[0]) / abs(q[0])


def mass_deviation(history: list[DiagnosticsRecord]) -> float:
    """Largest ``|mass(t) - mass(0)|`` relative to the initial L1 norm.

    Equal to the relative mass deviation for non-negative data, and still
    meaningful for signed data whose total mass is zero.
    """
    m = np.array([r.mass for r in history])
    return float(np.max(np.abs(m - m[0])) / history[0].l1)


def write_diagnostics_csv(path: str | Path, history: list[DiagnosticsRecord]) -> None:
    names = [f.name for f in fields(DiagnosticsRecord)]
    assert tuple(names) == CSV_HEADER
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in history:
            writer.writerow([f"{v:.17g}" for v in astuple(rec)])
