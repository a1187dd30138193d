"""Uniform grids and grid functions shared by all solvers."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def periodic_index(j: int, n: int) -> int:
    """Map any integer index onto ``[0, n)``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return j % n


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid of ``n`` points on ``[x_min, x_max)``.

    Periodic grids store nodes ``x_min + j*dx`` (the image of ``x_max`` is
    excluded). Non-periodic grids store cell centres ``x_min + (j+1/2)*dx``,
    which keeps a bounded velocity domain symmetric about zero.
    """

    n: int
    x_min: float
    x_max: float
    periodic: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"grid needs at least one point, got n={self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def points(self) -> np.ndarray:
        offset = 0.0 if self.periodic else 0.5
        return self.x_min + (np.arange(self.n) + offset) * self.dx

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers matching ``numpy.fft.fftfreq`` ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)


@dataclass(frozen=True)
class Grid2D:
    gx: Grid1D
    gy: Grid1D

    @property
    def shape(self) -> tuple[int, int]:
        return (self.gx.n, self.gy.n)

    @property
    def cell_area(self) -> float:
        return self.gx.dx * self.gy.dx

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays indexed ``[i, j]`` (x first)."""
        return np.meshgrid(self.gx.points, self.gy.points, indexing="ij")


@dataclass(frozen=True)
class Field:
    """Grid function on a :class:`Grid1D` or :class:`Grid2D`.

    Values may be real or complex. The array is copied and made read-only.
    """

    grid: Grid1D | Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values)
        expected = (self.grid.n,) if isinstance(self.grid, Grid1D) else self.grid.shape
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape} does not match grid {expected}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def cell_measure(self) -> float:
        if isinstance(self.grid, Grid1D):
            return self.grid.dx
        return self.grid.cell_area

    def total(self) -> float:
        """Discrete integral ``sum(values) * cell measure``."""
        return self.values.sum() * self.cell_measure

    def with_values(self, values: np.ndarray) -> Field:
        return Field(self.grid, values)

    def to_csv(self, path: str | Path) -> None:
        """Write ``x[,y],value`` rows, row-major over x then y."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if isinstance(self.grid, Grid1D):
                writer.writerow(["x", "value"])
                for x, v in zip(self.grid.points, self.values):
                    writer.writerow([_fmt(x), _fmt(v)])
            else:
                writer.writerow(["x", "y", "value"])
                xs, ys = self.grid.gx.points, self.grid.gy.points
                for i, x in enumerate(xs):
                    for j, y in enumerate(ys):
                        writer.writerow([_fmt(x), _fmt(y), _fmt(self.values[i, j])])


def _fmt(v) -> str:
    if np.iscomplexobj(v):
        return repr(complex(v))
    return f"{float(v):.17g}"


def read_field_csv(path: str | Path, grid: Grid1D | Grid2D) -> Field:
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    values = data[:, -1]
    if isinstance(grid, Grid2D):
        values = values.reshape(grid.shape)
    return Field(grid, values)


def field_error_norms(a: Field, b: Field) -> dict[str, float]:
    """Discrete L1, L2 and max norms of ``a - b`` weighted by the cell measure."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    diff = np.abs(a.values - b.values)
    w = a.cell_measure
    return {
        "l1": float(diff.sum() * w),
        "l2": float(np.sqrt((diff**2).sum() * w)),
        "linf": float(diff.max()) if diff.size else 0.0,
    }
