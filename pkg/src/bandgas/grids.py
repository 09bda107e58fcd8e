"""Rectangular complex evaluation grids shared by the ward module and CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ComplexGrid:
    """Rectangular lattice x[i] + i y[j] with optional attached values."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray | None = field(default=None)

    @staticmethod
    def from_ranges(x_min, x_max, nx, y_min, y_max, ny):
        if nx < 2 or ny < 2:
            raise ValueError("grid counts must be >= 2")
        return ComplexGrid(np.linspace(x_min, x_max, nx),
                           np.linspace(y_min, y_max, ny))

    def points(self):
        return self.xs[:, None] + 1j * self.ys[None, :]

    @property
    def shape(self):
        return (self.xs.size, self.ys.size)
