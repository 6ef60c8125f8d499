"""Uniform 1D mesh, Neumann-compatible difference operators, and quadrature.

A *field* is a float64 array with one value per node (length ``N + 1``) living
on a :class:`Grid`.  All operators below treat the homogeneous Neumann
condition by even reflection at the two boundary nodes, which keeps cosine
modes exact eigenvectors of the second-difference stencil and makes the
conservative flux divergence integrate to zero under the trapezoidal rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NonFiniteInput,
    NonPositiveCoefficient,
    NonPositiveLength,
    TooFewCells,
)

MIN_CELLS = 8


@dataclass(frozen=True)
class Grid:
    """Uniform mesh on (0, L) with N cells and N+1 nodes x_i = i*h."""

    length: float
    n_cells: int
    spacing: float
    nodes: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1


def build_grid(length: float, n_cells: int) -> Grid:
    """Create a uniform grid; raises for L <= 0 or fewer than 8 cells."""
    if not (length > 0 and np.isfinite(length)):
        raise NonPositiveLength(f"domain length must be positive, got {length}")
    n_cells = int(n_cells)
    if n_cells < MIN_CELLS:
        raise TooFewCells(f"need at least {MIN_CELLS} cells, got {n_cells}")
    h = length / n_cells
    nodes = np.linspace(0.0, length, n_cells + 1)
    nodes.flags.writeable = False
    return Grid(length=float(length), n_cells=n_cells, spacing=h, nodes=nodes)


def _as_field(grid: Grid, values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (grid.n_nodes,):
        raise NonFiniteInput(
            f"field has shape {arr.shape}, expected ({grid.n_nodes},)"
        )
    return arr


def _require_finite(arr: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("field contains NaN or Inf")
    return arr


# -- raw stencils (no validation; shared with the pure-python backend) --------

def d1_raw(f: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    return out


def d2_raw(f: np.ndarray, h: float) -> np.ndarray:
    q = 1.0 / (h * h)
    out = np.empty_like(f)
    out[1:-1] = (f[:-2] - 2.0 * f[1:-1] + f[2:]) * q
    out[0] = 2.0 * (f[1] - f[0]) * q
    out[-1] = 2.0 * (f[-2] - f[-1]) * q
    return out


def div_flux_raw(coef: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    # face fluxes F_{i+1/2} = mean(coef) * (f[i+1]-f[i]) / h, zero at the walls;
    # boundary nodes own a half cell, so their divergence is F / (h/2)
    q = 1.0 / (h * h)
    flux = 0.5 * (coef[:-1] + coef[1:]) * (f[1:] - f[:-1])
    out = np.empty_like(f)
    out[1:-1] = (flux[1:] - flux[:-1]) * q
    out[0] = 2.0 * flux[0] * q
    out[-1] = -2.0 * flux[-1] * q
    return out


# -- public operators ----------------------------------------------------------

def d1_central(grid: Grid, f) -> np.ndarray:
    """Central first derivative; boundary nodes are exactly 0 (Neumann)."""
    f = _require_finite(_as_field(grid, f))
    return d1_raw(f, grid.spacing)


def d2_neumann(grid: Grid, f) -> np.ndarray:
    """Three-point second derivative with even-reflection ghost nodes."""
    f = _require_finite(_as_field(grid, f))
    return d2_raw(f, grid.spacing)


def d3_neumann(grid: Grid, f) -> np.ndarray:
    """Third derivative realized as d1_central(d2_neumann(f))."""
    f = _require_finite(_as_field(grid, f))
    return d1_raw(d2_raw(f, grid.spacing), grid.spacing)


def div_flux_neumann(grid: Grid, coef, f) -> np.ndarray:
    """Conservative divergence of coef * f_x with zero wall fluxes.

    Face coefficients are arithmetic means of the nodal values.  With
    coef identically 1 this reduces to :func:`d2_neumann` at every node,
    and its trapezoidal integral vanishes to roundoff for any input.
    """
    coef = _require_finite(_as_field(grid, coef))
    f = _require_finite(_as_field(grid, f))
    if np.min(coef) <= 0.0:
        raise NonPositiveCoefficient("flux coefficient must be strictly positive")
    return div_flux_raw(coef, f, grid.spacing)


def quad_trapz(grid: Grid, f) -> float:
    """Composite trapezoidal rule over (0, L)."""
    f = _require_finite(_as_field(grid, f))
    return grid.spacing * (0.5 * (f[0] + f[-1]) + f[1:-1].sum())


def norm_linf(f) -> float:
    """Max magnitude over the nodes."""
    arr = np.asarray(f, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("field contains NaN or Inf")
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def mode_eigenvalue(grid: Grid, k: int) -> float:
    """Discrete eigenvalue mu_h of -d2_neumann on the cosine mode k.

    Cosine modes cos(k pi x / L) satisfy d2_neumann(f) = -mu_h f exactly,
    with mu_h = (4 / h^2) sin^2(k pi h / (2 L)).
    """
    s = np.sin(k * np.pi * grid.spacing / (2.0 * grid.length))
    return float(4.0 * s * s / (grid.spacing * grid.spacing))


def cosine_mode(grid: Grid, k: int) -> np.ndarray:
    """Nodal values of cos(k pi x / L)."""
    return np.cos(k * np.pi * grid.nodes / grid.length)
