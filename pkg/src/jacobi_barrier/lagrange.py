"""Barycentric Lagrange interpolation on Jacobi roots mapped to ``[0, theta]``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jacobi import JacobiParams, jacobi_roots


@dataclass(frozen=True, eq=False)
class NodeGrid:
    params: JacobiParams
    n: int
    standard: np.ndarray
    nodes: np.ndarray
    theta: float
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.n + 1


def barycentric_weights(standard: np.ndarray) -> np.ndarray:
    """Weights ``1/prod(x_i - x_j)`` for nodes in ``[-1, 1]``, normalised to max 1.

    Each factor is doubled (the reciprocal of the interval's capacity) so the
    products stay near unity instead of underflowing for large node counts.
    """
    diff = 2.0 * (standard[:, None] - standard[None, :])
    np.fill_diagonal(diff, 1.0)
    sign = np.prod(np.sign(diff), axis=1)
    logmag = -np.sum(np.log(np.abs(diff)), axis=1)
    w = sign * np.exp(logmag - logmag.max())
    return w


def build_grid(p: JacobiParams, n: int, theta: float) -> NodeGrid:
    """Roots of ``J_{n+1}^{(a,b)}`` shifted affinely onto ``(0, theta)``."""
    if n < 0:
        raise ValueError("degree n must be >= 0")
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    std = jacobi_roots(p, n + 1)
    nodes = theta * (std + 1.0) / 2.0
    for arr in (std, nodes):
        arr.setflags(write=False)
    w = barycentric_weights(std)
    w.setflags(write=False)
    return NodeGrid(params=p, n=n, standard=std, nodes=nodes, theta=float(theta), weights=w)


def basis_matrix(grid: NodeGrid, x) -> np.ndarray:
    """``B[k, j] = L_j(x_k)``; rows for points equal to a node are exact unit rows."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = x[:, None] - grid.nodes[None, :]
    hit = d == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = grid.weights[None, :] / d
        B = t / np.sum(t, axis=1, keepdims=True)
    rows = np.any(hit, axis=1)
    if rows.any():
        B[rows] = hit[rows].astype(float)
    return B


def basis_eval(grid: NodeGrid, i: int, x):
    """Value of the i-th Lagrange cardinal polynomial at ``x``."""
    if not 0 <= i <= grid.n:
        raise IndexError(f"basis index {i} outside 0..{grid.n}")
    out = basis_matrix(grid, x)[:, i]
    return out[0] if np.ndim(x) == 0 else out


def interpolate(grid: NodeGrid, values, x):
    """Evaluate ``sum_i values[i] L_i(x)``."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} node values, got shape {values.shape}")
    out = basis_matrix(grid, x) @ values
    return float(out[0]) if np.ndim(x) == 0 else out


def lebesgue_estimate(grid: NodeGrid, points: int = 1000) -> float:
    x = np.linspace(0.0, grid.theta, points)
    return float(np.max(np.sum(np.abs(basis_matrix(grid, x)), axis=1)))
