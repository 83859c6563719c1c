"""Integrals of the heat kernel against exponentials and Lagrange cardinals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc

from .lagrange import NodeGrid, basis_matrix
from .transform import heat_kernel


@dataclass(frozen=True)
class QuadConfig:
    """Panel layout for kernel-times-basis integrals.

    Widths are in units of the kernel scale ``c*sqrt(tau)``.
    """

    order: int = 40
    peak_window: float = 8.0
    fine_width: float = 1.0
    target_rel_error: float = 1e-12

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError("panel order must be >= 2")
        if not (self.peak_window > 0 and self.fine_width > 0):
            raise ValueError("panel widths must be positive")


@lru_cache(maxsize=32)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(order)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def panel_points(breaks, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights over consecutive ``breaks`` panels."""
    breaks = np.asarray(breaks, dtype=float)
    t, w = _legendre(order)
    half = 0.5 * np.diff(breaks)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    x = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    ww = (half[:, None] * w[None, :]).ravel()
    return x, ww


def gauss_legendre_panel(f, a: float, b: float, order: int = 40) -> float:
    if not a <= b:
        raise ValueError("need a <= b")
    if order < 2:
        raise ValueError("order must be >= 2")
    x, w = panel_points([a, b], order)
    return float(np.dot(w, f(x)))


def composite_gauss_legendre(f, breaks, order: int = 40) -> float:
    x, w = panel_points(breaks, order)
    return float(np.dot(w, f(x)))


def _erf_diff(hi, lo):
    """``erf(hi) - erf(lo)`` without cancellation in either tail."""
    hi = np.asarray(hi, dtype=float)
    lo = np.asarray(lo, dtype=float)
    upper = erfc(lo) - erfc(hi)
    lower = erfc(-hi) - erfc(-lo)
    return np.where(lo + hi >= 0, upper, lower)


def gaussian_exp_moment(x, lam: float, lo: float, hi: float, tau: float, c2: float):
    """``int_lo^hi k(x - xi, tau) exp(lam * xi) dxi`` in closed form.

    Completing the square moves the Gaussian centre to ``x + 2 lam c2 tau``
    and leaves the factor ``exp(lam x + lam^2 c2 tau)``.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not lo <= hi:
        raise ValueError("need lo <= hi")
    x = np.asarray(x, dtype=float)
    s = 2.0 * math.sqrt(c2 * tau)
    centre = x + 2.0 * lam * c2 * tau
    mass = 0.5 * _erf_diff((hi - centre) / s, (lo - centre) / s)
    out = np.exp(lam * x + lam * lam * c2 * tau) * mass if lam != 0 else mass
    return out[()] if out.ndim == 0 else out


def row_breaks(centre: float, theta: float, scale: float, n: int, cfg: QuadConfig) -> np.ndarray:
    """Panel edges on ``[0, theta]`` for a kernel centred at ``centre``.

    Uniform fine panels cover the peak window; outside it panels double in
    width. Every panel is also capped at ``4 theta / (n + 1)`` so the degree-n
    cardinal factor stays resolved.
    """
    cap = 4.0 * theta / (n + 1)
    h = min(cfg.fine_width * scale, cap)
    half_window = cfg.peak_window * scale
    wl = max(0.0, centre - half_window)
    wr = min(theta, centre + half_window)

    k = np.arange(math.ceil((wl - centre) / h), math.floor((wr - centre) / h) + 1)
    inner = centre + k * h
    edges = [wl, *inner[(inner > wl) & (inner < wr)], wr]

    right, w = wr, h
    while right < theta:
        right = min(theta, right + w)
        edges.append(right)
        w = min(2.0 * w, cap)
    left, w = wl, h
    while left > 0.0:
        left = max(0.0, left - w)
        edges.append(left)
        w = min(2.0 * w, cap)
    return np.unique(np.asarray(edges))


def kernel_basis_row(grid: NodeGrid, i: int, tau: float, c2: float, cfg: QuadConfig | None = None,
                     *, centre: float | None = None) -> np.ndarray:
    """All ``int_0^theta k(x_i - xi, tau) L_j(xi) dxi`` for one kernel centre."""
    cfg = cfg or QuadConfig()
    x0 = float(grid.nodes[i]) if centre is None else float(centre)
    scale = math.sqrt(c2 * tau)
    breaks = row_breaks(x0, grid.theta, scale, grid.n, cfg)
    xi, w = panel_points(breaks, cfg.order)
    kw = w * heat_kernel(x0 - xi, tau, c2)
    d = xi[None, :] - grid.nodes[:, None]
    if not d.all():
        return kw @ basis_matrix(grid, xi)
    # barycentric form with the normaliser folded into the quadrature weights
    t = grid.weights[:, None] / d
    return t @ (kw / t.sum(axis=0))


def kernel_basis_integral(grid: NodeGrid, i: int, j: int, tau: float, c2: float,
                          cfg: QuadConfig | None = None) -> float:
    if not 0 <= j <= grid.n:
        raise IndexError(f"basis index {j} outside 0..{grid.n}")
    return float(kernel_basis_row(grid, i, tau, c2, cfg)[j])

