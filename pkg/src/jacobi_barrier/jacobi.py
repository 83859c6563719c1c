"""Jacobi polynomials: recurrence evaluation, roots and orthogonality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class RootConvergenceError(RuntimeError):
    """Newton/bisection did not drive every root residual under tolerance."""


@dataclass(frozen=True)
class JacobiParams:
    """Weight exponents of ``(1 - x)**a * (1 + x)**b`` on ``[-1, 1]``."""

    a: float = -0.5
    b: float = -0.5

    def __post_init__(self) -> None:
        if not (self.a > -1 and self.b > -1):
            raise ValueError(f"Jacobi exponents must exceed -1, got a={self.a}, b={self.b}")


CHEBYSHEV = JacobiParams(-0.5, -0.5)


def recurrence_coeffs(p: JacobiParams, i: int) -> tuple[float, float, float]:
    """Coefficients of ``J_{i+1} = (a_i x - b_i) J_i - c_i J_{i-1}``."""
    if i < 1:
        raise ValueError("recurrence coefficients are defined for i >= 1")
    a, b = p.a, p.b
    s = 2 * i + a + b
    # s > 0 and i + a + b + 1 > 0 for every i >= 1 once a, b > -1
    assert s > 0 and i + a + b + 1 > 0
    den = 2.0 * (i + 1) * (i + a + b + 1)
    ai = (s + 1) * (s + 2) / den
    bi = (b * b - a * a) * (s + 1) / (den * s)
    ci = 2.0 * (i + a) * (i + b) * (s + 2) / (den * s)
    return ai, bi, ci


@lru_cache(maxsize=256)
def _coeff_table(p: JacobiParams, degree: int) -> tuple[tuple[float, float, float], ...]:
    return tuple(recurrence_coeffs(p, i) for i in range(1, degree))


def _first(p: JacobiParams, x):
    return 0.5 * (p.a + p.b + 2) * x + 0.5 * (p.a - p.b)


def eval_jacobi(p: JacobiParams, degree: int, x):
    """Value of ``J_degree^{(a,b)}`` at ``x`` (scalar or array)."""
    return eval_jacobi_with_derivative(p, degree, x)[0]


def eval_jacobi_with_derivative(p: JacobiParams, degree: int, x):
    """Value and first derivative, both carried through the same recurrence."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev, dprev = np.ones_like(x), np.zeros_like(x)
    if degree == 0:
        return _unwrap(prev), _unwrap(dprev)
    cur = _first(p, x)
    dcur = np.full_like(x, 0.5 * (p.a + p.b + 2))
    for ai, bi, ci in _coeff_table(p, degree):
        nxt = (ai * x - bi) * cur - ci * prev
        dnxt = ai * cur + (ai * x - bi) * dcur - ci * dprev
        prev, cur = cur, nxt
        dprev, dcur = dcur, dnxt
    return _unwrap(cur), _unwrap(dcur)


def _unwrap(a):
    return a[()] if a.ndim == 0 else a


def jacobi_roots(p: JacobiParams, count: int, *, tol: float = 1e-12, max_iter: int = 100) -> np.ndarray:
    """Ascending roots of ``J_count^{(a,b)}``.

    Roots are bracketed by sign changes on a cosine-spaced grid, then polished
    with Newton steps that fall back to bisection whenever a step leaves its
    bracket.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return np.array([(p.b - p.a) / (p.a + p.b + 2)])

    lo, hi, scale = _brackets(p, count)
    sign_lo = np.sign(eval_jacobi(p, count, lo))
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f, df = eval_jacobi_with_derivative(p, count, x)
        same = np.sign(f) == sign_lo
        lo = np.where(same, x, lo)
        hi = np.where(same, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - f / df
        bad = ~np.isfinite(xn) | (xn < lo) | (xn > hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        xn = np.where(f == 0, x, xn)
        step = np.abs(xn - x)
        x = xn
        # roots live in [-1, 1], so an absolute step test is the right scale
        if np.all((step <= 4 * np.finfo(float).eps) | (np.abs(f) <= 1e-15 * scale)):
            break

    if p.a == p.b:
        x = 0.5 * (x - x[::-1])
    resid = np.abs(eval_jacobi(p, count, x))
    worst = float(np.max(resid)) / scale
    if not worst <= tol or np.any(np.diff(x) <= 0):
        raise RootConvergenceError(
            f"roots of J_{count}^({p.a},{p.b}) not converged: max relative residual {worst:.3e}"
        )
    return x


def _brackets(p: JacobiParams, count: int):
    # odd panel count keeps x = 0, the centre root of symmetric odd-degree cases, off the grid
    m = 16 * (count + 1) + 1
    for _ in range(6):
        phi = np.linspace(math.pi, 0.0, m + 1)
        grid = np.cos(phi)
        grid[0], grid[-1] = -1.0, 1.0
        vals = eval_jacobi(p, count, grid)
        change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if change.size == count:
            return grid[change], grid[change + 1], float(np.max(np.abs(vals)))
        m = 2 * m + 1
    raise RootConvergenceError(f"could not bracket {count} roots of J_{count}^({p.a},{p.b})")


def jacobi_norm_sq(p: JacobiParams, i: int) -> float:
    """Squared weighted norm of ``J_i^{(a,b)}``."""
    a, b = p.a, p.b
    if i == 0:
        return math.exp((a + b + 1) * math.log(2.0) + math.lgamma(a + 1) + math.lgamma(b + 1)
                        - math.lgamma(a + b + 2))
    return math.exp(
        (a + b + 1) * math.log(2.0) - math.log(2 * i + a + b + 1)
        + math.lgamma(i + a + 1) + math.lgamma(i + b + 1)
        - math.lgamma(i + a + b + 1) - math.lgamma(i + 1)
    )


def _graded_half(f_of_u, expo: float, order: int, levels: int = 60) -> float:
    """``int_0^1 f(u) u**expo du`` with dyadic panels graded toward ``u = 0``.

    The leftover ``[0, 2**-levels]`` is closed with the leading term
    ``f(0) eps**(expo+1)/(expo+1)``.
    """
    t, w = np.polynomial.legendre.leggauss(order)
    edges = 2.0 ** -np.arange(levels + 1, dtype=float)
    left, right = edges[1:], edges[:-1]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    u = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    ww = (half[:, None] * w[None, :]).ravel()
    body = float(np.sum(ww * f_of_u(u) * u ** expo))
    eps = edges[-1]
    tail = float(f_of_u(np.array([0.0]))[0]) * eps ** (expo + 1) / (expo + 1)
    return body + tail


def orthogonality_residual(p: JacobiParams, i: int, j: int, order: int = 30) -> float:
    """Weighted inner product ``int J_i J_j (1-x)^a (1+x)^b dx`` over ``[-1, 1]``.

    Each half of the interval is written in the distance to its endpoint so
    the algebraic singularity is integrated on graded panels.
    """
    if order < (i + j) // 2 + 1:
        raise ValueError("quadrature order too low for the requested degrees")

    def right(u):  # x = 1 - u on [0, 1]
        x = 1.0 - u
        return eval_jacobi(p, i, x) * eval_jacobi(p, j, x) * (2.0 - u) ** p.b

    def left(u):  # x = -1 + u on [0, 1]
        x = u - 1.0
        return eval_jacobi(p, i, x) * eval_jacobi(p, j, x) * (2.0 - u) ** p.a

    return _graded_half(right, p.a, order) + _graded_half(left, p.b, order)
