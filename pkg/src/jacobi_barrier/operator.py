"""Operational-matrix pricing of discretely monitored double-barrier calls.

Between monitoring dates the transformed price solves the heat equation, so
each date is one convolution with the heat kernel truncated to the corridor.
Projecting onto Lagrange cardinals at Jacobi nodes turns that convolution
into a fixed matrix ``K``; ``M`` dates then cost ``M - 1`` mat-vec products.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .jacobi import CHEBYSHEV, JacobiParams
from .lagrange import NodeGrid, build_grid, interpolate
from .quad import QuadConfig, gaussian_exp_moment, kernel_basis_row
from .transform import HeatProblem, InvalidContract, OptionContract, to_heat


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    values: np.ndarray
    grid: NodeGrid
    tau: float
    c2: float


@dataclass(frozen=True, eq=False)
class InitialVector:
    values: np.ndarray
    grid: NodeGrid
    problem: HeatProblem


@dataclass
class PriceResult:
    price: float
    nodes: int
    dates: int
    params: JacobiParams
    z0: float
    theta: float
    timings: dict[str, float] = field(default_factory=dict)
    upper: float | None = None

    @property
    def degree(self) -> int:
        return self.nodes - 1


def build_matrix(grid: NodeGrid, hp: HeatProblem, cfg: QuadConfig | None = None) -> TransitionMatrix:
    if not hp.tau > 0:
        raise ValueError("monitoring interval must be positive")
    cfg = cfg or QuadConfig()
    K = np.empty((grid.size, grid.size))
    for i in range(grid.size):
        K[i] = kernel_basis_row(grid, i, hp.tau, hp.c2, cfg)
    K.setflags(write=False)
    return TransitionMatrix(values=K, grid=grid, tau=hp.tau, c2=hp.c2)


def build_initial_vector(grid: NodeGrid, hp: HeatProblem) -> InitialVector:
    """Node values of the first convolution of the transformed payoff."""
    if hp.delta >= hp.theta:
        g1 = np.zeros(grid.size)
    else:
        up = gaussian_exp_moment(grid.nodes, 1.0 - hp.alpha, hp.delta, hp.theta, hp.tau, hp.c2)
        down = gaussian_exp_moment(grid.nodes, -hp.alpha, hp.delta, hp.theta, hp.tau, hp.c2)
        g1 = hp.lower * (up - math.exp(hp.log_strike) * down)
        # integrand is non-negative; only rounding in the difference can go below zero
        g1 = np.maximum(g1, 0.0)
    g1.setflags(write=False)
    return InitialVector(values=g1, grid=grid, problem=hp)


def propagate(K: TransitionMatrix, g1: InitialVector, dates: int) -> np.ndarray:
    """``K^(dates-1) g1`` by repeated mat-vec products."""
    if dates < 1:
        raise ValueError("need at least one monitoring date")
    Kv = K.values
    v = np.asarray(g1.values, dtype=float)
    if Kv.shape != (v.size, v.size):
        raise ValueError(f"dimension mismatch: K is {Kv.shape}, G1 has {v.size} entries")
    v = v.copy()
    for _ in range(dates - 1):
        v = Kv @ v
    return v


def _degree(nodes: int) -> int:
    if nodes < 1:
        raise ValueError("need at least one interpolation node")
    return nodes - 1


def price(contract: OptionContract, nodes: int = 25, params: JacobiParams = CHEBYSHEV,
          cfg: QuadConfig | None = None) -> PriceResult:
    """Price a double-barrier knock-out call with ``nodes`` interpolation points."""
    return price_curve(contract, [contract.spot], nodes, params, cfg)[0]


def price_curve(contract: OptionContract, spots: Iterable[float], nodes: int = 25,
                params: JacobiParams = CHEBYSHEV, cfg: QuadConfig | None = None) -> list[PriceResult]:
    """Prices at several spots sharing one matrix and one propagated vector."""
    spots = [float(s) for s in spots]
    bad = [s for s in spots if not contract.lower <= s <= contract.upper]
    if bad:
        raise InvalidContract(f"spots outside [L, U] = [{contract.lower}, {contract.upper}]: {bad}")
    hp = to_heat(contract)
    n = _degree(nodes)

    t0 = time.perf_counter()
    grid = build_grid(params, n, hp.theta)
    t1 = time.perf_counter()
    K = build_matrix(grid, hp, cfg)
    t2 = time.perf_counter()
    g1 = build_initial_vector(grid, hp)
    t3 = time.perf_counter()
    gM = propagate(K, g1, contract.dates)
    t4 = time.perf_counter()

    out = []
    for s in spots:
        t5 = time.perf_counter()
        sp = to_heat(replace(contract, spot=s))
        g = interpolate(grid, gM, sp.z0)
        value = math.exp(sp.alpha * sp.z0 + sp.beta * contract.expiry) * g
        t6 = time.perf_counter()
        out.append(PriceResult(
            price=value, nodes=nodes, dates=contract.dates, params=params, z0=sp.z0,
            theta=hp.theta, upper=contract.upper,
            timings={"grid": t1 - t0, "matrix": t2 - t1, "initial": t3 - t2,
                     "propagate": t4 - t3, "evaluate": t6 - t5},
        ))
    return out


def max_error_study(contract: OptionContract, nodes: int, params: JacobiParams,
                    spots: Sequence[float],
                    reference: Callable[[Sequence[float]], Sequence[float]] | None = None,
                    cfg: QuadConfig | None = None) -> float:
    """Max absolute price error over ``spots`` against a reference pricer.

    The default reference is this method with 100 Chebyshev-type nodes.
    """
    if reference is None:
        def reference(xs):
            return [r.price for r in price_curve(contract, xs, 100, CHEBYSHEV, cfg)]
    got = np.array([r.price for r in price_curve(contract, spots, nodes, params, cfg)])
    ref = np.asarray(reference(spots), dtype=float)
    return float(np.max(np.abs(got - ref)))


def spot_grid(contract: OptionContract, points: int = 50) -> np.ndarray:
    return np.linspace(contract.lower, contract.upper, points)
