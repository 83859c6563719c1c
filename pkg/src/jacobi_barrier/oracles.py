"""Independent price references and single-barrier helpers.

The Monte Carlo pricer samples log-prices exactly at monitoring dates and
applies the same knock-out convention as the operator recursion: the
corridor ``[L, U]`` is checked at ``t_1 .. t_{M-1}`` and the terminal payoff
``S_T - E`` is paid only when ``max(E, L) <= S_T <= U``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr, ndtri

from .jacobi import CHEBYSHEV, JacobiParams
from .operator import PriceResult, price
from .quad import QuadConfig
from .transform import InvalidContract, OptionContract

# -zeta(1/2) / sqrt(2 pi)
CORRECTION_BETA = 0.5826

BLOCK_PATHS = 1 << 16


@dataclass(frozen=True)
class McConfig:
    paths: int = 1_000_000
    seed: int = 20240607
    antithetic: bool = True

    def __post_init__(self) -> None:
        if self.paths < 1:
            raise ValueError("need at least one path")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class McEstimate:
    price: float
    stderr: float
    paths: int


def bs_vanilla_call(spot: float, strike: float, rate: float, vol: float, expiry: float) -> float:
    """Black-Scholes European call."""
    if not (vol > 0 and expiry > 0):
        raise ValueError("need vol > 0 and expiry > 0")
    if strike <= 0:
        return spot - strike * math.exp(-rate * expiry)
    sd = vol * math.sqrt(expiry)
    d1 = (math.log(spot / strike) + (rate + 0.5 * vol * vol) * expiry) / sd
    d2 = d1 - sd
    return float(spot * ndtr(d1) - strike * math.exp(-rate * expiry) * ndtr(d2))


def _normals(seed: int, block: int, shape: tuple[int, int]) -> np.ndarray:
    # Philox is counter based: (seed, block) names an independent, reproducible stream
    gen = np.random.Generator(np.random.Philox(key=(seed << 64) | block))
    u = (gen.integers(0, 1 << 53, size=shape, dtype=np.int64) + 0.5) * 2.0 ** -53
    return ndtri(u)


def _discounted_payoffs(c: OptionContract, z: np.ndarray) -> np.ndarray:
    """Payoffs for normal increments ``z`` of shape (dates, paths)."""
    tau = c.interval
    steps = (c.rate - 0.5 * c.vol ** 2) * tau + c.vol * math.sqrt(tau) * z
    logs = math.log(c.spot) + np.cumsum(steps, axis=0)
    lo, hi = math.log(c.lower), math.log(c.upper) if math.isfinite(c.upper) else math.inf
    alive = np.all((logs[:-1] >= lo) & (logs[:-1] <= hi), axis=0)
    last = logs[-1]
    floor = math.log(max(c.strike, c.lower))
    paid = alive & (last >= floor) & (last <= hi)
    return np.where(paid, np.exp(last) - c.strike, 0.0) * math.exp(-c.rate * c.expiry)


def mc_price(contract: OptionContract, cfg: McConfig = McConfig()) -> McEstimate:
    """Monte Carlo price with exact log-normal steps between monitoring dates.

    Paths are drawn in fixed-size blocks, each from its own counter-based
    stream, so the estimate depends only on ``(paths, seed, antithetic)``.
    With antithetics the standard error is taken over pair averages.
    """
    per_sample = 2 if cfg.antithetic else 1
    samples = -(-cfg.paths // per_sample)
    block = BLOCK_PATHS // per_sample
    total = 0.0
    total_sq = 0.0
    done = 0
    b = 0
    while done < samples:
        m = min(block, samples - done)
        z = _normals(cfg.seed, b, (contract.dates, m))
        y = _discounted_payoffs(contract, z)
        if cfg.antithetic:
            y = 0.5 * (y + _discounted_payoffs(contract, -z))
        total += float(np.sum(y))
        total_sq += float(np.dot(y, y))
        done += m
        b += 1
    mean = total / samples
    if samples > 1:
        var = max(total_sq - samples * mean * mean, 0.0) / (samples - 1)
        se = math.sqrt(var / samples)
    else:
        se = math.inf
    return McEstimate(price=mean, stderr=se, paths=samples * per_sample)


def single_barrier_price(contract: OptionContract, nodes: int = 50, params: JacobiParams = CHEBYSHEV,
                         cfg: QuadConfig | None = None, upper_factor: float = 2.5) -> PriceResult:
    """Down-and-out call priced as a double barrier with ``U = upper_factor * E``.

    Any upper barrier already on ``contract`` is replaced.
    """
    upper = upper_factor * contract.strike
    if not upper > contract.spot:
        raise InvalidContract(f"synthetic upper barrier {upper} must exceed the spot {contract.spot}")
    return price(replace(contract, upper=upper), nodes, params, cfg)


def continuity_correction(lower: float, vol: float, dt: float) -> float:
    """Discrete barrier equivalent to a continuously monitored down barrier."""
    if not (lower > 0 and vol > 0 and dt > 0):
        raise ValueError("need lower > 0, vol > 0 and dt > 0")
    return lower * math.exp(CORRECTION_BETA * vol * math.sqrt(dt))


def continuous_down_out_price(contract: OptionContract, nodes: int = 50, params: JacobiParams = CHEBYSHEV,
                              cfg: QuadConfig | None = None, upper_factor: float = 2.5) -> PriceResult:
    """Continuously monitored down-and-out call via the shifted discrete barrier.

    ``contract.dates`` sets the discrete grid used for the approximation.
    Raises :class:`InvalidContract` if the shifted barrier passes the spot.
    """
    shifted = continuity_correction(contract.lower, contract.vol, contract.interval)
    if shifted > contract.spot:
        raise InvalidContract(f"shifted barrier {shifted:.6g} lies above the spot {contract.spot}")
    adj = OptionContract(spot=contract.spot, strike=contract.strike, lower=shifted, rate=contract.rate,
                         vol=contract.vol, expiry=contract.expiry, dates=contract.dates)
    return single_barrier_price(adj, nodes, params, cfg, upper_factor)
