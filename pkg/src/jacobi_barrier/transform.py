"""Contract data and the log-price heat-equation change of variables.

A double-barrier knock-out call under Black-Scholes is mapped to the heat
equation ``g_t = c^2 g_zz`` on ``z = ln(S/L)`` by writing the price as
``P = exp(alpha*z + beta*t) * g`` with ``t`` the time to expiry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InvalidContract(ValueError):
    """Raised when contract or problem parameters violate an invariant."""


@dataclass(frozen=True, kw_only=True)
class OptionContract:
    """Discretely monitored double-barrier knock-out call.

    ``upper`` may be ``math.inf`` for a down-and-out contract; such a contract
    must go through :func:`jacobi_barrier.oracles.single_barrier_price`, which
    substitutes a far upper barrier.
    """

    spot: float
    strike: float
    lower: float
    upper: float = math.inf
    rate: float
    vol: float
    expiry: float
    dates: int

    def __post_init__(self) -> None:
        problems = contract_violations(self)
        if problems:
            raise InvalidContract("; ".join(problems))

    @property
    def interval(self) -> float:
        """Monitoring interval T/M."""
        return self.expiry / self.dates


def contract_violations(c: OptionContract) -> list[str]:
    out = []
    vals = dict(spot=c.spot, strike=c.strike, lower=c.lower, upper=c.upper,
                rate=c.rate, vol=c.vol, expiry=c.expiry)
    for name, v in vals.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)) or math.isnan(v):
            out.append(f"{name} must be a real number, got {v!r}")
    if out:
        return out
    if not c.lower > 0:
        out.append(f"lower barrier must be positive (L={c.lower})")
    if not c.lower < c.upper:
        out.append(f"need L < U (L={c.lower}, U={c.upper})")
    if not c.lower <= c.spot <= c.upper:
        out.append(f"spot must lie in [L, U] (S0={c.spot}, L={c.lower}, U={c.upper})")
    if not c.strike >= 0:
        out.append(f"strike must be non-negative (E={c.strike})")
    if not c.vol > 0:
        out.append(f"volatility must be positive (sigma={c.vol})")
    if not c.expiry > 0:
        out.append(f"expiry must be positive (T={c.expiry})")
    if isinstance(c.dates, bool) or not isinstance(c.dates, (int, np.integer)) or c.dates < 1:
        out.append(f"monitoring count must be an integer >= 1 (M={c.dates})")
    for name in ("rate", "spot", "strike", "expiry", "vol", "lower"):
        if not math.isfinite(vals[name]):
            out.append(f"{name} must be finite")
    return out


@dataclass(frozen=True)
class HeatProblem:
    """Heat-equation form of a contract on the log corridor ``[0, theta]``."""

    theta: float
    log_strike: float
    delta: float
    drift: float
    alpha: float
    beta: float
    c2: float
    tau: float
    z0: float
    lower: float

    @property
    def c(self) -> float:
        return math.sqrt(self.c2)


def to_heat(contract: OptionContract) -> HeatProblem:
    """Map a contract onto the heat problem.

    Substituting ``P = exp(alpha z + beta t) g`` into the log-price pricing
    equation removes the first- and zeroth-order terms exactly when
    ``alpha = -mu/sigma^2`` and ``beta = -(r + mu^2 / (2 sigma^2))``, leaving
    ``g_t = (sigma^2/2) g_zz``.
    """
    if not math.isfinite(contract.upper):
        raise InvalidContract("double-barrier pricing needs a finite upper barrier")
    problems = contract_violations(contract)
    if problems:
        raise InvalidContract("; ".join(problems))

    s2 = contract.vol ** 2
    mu = contract.rate - 0.5 * s2
    log_strike = math.log(contract.strike / contract.lower) if contract.strike > 0 else -math.inf
    theta = math.log(contract.upper / contract.lower)
    z0 = math.log(contract.spot / contract.lower)
    return HeatProblem(
        theta=theta,
        log_strike=log_strike,
        delta=max(log_strike, 0.0),
        drift=mu,
        alpha=-mu / s2,
        beta=-(contract.rate + mu * mu / (2.0 * s2)),
        c2=0.5 * s2,
        tau=contract.expiry / contract.dates,
        # rounding in the log can push a boundary spot a hair outside [0, theta]
        z0=min(max(z0, 0.0), theta),
        lower=float(contract.lower),
    )


def payoff_g0(z, hp: HeatProblem):
    """Transformed terminal payoff ``L e^{-alpha z}(e^z - e^{E*})`` on ``[delta, theta]``."""
    z = np.asarray(z, dtype=float)
    inside = (z >= hp.delta) & (z <= hp.theta)
    zc = np.where(inside, z, hp.delta)
    val = hp.lower * np.exp(-hp.alpha * zc) * (np.exp(zc) - math.exp(hp.log_strike))
    out = np.where(inside, val, 0.0)
    return out[()] if out.ndim == 0 else out


def heat_kernel(z, t: float, c2: float):
    """Gaussian fundamental solution of ``g_t = c2 g_zz``."""
    if not t > 0:
        raise ValueError(f"heat kernel needs t > 0, got {t}")
    if not c2 > 0:
        raise ValueError(f"heat kernel needs c2 > 0, got {c2}")
    s = 4.0 * c2 * t
    z = np.asarray(z, dtype=float)
    out = np.exp(-z * z / s) / math.sqrt(math.pi * s)
    return out[()] if out.ndim == 0 else out


def assemble_price(g_at_z0: float, hp: HeatProblem, expiry: float) -> float:
    """Undo the exponential change of variables at the spot."""
    return math.exp(hp.alpha * hp.z0 + hp.beta * expiry) * g_at_z0
