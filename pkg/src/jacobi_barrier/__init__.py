"""Discretely monitored barrier options by Lagrange interpolation on Jacobi nodes."""

from .jacobi import CHEBYSHEV, JacobiParams, RootConvergenceError
from .operator import PriceResult, max_error_study, price, price_curve
from .oracles import (
    McConfig,
    McEstimate,
    bs_vanilla_call,
    continuity_correction,
    continuous_down_out_price,
    mc_price,
    single_barrier_price,
)
from .quad import QuadConfig
from .transform import HeatProblem, InvalidContract, OptionContract, to_heat

__all__ = [
    "CHEBYSHEV", "HeatProblem", "InvalidContract", "JacobiParams", "McConfig", "McEstimate",
    "OptionContract", "PriceResult", "QuadConfig", "RootConvergenceError", "bs_vanilla_call",
    "continuity_correction", "continuous_down_out_price", "max_error_study", "mc_price", "price",
    "price_curve", "single_barrier_price", "to_heat",
]
