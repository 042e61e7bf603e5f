"""Shortfall-risk hedging of game options under transaction costs."""

from ._core import (
    Config,
    ConfigError,
    ContractViolation,
    SizeError,
    Solution,
    convergence,
    oracle_risk,
    solve,
    up_prob,
)

__all__ = [
    "Config",
    "ConfigError",
    "ContractViolation",
    "SizeError",
    "Solution",
    "convergence",
    "oracle_risk",
    "solve",
    "up_prob",
]
