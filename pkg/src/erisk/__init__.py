"""Entropic-risk solver for stochastic games with the total-reward objective.

Computes and decides the entropic risk -(1/gamma) * log_b E[b^(-gamma*X)] of
the total reward X in Markov chains, MDPs, and turn-based stochastic games:
exactly on small algebraic instances via arithmetic in Q(b^(1/q)), and to any
absolute error via a quantified rounding of the reachability reduction.
"""

from .core import (
    Game,
    GameValidationError,
    Owner,
    RiskParams,
    Strategy,
    load_game,
    parse_fraction,
    validate_game,
)
from ._solver import ResourceLimitError
from .qualitative import BoundarySets, analyze, check_stopping, compute_S0, compute_Sinf
from .reduction import PrecisionPlan, ReachGame, build_rounded_game, compute_precision_bits
from .numeric import ApproxResult, ERiskEnclosure, ValueVector, approximate_erisk, solve_values, utility_to_erisk
from .algebra import AlgebraicRep, Extension, normalize_extension
from .exact import ExactSolution, ThresholdResult, decide_threshold, optimize_exact, solve_mc_exact
from .encode import emit_inequalities
from .sim import SimResult, estimate_utility

__version__ = "0.1.0"

__all__ = [
    "Game",
    "GameValidationError",
    "Owner",
    "RiskParams",
    "Strategy",
    "load_game",
    "parse_fraction",
    "validate_game",
    "ResourceLimitError",
    "BoundarySets",
    "analyze",
    "check_stopping",
    "compute_S0",
    "compute_Sinf",
    "PrecisionPlan",
    "ReachGame",
    "build_rounded_game",
    "compute_precision_bits",
    "ApproxResult",
    "ERiskEnclosure",
    "ValueVector",
    "approximate_erisk",
    "solve_values",
    "utility_to_erisk",
    "AlgebraicRep",
    "Extension",
    "normalize_extension",
    "ExactSolution",
    "ThresholdResult",
    "decide_threshold",
    "optimize_exact",
    "solve_mc_exact",
    "emit_inequalities",
    "SimResult",
    "estimate_utility",
    "__version__",
]
