"""Solving the rounded reachability game and recovering approximate ERisk.

The pipeline behind `approximate_erisk` splits the error budget evenly:
half goes to rounding the per-state discount factors (relative perturbation
window b^(+-gamma*eps/2 / (2N))), half to the final certified evaluation of
-(1/gamma) * log_b of the solved utility.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from . import _solver
from ._solver import FRACTION_OPS, ResourceLimitError, System
from .core import Game, GameValidationError, Owner, RiskParams, Strategy
from .enclose import ln_enclosure
from .qualitative import BoundarySets, analyze
from .reduction import (
    PrecisionPlan,
    ReachGame,
    build_rounded_game,
    compute_precision_bits,
)

__all__ = [
    "ValueVector",
    "ERiskEnclosure",
    "ApproxResult",
    "ResourceLimitError",
    "solve_values",
    "utility_to_erisk",
    "approximate_erisk",
]


@dataclass(frozen=True)
class ValueVector:
    """Per-state utilities of the (rounded) game plus witnessing MD strategies."""

    values: tuple[Fraction, ...]
    strategy_max: Strategy
    strategy_min: Strategy

    def at(self, s: int) -> Fraction:
        return self.values[s]


@dataclass(frozen=True)
class ERiskEnclosure:
    """Certified bracket of an entropic-risk value; lo/hi are None for +infinity."""

    lo: Fraction | None
    hi: Fraction | None

    @property
    def infinite(self) -> bool:
        return self.lo is None

    @property
    def width(self) -> Fraction:
        if self.infinite:
            return Fraction(0)
        return self.hi - self.lo

    def contains(self, x: Fraction) -> bool:
        return (not self.infinite) and self.lo <= x <= self.hi


@dataclass(frozen=True)
class ApproxResult:
    erisk: ERiskEnclosure
    utility: Fraction | None
    values: ValueVector | None
    bounds: BoundarySets
    plan: PrecisionPlan | None
    strategy_max: Strategy
    strategy_min: Strategy


def _anchored_strategy_action(game: Game, s: int, region: frozenset[int]) -> int:
    """Lowest action whose support stays inside `region` (exists by closure)."""
    for a in game.actions(s):
        if all(t in region for t, _ in game.successors(s, a)):
            return a
    return 0


def build_system(rg: ReachGame) -> System[Fraction]:
    """Bellman system of the rounded game in utility form (sink eliminated)."""
    if not rg.rounded:
        raise ValueError("solve_values needs a rounded reach game")
    g = rg.game
    anchor: dict[int, Fraction] = {}
    for s in rg.target:
        anchor[s] = Fraction(1)
    for s in rg.zero:
        anchor[s] = Fraction(0)
    rows = []
    for s in range(g.n_states):
        f = rg.factors[s]
        rows.append(
            tuple(
                tuple((t, f * p) for t, p in g.successors(s, a))
                for a in g.actions(s)
            )
        )
    leaky = tuple(rg.factors[s] < 1 for s in range(g.n_states))
    return System(
        n=g.n_states, owner=g.owner, rows=rows, anchor=anchor, leaky=leaky,
        ops=FRACTION_OPS,
    )


def _strategies_from_policy(
    game: Game, policy: dict[int, int], target: frozenset[int], zero: frozenset[int]
) -> tuple[Strategy, Strategy]:
    """Extend the solver's choices to boundary states.

    On S0 the minimizer keeps the play inside (any staying action is optimal);
    on Sinf the maximizer follows the attractor witness toward positive
    rewards, since merely staying could stall on a zero-reward cycle and
    forfeit the forced infinite reward.
    """
    buchi = sinf_witness_actions(game, zero)
    max_choice: dict[int, int] = {}
    min_choice: dict[int, int] = {}
    for s in range(game.n_states):
        if s in policy:
            a = policy[s]
        elif s in target:
            a = _anchored_strategy_action(game, s, target)
        elif s in zero:
            a = buchi.get(s, _anchored_strategy_action(game, s, zero))
        else:
            a = 0
        if game.owner[s] is Owner.MAX:
            max_choice[s] = a
        else:
            min_choice[s] = a
    return (
        Strategy(player=Owner.MAX, choice=max_choice),
        Strategy(player=Owner.MIN, choice=min_choice),
    )


def solve_values(rg: ReachGame) -> ValueVector:
    """Least-anchored exact solution of the rounded game with MD witnesses.

    Markov chains reduce to one exact linear solve; MDPs run policy iteration
    from the lowest-index policy; games run strategy iteration over MIN with
    the MDP solver inside. All arithmetic is rational.
    """
    system = build_system(rg)
    values, policy = _solver.solve(system)
    smax, smin = _strategies_from_policy(rg.game, policy, rg.target, rg.zero)
    return ValueVector(values=tuple(values), strategy_max=smax, strategy_min=smin)


def utility_to_erisk(
    u: Fraction, rp: RiskParams, tol: Fraction = Fraction(1, 10**9)
) -> ERiskEnclosure:
    """Certified enclosure of -(1/gamma) * log_b(u), width at most `tol`.

    u = 0 maps to +infinity; u = 1 to exactly 0. The logarithms are evaluated
    by interval arithmetic with outward rounding at increasing precision.
    """
    if u < 0 or u > 1:
        raise GameValidationError(f"utility {u} outside [0, 1]")
    if tol <= 0:
        raise GameValidationError("tolerance must be positive")
    if u == 0:
        return ERiskEnclosure(lo=None, hi=None)
    if u == 1:
        return ERiskEnclosure(lo=Fraction(0), hi=Fraction(0))
    bits = 32
    while True:
        num = ln_enclosure(u, bits)
        den = ln_enclosure(rp.b, bits)
        if den.lo > 0:
            ratio = (num / den).scale(Fraction(-1) / rp.gamma)
            if ratio.width <= tol:
                return ERiskEnclosure(lo=ratio.lo, hi=ratio.hi)
        bits *= 2


def approximate_erisk(g: Game, rp: RiskParams) -> ApproxResult:
    """ERisk* within an absolute error eps, with witnessing MD strategies.

    Returns +infinity immediately when S0 is empty (every state then forces
    infinite reward). Otherwise rounds with budget eps/2, solves exactly, and
    evaluates the logarithm to the remaining eps/2, so any point of the
    reported enclosure is within eps of the true optimum.
    """
    if rp.epsilon is None:
        raise GameValidationError("epsilon must be present for approximation")
    bounds, _stopping = analyze(g)
    if not bounds.s0:
        smax, smin = _strategies_from_policy(g, {}, bounds.s0, bounds.sinf)
        return ApproxResult(
            erisk=ERiskEnclosure(lo=None, hi=None),
            utility=Fraction(0),
            values=None,
            bounds=bounds,
            plan=None,
            strategy_max=smax,
            strategy_min=smin,
        )
    half = rp.epsilon / 2
    rp_half = replace(rp, epsilon=half)
    plan = compute_precision_bits(g, rp_half)
    rg = build_rounded_game(g, rp_half, plan, bounds)
    vv = solve_values(rg)
    u = vv.at(g.initial)
    if u == 0:
        return ApproxResult(
            erisk=ERiskEnclosure(lo=None, hi=None),
            utility=u, values=vv, bounds=bounds, plan=plan,
            strategy_max=vv.strategy_max, strategy_min=vv.strategy_min,
        )
    log_part = utility_to_erisk(u, rp, tol=half)
    lo = max(Fraction(0), log_part.lo - half)  # total reward is non-negative
    hi = log_part.hi + half
    return ApproxResult(
        erisk=ERiskEnclosure(lo=lo, hi=hi),
        utility=u, values=vv, bounds=bounds, plan=plan,
        strategy_max=vv.strategy_max, strategy_min=vv.strategy_min,
    )
