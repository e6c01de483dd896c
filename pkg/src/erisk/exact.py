"""Exact solution and threshold decisions for small algebraic instances.

With gamma = p/q and integer rewards, every coefficient b^(-gamma*r(s)) lives
in the radical extension Q(b^(1/q)), so the anchored fixpoint system can be
solved by Gaussian elimination over the extension: exactly for Markov chains,
via exact policy iteration for MDPs, and via strategy iteration (or, as a
guaranteed fallback, full MD-profile enumeration) for games. When every
exponent gamma*r(s) is an integer, everything stays rational and no extension
is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _solver
from ._solver import FRACTION_OPS, FieldOps, ResourceLimitError, System
from .algebra import AlgebraicRep, Extension, embed, invert, root_power, sign_of
from .core import Game, GameValidationError, RiskParams, Strategy
from .enclose import Interval, ln_enclosure, rational_power
from .numeric import ERiskEnclosure, _strategies_from_policy, utility_to_erisk
from .qualitative import BoundarySets, analyze
from .reduction import exact_factor

__all__ = [
    "ExactSolution",
    "ThresholdResult",
    "ResourceLimitError",
    "solve_mc_exact",
    "optimize_exact",
    "decide_threshold",
]


@dataclass(frozen=True)
class ExactSolution:
    """Exact per-state utilities in Q(b^(1/q)) plus witnessing MD strategies."""

    extension: Extension
    values: tuple[AlgebraicRep, ...]
    strategy_max: Strategy
    strategy_min: Strategy
    initial: int

    @property
    def value(self) -> AlgebraicRep:
        return self.values[self.initial]

    def utility_enclosure(self, bits: int = 64) -> Interval:
        return self.value.enclosure(bits)

    def erisk_enclosure(
        self, rp: RiskParams, tol: Fraction = Fraction(1, 10**9)
    ) -> ERiskEnclosure:
        """Certified ERisk bracket; exact rational utilities take the direct route."""
        v = self.value
        if v.is_rational():
            return utility_to_erisk(v.rational_value(), rp, tol=tol)
        if sign_of(v) <= 0:
            return ERiskEnclosure(lo=None, hi=None)
        bits = 32
        while True:
            iv = v.enclosure(bits)
            if iv.lo > 0:
                lo_part = utility_to_erisk(min(iv.hi, Fraction(1)), rp, tol=tol / 4)
                hi_part = utility_to_erisk(iv.lo, rp, tol=tol / 4)
                enc = ERiskEnclosure(lo=lo_part.lo, hi=hi_part.hi)
                if enc.hi - enc.lo <= tol:
                    return enc
            bits *= 2


@dataclass(frozen=True)
class ThresholdResult:
    satisfied: bool
    solution: ExactSolution | None  # None when S0 is empty (value +infinity)
    bounds: BoundarySets


def _field_for(g: Game, rp: RiskParams) -> tuple[Extension, FieldOps, bool]:
    """Pick the working field: plain rationals when all factors are rational."""
    gamma = rp.gamma_eff
    q = gamma.denominator
    ext = Extension(rp.b, q)
    rational = all(
        exact_factor(rp.b, gamma.numerator * r, q) is not None for r in g.rewards
    )
    if rational:
        return ext, FRACTION_OPS, True
    ops = FieldOps(
        zero=ext.zero(),
        one=ext.one(),
        from_fraction=ext.from_rational,
        is_zero=lambda v: v.is_zero(),
        invert=invert,
    )
    return ext, ops, False


def _build_system(
    g: Game, rp: RiskParams, bounds: BoundarySets
) -> tuple[System, Extension, bool]:
    ext, ops, rational = _field_for(g, rp)
    gamma = rp.gamma_eff
    q = gamma.denominator
    anchor = {}
    for s in bounds.s0:
        anchor[s] = ops.one
    for s in bounds.sinf:
        anchor[s] = ops.zero
    rows = []
    for s in range(g.n_states):
        n_s = gamma.numerator * g.rewards[s]
        if rational:
            f = exact_factor(rp.b, n_s, q)
            rows.append(
                tuple(
                    tuple((t, f * p) for t, p in g.successors(s, a))
                    for a in g.actions(s)
                )
            )
        else:
            rows.append(
                tuple(
                    tuple((t, root_power(ext, -n_s, p)) for t, p in g.successors(s, a))
                    for a in g.actions(s)
                )
            )
    leaky = tuple(r > 0 for r in g.rewards)
    system = System(
        n=g.n_states, owner=g.owner, rows=rows, anchor=anchor, leaky=leaky, ops=ops
    )
    return system, ext, rational


def _wrap_values(ext: Extension, values, rational: bool) -> tuple[AlgebraicRep, ...]:
    if rational:
        return tuple(ext.from_rational(v) for v in values)
    return tuple(values)


def _verify_residuals(system: System, values, policy: dict[int, int]) -> None:
    """Back-substitution check: the residual must be the exact zero vector."""
    for s, a in policy.items():
        residual = values[s] - _solver.q_value(system, values, s, a)
        if not system.ops.is_zero(residual):
            raise AssertionError(f"nonzero residual at state {s}")


def solve_mc_exact(
    m: Game, rp: RiskParams, bounds: BoundarySets
) -> tuple[AlgebraicRep, ...]:
    """Exact utilities of a Markov chain over the normalized extension.

    The anchored linear system is solved by Gaussian elimination with
    coefficients represented over the basis (1, beta, ..., beta^(q'-1)) and
    verified by exact back-substitution.
    """
    if not m.is_mc():
        raise GameValidationError("solve_mc_exact expects singleton action sets")
    system, ext, rational = _build_system(m, rp, bounds)
    policy = {s: 0 for s in system.free_states()}
    values = _solver.evaluate_policy(system, policy)
    _verify_residuals(system, values, policy)
    return _wrap_values(ext, values, rational)


def optimize_exact(
    g: Game, rp: RiskParams, bounds: BoundarySets, method: str = "auto"
) -> ExactSolution:
    """Exact optimal utilities and MD strategies for an MDP or game.

    `method` is "auto" (policy/strategy iteration) or "enumerate" (exhaustive
    MD-profile search, exponential but unconditional).
    """
    system, ext, rational = _build_system(g, rp, bounds)
    if method == "enumerate":
        values, policy = _solver.solve_enumerate(system)
    elif method == "auto":
        values, policy = _solver.solve(system)
    else:
        raise ValueError(f"unknown method {method!r}")
    smax, smin = _strategies_from_policy(g, policy, bounds.s0, bounds.sinf)
    return ExactSolution(
        extension=ext,
        values=_wrap_values(ext, values, rational),
        strategy_max=smax,
        strategy_min=smin,
        initial=g.initial,
    )


_COMPOSITE_DEGREE_LIMIT = 512


def _log_compare_rational_to_power(u: Fraction, b: Fraction, expo: Fraction) -> int:
    """Sign of u - b**expo for u > 0, assuming they differ: by ln enclosures."""
    bits = 32
    while True:
        lhs = ln_enclosure(u, bits)
        rhs = ln_enclosure(b, bits).scale(expo)
        if lhs.lo > rhs.hi:
            return 1
        if lhs.hi < rhs.lo:
            return -1
        bits *= 2
        if bits > 1 << 20:
            raise ResourceLimitError("threshold comparison exceeded precision guard")


def decide_threshold(g: Game, rp: RiskParams) -> ThresholdResult:
    """Decide ERisk* >= t by the exact utility bridge U* <= b^(-gamma*t).

    When the threshold value b^(-gamma*t) is rational the comparison is exact
    rational arithmetic (or a sign test in U*'s own extension). Otherwise a
    rational U* is strictly separated by logarithm enclosures, and an
    irrational U* is compared by an exact sign test in the composite extension
    of degree lcm(q, den(gamma*t)) while that degree stays tractable.
    """
    if rp.threshold is None:
        raise GameValidationError("threshold t is missing")
    bounds, _ = analyze(g)
    if not bounds.s0:
        return ThresholdResult(satisfied=True, solution=None, bounds=bounds)
    sol = optimize_exact(g, rp, bounds)
    expo = -rp.gamma * rp.threshold
    thr_rational = rational_power(rp.b, expo)
    u = sol.value
    if u.is_rational():
        uq = u.rational_value()
        if thr_rational is not None:
            sat = uq <= thr_rational
        elif uq == 0:
            sat = True
        else:
            sat = _log_compare_rational_to_power(uq, rp.b, expo) <= 0
        return ThresholdResult(satisfied=sat, solution=sol, bounds=bounds)
    if thr_rational is not None:
        diff = sol.extension.from_rational(thr_rational) - u
        return ThresholdResult(satisfied=sign_of(diff) >= 0, solution=sol, bounds=bounds)
    q_eff = rp.gamma_eff.denominator
    den = expo.denominator
    lcm = q_eff * den // math.gcd(q_eff, den)
    if lcm <= _COMPOSITE_DEGREE_LIMIT:
        common = Extension(rp.b, lcm)
        u_common = embed(u, common)
        thr = root_power(common, expo.numerator * (lcm // den))
        return ThresholdResult(
            satisfied=sign_of(thr - u_common) >= 0, solution=sol, bounds=bounds
        )
    # both sides irrational and the composite field is impractically large:
    # separate by enclosures, which fails only on exact equality
    bits = 32
    while bits <= 1 << 20:
        u_iv = u.enclosure(bits)
        t_ln = ln_enclosure(rp.b, bits).scale(expo)
        if u_iv.lo > 0:
            u_ln = Interval(
                ln_enclosure(u_iv.lo, bits).lo, ln_enclosure(u_iv.hi, bits).hi
            )
            if u_ln.hi < t_ln.lo:
                return ThresholdResult(satisfied=True, solution=sol, bounds=bounds)
            if u_ln.lo > t_ln.hi:
                return ThresholdResult(satisfied=False, solution=sol, bounds=bounds)
        bits *= 2
    raise ResourceLimitError(
        "threshold comparison needs a composite extension of degree "
        f"{lcm}; the values appear equal beyond the precision guard"
    )
