"""Reachability reduction: per-state discount factors and their dyadic rounding.

Each state s carries the factor b^(-gamma*r(s)), stored symbolically as the
integer exponent n_s over q (gamma = p/q after reward scaling). The rounded
game replaces each irrational factor by a dyadic within a multiplicative
b^(+-z) window, z = gamma*eps/(2N), which by the structural-equivalence
perturbation bound keeps the reachability value within b^(+-gamma*eps) of the
ideal one. Original transition probabilities are never rounded, so every
rounded row still sums to exactly one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Game, GameValidationError, RiskParams
from .enclose import (
    Interval,
    ln_enclosure,
    log2_enclosure,
    pow_enclosure,
    rational_power,
    round_down,
)
from .qualitative import BoundarySets

__all__ = [
    "PrecisionPlan",
    "ReachGame",
    "SINK_ID",
    "compute_precision_bits",
    "build_reach_game",
    "build_rounded_game",
]

SINK_ID = "__sink__"


@dataclass(frozen=True)
class PrecisionPlan:
    """Dyadic precision for the rounded game per the denominator bit-size bound."""

    epsilon: Fraction
    z: Fraction  # relative window exponent gamma*eps/(2N)
    bits: int
    n_states: int  # N, including the sink
    p_min: Fraction
    r_min: int  # smallest nonzero scaled reward (0 when none)
    r_max: int


@dataclass(frozen=True)
class ReachGame:
    """The reachability game G_R, optionally with rounded dyadic factors.

    `exponents[s]` is n_s with factor b^(-n_s/q); `factors` holds the dyadic
    approximations (exact rationals where possible) or None for the purely
    symbolic G_R. Boundary states are absorbing; the sink is implicit in
    solving (value 0) and materialized only when dumping.
    """

    game: Game
    b: Fraction
    q: int
    exponents: tuple[int, ...]
    target: frozenset[int]  # S0: value 1
    zero: frozenset[int]  # Sinf: value 0, alongside the sink
    factors: tuple[Fraction, ...] | None = None
    plan: PrecisionPlan | None = None

    @property
    def rounded(self) -> bool:
        return self.factors is not None

    def anchored(self, s: int) -> bool:
        return s in self.target or s in self.zero

    def rounded_row(self, s: int, a: int) -> tuple[tuple[int, Fraction], ...]:
        """Transitions of G_approx incl. the sink (index n_states); rows sum to 1."""
        if self.factors is None:
            raise ValueError("reach game was built symbolically; no rounded rows")
        n = self.game.n_states
        if self.anchored(s):
            return ((s, Fraction(1)),)
        f = self.factors[s]
        row = [(t, f * p) for t, p in self.game.successors(s, a)]
        if f != 1:
            row.append((n, 1 - f))
        return tuple(row)

    def to_json(self, params: RiskParams) -> dict:
        """Dump G_approx in the standard game JSON schema for inspection."""
        g = self.game
        n = g.n_states
        states = [
            {"id": g.ids[s], "owner": g.owner[s].value, "reward": str(g.rewards[s])}
            for s in range(n)
        ]
        states.append({"id": SINK_ID, "owner": "max", "reward": "0"})
        transitions = []
        for s in range(n):
            acts = [0] if self.anchored(s) else list(g.actions(s))
            for a in acts:
                transitions.append(
                    {
                        "from": g.ids[s],
                        "action": g.action_labels[s][a],
                        "to": [
                            {"target": (g.ids[t] if t < n else SINK_ID), "prob": str(p)}
                            for t, p in self.rounded_row(s, a)
                        ],
                    }
                )
        transitions.append(
            {"from": SINK_ID, "action": "stay", "to": [{"target": SINK_ID, "prob": "1"}]}
        )
        doc = {
            "states": states,
            "transitions": transitions,
            "initial": g.ids[g.initial],
            "params": {"b": str(params.b), "gamma": str(params.gamma)},
        }
        return doc


def _exponent_data(game: Game, rp: RiskParams) -> tuple[int, tuple[int, ...]]:
    gamma = rp.gamma_eff
    return gamma.denominator, tuple(gamma.numerator * r for r in game.rewards)


def exact_factor(b: Fraction, n: int, q: int) -> Fraction | None:
    """b^(-n/q) as an exact rational, or None when irrational."""
    return rational_power(b, Fraction(-n, q))


def compute_precision_bits(g: Game, rp: RiskParams) -> PrecisionPlan:
    """Instantiate the denominator bit-size bound with outward rounding.

    The bound is
      -log2(p_min) - min(log2 b^(-g*rmax), log2(1 - b^(-g*rmin)))
      - log2(gamma) - log2(eps) + log2(N) - log2(ln b),
    evaluated as a certified interval; the returned bit count is the ceiling
    of its upper end (0 when every reward is zero, since all factors are 1).
    """
    if rp.epsilon is None or rp.epsilon <= 0:
        raise GameValidationError("epsilon must be present and positive")
    n_states = g.n_states + 1  # sink included
    probs = [
        p for s in range(g.n_states) for a in g.actions(s) for _, p in g.successors(s, a)
    ]
    p_min = min(probs)
    positive = [r for r in g.rewards if r > 0]
    z = rp.gamma * rp.epsilon / (2 * n_states)
    if not positive:
        return PrecisionPlan(
            epsilon=rp.epsilon, z=z, bits=0, n_states=n_states,
            p_min=p_min, r_min=0, r_max=0,
        )
    r_min, r_max = min(positive), max(positive)
    q, exps = _exponent_data(g, rp)
    e_min = Fraction(min(rp.gamma_eff.numerator * r for r in positive))
    e_max = Fraction(max(rp.gamma_eff.numerator * r for r in positive))

    bits = 48
    while True:
        log2_b = log2_enclosure(rp.b, bits)
        term_p = -log2_enclosure(p_min, bits).lo
        term_big = log2_b.scale(e_max / q).hi  # -log2 b^(-g*rmax) = g*rmax*log2 b
        one_minus = Interval.point(Fraction(1)) - pow_enclosure(
            rp.b, -e_min / q, bits * 2
        )
        if one_minus.lo <= 0:
            bits *= 2
            continue
        term_small = -log2_enclosure(one_minus.lo, bits).lo
        term_reward = max(term_big, term_small)
        term_gamma = -log2_enclosure(rp.gamma, bits).lo
        term_eps = -log2_enclosure(rp.epsilon, bits).lo
        term_n = log2_enclosure(Fraction(n_states), bits).hi
        ln_b = ln_enclosure(rp.b, bits)
        if ln_b.lo <= 0:
            bits *= 2
            continue
        term_lnb = -log2_enclosure(ln_b.lo, bits).lo
        upper = term_p + term_reward + term_gamma + term_eps + term_n + term_lnb
        n_bits = max(1, -int(-upper // 1))  # ceil
        return PrecisionPlan(
            epsilon=rp.epsilon, z=z, bits=n_bits, n_states=n_states,
            p_min=p_min, r_min=r_min, r_max=r_max,
        )


def build_reach_game(g: Game, rp: RiskParams, bounds: BoundarySets) -> ReachGame:
    """The symbolic G_R: exponents only, no rounding."""
    q, exps = _exponent_data(g, rp)
    return ReachGame(
        game=g, b=rp.b, q=q, exponents=exps,
        target=bounds.s0, zero=bounds.sinf,
    )


def _window_ok(
    f_hat: Fraction, b: Fraction, exp_num: int, exp_den: int, z: Fraction, bits: int
) -> bool:
    """Certify b^(-z) <= f/b^(-e) <= b^z and the same for (1-f)/(1-b^(-e)).

    Rephrased in logarithms so every enclosure takes a rational argument with a
    small denominator: |ln(f) + e*ln(b)| <= z*ln(b), and the analogue with
    ln(1-f) against an enclosure of ln(1 - b^(-e)); e = exp_num/exp_den.
    """
    e = Fraction(exp_num, exp_den)
    while True:
        ln_b = ln_enclosure(b, bits)
        z_ln = ln_b.scale(z)
        ideal = pow_enclosure(b, -e, bits)  # denominator exp_den stays small
        one_m_ideal = Interval.point(Fraction(1)) - ideal

        dev1 = ln_enclosure(f_hat, bits) + ln_b.scale(e)
        checks = [dev1]
        if one_m_ideal.lo > 0 and f_hat < 1:
            ln_one_m_ideal = Interval(
                ln_enclosure(one_m_ideal.lo, bits).lo,
                ln_enclosure(one_m_ideal.hi, bits).hi,
            )
            checks.append(ln_enclosure(1 - f_hat, bits) - ln_one_m_ideal)
        else:
            checks.append(None)  # undecided until the ideal encloses away from 1

        decided = True
        for dev in checks:
            if dev is None:
                decided = False
                continue
            if -z_ln.lo <= dev.lo and dev.hi <= z_ln.lo:
                continue  # certainly inside
            if dev.lo > z_ln.hi or dev.hi < -z_ln.hi:
                return False  # certainly outside
            decided = False
        if decided:
            return True
        bits *= 2
        if bits > 1 << 16:
            raise RuntimeError("window certification exceeded precision guard")


def build_rounded_game(
    g: Game, rp: RiskParams, plan: PrecisionPlan, bounds: BoundarySets
) -> ReachGame:
    """G_approx: dyadic factors certified inside the multiplicative window.

    Rational factors (integer-exponent fast path) are kept exactly; for the
    rest the enclosure midpoint is rounded to `plan.bits` bits and the window
    invariants are checked with interval arithmetic, doubling the bit count on
    failure (the window has positive width, so this terminates).
    """
    q, exps = _exponent_data(g, rp)
    factors: list[Fraction] = []
    for s in range(g.n_states):
        n_s = exps[s]
        if n_s == 0:
            factors.append(Fraction(1))
            continue
        exact = exact_factor(rp.b, n_s, q)
        if exact is not None:
            factors.append(exact)
            continue
        bits = max(plan.bits, 8)
        while True:
            iv = pow_enclosure(rp.b, Fraction(-n_s, q), bits + 4)
            mid = (iv.lo + iv.hi) / 2
            f_hat = round_down(mid, bits)
            f_hat = min(max(f_hat, Fraction(1, 1 << bits)), 1 - Fraction(1, 1 << bits))
            if _window_ok(f_hat, rp.b, n_s, q, plan.z, bits + 8):
                factors.append(f_hat)
                break
            bits *= 2
            if bits > 1 << 16:
                raise RuntimeError("factor rounding exceeded precision guard")
    return ReachGame(
        game=g, b=rp.b, q=q, exponents=exps,
        target=bounds.s0, zero=bounds.sinf,
        factors=tuple(factors), plan=plan,
    )
