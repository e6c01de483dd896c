"""Monte Carlo cross-validation of the utility of a fixed strategy profile.

Trajectories track the integer total reward; a path's multiplicative weight
b^(-gamma*R) is only evaluated (as a certified enclosure) during aggregation,
so sampling itself is exact integer arithmetic on a seeded generator.
Boundary sets are treated as absorbing: entering S0 finalizes the current
weight, entering Sinf contributes zero, and a weight fallen below the floor
(or a trajectory outliving the horizon) contributes a certified bracket
instead of a point value.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .core import Game, GameValidationError, RiskParams, Strategy
from .enclose import Interval, iroot_floor, ln_enclosure, pow_enclosure
from .qualitative import BoundarySets, analyze

__all__ = ["SimResult", "estimate_utility", "DEFAULT_FLOOR_BITS"]

DEFAULT_FLOOR_BITS = 64  # weight floor 2^-64


@dataclass(frozen=True)
class SimResult:
    """Mean-utility estimate with its certified bracket and confidence interval."""

    samples: int
    estimate_lo: Fraction  # bracket from floored/horizon trajectories
    estimate_hi: Fraction
    ci_lo: Fraction  # two-sided Hoeffding interval at the given confidence
    ci_hi: Fraction
    confidence: Fraction
    floored: int

    @property
    def estimate(self) -> Fraction:
        return (self.estimate_lo + self.estimate_hi) / 2

    def covers(self, value: Fraction) -> bool:
        return self.ci_lo <= value <= self.ci_hi


def _profile_action(game: Game, profile: tuple[Strategy, Strategy], s: int) -> int:
    smax, smin = profile
    choice = smax.choice if game.owner[s] is smax.player else smin.choice
    return choice[s]


def _reward_floor(rp: RiskParams, floor_bits: int) -> int:
    """Smallest R guaranteed to have b^(-gamma_eff * R) <= 2^-floor_bits."""
    bits = 32
    while True:
        log2b = (ln_enclosure(rp.b, bits) / ln_enclosure(Fraction(2), bits)).lo
        if log2b > 0:
            bound = Fraction(floor_bits) / (rp.gamma_eff * log2b)
            return int(bound) + 1
        bits *= 2


def _run_batch(
    game: Game,
    action_of: list[int],
    bounds: BoundarySets,
    samples: int,
    seed: int,
    horizon: int,
    r_floor: int,
) -> tuple[dict[int, int], dict[int, int], int, int]:
    """Simulate `samples` trajectories.

    Returns finalized reward counts, open (horizon-terminated) reward counts,
    the number of zero-weight (Sinf) trajectories, and the floor count.
    """
    rng = random.Random(seed)
    dists = []
    for s in range(game.n_states):
        row = game.successors(s, action_of[s])
        den = 1
        for _, p in row:
            den = den * p.denominator // math.gcd(den, p.denominator)
        acc = 0
        cdf = []
        for t, p in row:
            acc += int(p * den)
            cdf.append((acc, t))
        dists.append((den, cdf))
    counts: dict[int, int] = {}
    open_counts: dict[int, int] = {}
    zeros = 0
    floored = 0
    for _ in range(samples):
        s = game.initial
        total = 0
        steps = 0
        while True:
            if s in bounds.s0:
                counts[total] = counts.get(total, 0) + 1
                break
            if s in bounds.sinf:
                zeros += 1
                break
            total += game.rewards[s]
            if total >= r_floor:
                floored += 1
                break
            if steps >= horizon:
                # still above the floor: bracket by the current weight
                open_counts[total] = open_counts.get(total, 0) + 1
                break
            den, cdf = dists[s]
            draw = rng.randrange(den)
            for edge, t in cdf:
                if draw < edge:
                    s = t
                    break
            steps += 1
    return counts, open_counts, zeros, floored


def estimate_utility(
    g: Game,
    rp: RiskParams,
    profile: tuple[Strategy, Strategy],
    samples: int,
    horizon: int | None = None,
    seed: int = 0,
    confidence: Fraction = Fraction(99, 100),
    floor_bits: int = DEFAULT_FLOOR_BITS,
    threads: int = 1,
    bounds: BoundarySets | None = None,
) -> SimResult:
    """Estimate E[b^(-gamma*X)] under the profile with a certified bracket.

    The two-sided confidence interval uses Hoeffding's bound for [0,1]-valued
    samples. Thread batches draw from independently seeded generators, so the
    result is deterministic for a given (seed, samples) regardless of threads.
    """
    if samples < 1:
        raise GameValidationError("need at least one sample")
    for strat in profile:
        strat.validate(g)
    if bounds is None:
        bounds, _ = analyze(g)
    action_of = [_profile_action(g, profile, s) for s in range(g.n_states)]
    if horizon is None:
        horizon = 64 * (g.n_states + 1) + 8 * floor_bits
    r_floor = _reward_floor(rp, floor_bits)

    # batch partition is independent of the thread count for determinism
    batch = 4096
    jobs = []
    off = 0
    while off < samples:
        size = min(batch, samples - off)
        jobs.append((size, seed + 7919 * len(jobs)))
        off += size
    run = lambda job: _run_batch(g, action_of, bounds, job[0], job[1], horizon, r_floor)
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    counts: dict[int, int] = {}
    open_counts: dict[int, int] = {}
    floored = 0
    for part_counts, part_open, part_zeros, part_floored in parts:
        floored += part_floored
        for k, v in part_counts.items():
            counts[k] = counts.get(k, 0) + v
        for k, v in part_open.items():
            open_counts[k] = open_counts.get(k, 0) + v

    # aggregate sum of b^(-gamma*R) over counted rewards, as an enclosure
    gamma = rp.gamma_eff
    bits = 48
    total = Interval.point(Fraction(0))
    for reward, count in sorted(counts.items()):
        w = pow_enclosure(rp.b, Fraction(-gamma.numerator * reward, gamma.denominator), bits)
        total = total + w.scale(Fraction(count))
    open_hi = Fraction(0)
    for reward, count in sorted(open_counts.items()):
        w = pow_enclosure(rp.b, Fraction(-gamma.numerator * reward, gamma.denominator), bits)
        open_hi += w.hi * count
    n = Fraction(samples)
    est_lo = total.lo / n
    est_hi = (total.hi + open_hi + Fraction(floored, 1 << floor_bits)) / n
    est_lo = max(Fraction(0), est_lo)
    est_hi = min(Fraction(1), est_hi)
    floored += sum(open_counts.values())

    # Hoeffding: P(|mean - mu| >= delta) <= 2 exp(-2 n delta^2)
    alpha = 1 - confidence
    ln_term = ln_enclosure(2 / alpha, 64).hi
    delta_sq = ln_term / (2 * samples)
    scale = 1 << 64
    delta = Fraction(iroot_floor(int(delta_sq * scale * scale), 2) + 1, scale)
    ci_lo = max(Fraction(0), est_lo - delta)
    ci_hi = min(Fraction(1), est_hi + delta)
    return SimResult(
        samples=samples,
        estimate_lo=est_lo,
        estimate_hi=est_hi,
        ci_lo=ci_lo,
        ci_hi=ci_hi,
        confidence=confidence,
        floored=floored,
    )
