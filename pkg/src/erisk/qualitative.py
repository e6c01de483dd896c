"""Graph-based boundary sets and the stopping check.

S0 holds the states where the risk-averse player cannot obtain positive
reward with positive probability; Sinf holds those from which she forces
infinite reward almost surely. Both depend only on transition supports,
owners, and reward signs, and are computed by attractor fixpoints in time
O(states * transitions).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Game, Owner

__all__ = [
    "BoundarySets",
    "compute_S0",
    "compute_Sinf",
    "check_stopping",
    "analyze",
    "sinf_witness_actions",
]


@dataclass(frozen=True)
class BoundarySets:
    s0: frozenset[int]
    sinf: frozenset[int]

    def __post_init__(self):
        if self.s0 & self.sinf:
            raise AssertionError("S0 and Sinf must be disjoint")


def _positive_attractor(
    game: Game,
    target: set[int],
    existential: Owner,
    within: set[int] | None = None,
    allowed: dict[int, list[int]] | None = None,
) -> set[int]:
    """States from which `existential` can reach `target` with positive probability.

    Probabilistic branching counts existentially (any successor in the set);
    the opposing player is universal over its available actions. `within`
    restricts the arena and `allowed` optionally restricts action sets.
    """
    universe = set(range(game.n_states)) if within is None else set(within)
    attr = set(target) & universe
    changed = True
    while changed:
        changed = False
        for s in universe:
            if s in attr:
                continue
            acts = allowed[s] if allowed is not None else list(game.actions(s))
            hits = [
                any(t in attr for t, _ in game.successors(s, a)) for a in acts
            ]
            if not hits:
                joins = game.owner[s] is not existential  # no moves: universal player is stuck
            elif game.owner[s] is existential:
                joins = any(hits)
            else:
                joins = all(hits)
            if joins:
                attr.add(s)
                changed = True
    return attr


def compute_S0(game: Game) -> frozenset[int]:
    """Complement of the positive attractor (for MAX) of the positive-reward states."""
    positive = {s for s in range(game.n_states) if game.rewards[s] > 0}
    attr = _positive_attractor(game, positive, Owner.MAX)
    return frozenset(set(range(game.n_states)) - attr)


def _almost_sure_reach_max(game: Game, target: set[int], within: set[int]) -> set[int]:
    """States in `within` from which MAX ensures reaching `target` with probability 1.

    MAX may only use actions whose support stays inside the shrinking arena;
    MIN keeps all actions (states with an escaping MIN action are peeled off
    through the MIN attractor, which keeps the invariant that surviving MIN
    actions stay inside).
    """
    arena = set(within)
    goal = set(target)
    while True:
        staying: dict[int, list[int]] = {}
        for s in arena:
            if game.owner[s] is Owner.MAX:
                staying[s] = [
                    a
                    for a in game.actions(s)
                    if all(t in arena for t, _ in game.successors(s, a))
                ]
            else:
                staying[s] = list(game.actions(s))
        reach = _positive_attractor(
            game, goal & arena, Owner.MAX, within=arena, allowed=staying
        )
        dead = arena - reach
        if not dead:
            return arena
        peeled = _positive_attractor(
            game, dead, Owner.MIN, within=arena, allowed=staying
        )
        arena -= peeled | dead


def compute_Sinf(game: Game) -> frozenset[int]:
    """Almost-sure repeated visits of positive-reward states, forceable by MAX.

    Greatest fixpoint: repeatedly shrink the candidate region to the states
    from which MAX almost-surely reaches a positive-reward state without
    leaving the region.
    """
    positive = {s for s in range(game.n_states) if game.rewards[s] > 0}
    region = set(range(game.n_states))
    while True:
        core = _almost_sure_reach_max(game, positive & region, region)
        if core == region:
            return frozenset(region)
        region = core


def sinf_witness_actions(game: Game, sinf: frozenset[int]) -> dict[int, int]:
    """MAX choices inside Sinf that force positive-reward visits almost surely.

    Any region-staying action can stall on a zero-reward cycle, so the witness
    follows the positive attractor toward the rewarded states: each MAX state
    takes the lowest staying action with a successor strictly closer to them.
    Repeating that epoch forever visits rewards infinitely often with
    probability one.
    """
    region = set(sinf)
    choice: dict[int, int] = {}
    staying: dict[int, list[int]] = {}
    for s in region:
        if game.owner[s] is Owner.MAX:
            staying[s] = [
                a
                for a in game.actions(s)
                if all(t in region for t, _ in game.successors(s, a))
            ]
    attr = {s for s in region if game.rewards[s] > 0}
    for s in attr & set(staying):
        choice[s] = staying[s][0] if staying[s] else 0
    changed = True
    while changed:
        changed = False
        for s in region - attr:
            if game.owner[s] is Owner.MAX:
                for a in staying[s]:
                    if any(t in attr for t, _ in game.successors(s, a)):
                        choice[s] = a
                        attr.add(s)
                        changed = True
                        break
            else:
                if all(
                    any(t in attr for t, _ in game.successors(s, a))
                    for a in game.actions(s)
                ):
                    attr.add(s)
                    changed = True
    return choice


def check_stopping(game: Game, bounds: BoundarySets) -> bool:
    """True iff no strategy profile can forever avoid S0 and all positive rewards.

    The negation is a cooperative sure-safety question: both players and the
    probabilistic branching conspire to stay outside the target, which is
    possible exactly on the largest action-closed state set avoiding it.
    """
    target = set(bounds.s0) | {s for s in range(game.n_states) if game.rewards[s] > 0}
    safe = set(range(game.n_states)) - target
    changed = True
    while changed:
        changed = False
        for s in list(safe):
            if not any(
                all(t in safe for t, _ in game.successors(s, a))
                for a in game.actions(s)
            ):
                safe.discard(s)
                changed = True
    return not safe


def analyze(game: Game) -> tuple[BoundarySets, bool]:
    bounds = BoundarySets(s0=compute_S0(game), sinf=compute_Sinf(game))
    return bounds, check_stopping(game, bounds)
