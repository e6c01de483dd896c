"""Game data model, exact rational arithmetic substrate, and input validation.

All probabilities, parameters, and intermediate values are exact
`fractions.Fraction` instances; nothing in the solving pipeline touches
floating point. Games are immutable after construction.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

__all__ = [
    "Fraction",
    "Owner",
    "Game",
    "RiskParams",
    "Strategy",
    "GameValidationError",
    "parse_fraction",
    "validate_game",
    "load_game",
    "game_to_json",
]

_FRACTION_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class Owner(enum.Enum):
    """Which player controls a state. MAX is the risk-averse player."""

    MAX = "max"
    MIN = "min"


class GameValidationError(ValueError):
    """Raised for malformed game descriptions, with a human-readable location."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{message}" + (f" (at {location})" if location else ""))


def parse_fraction(text: object, *, location: str | None = None) -> Fraction:
    """Parse an exact fraction string "n" or "n/d". Decimal notation is rejected."""
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _FRACTION_RE.match(text.strip()):
        raise GameValidationError(
            f"expected an exact fraction 'n' or 'n/d', got {text!r}", location
        )
    return Fraction(text.strip())


@dataclass(frozen=True)
class Game:
    """A turn-based stochastic game with non-negative integer state rewards.

    An MDP is a game whose states all belong to one player; a Markov chain
    additionally has singleton action sets. `transitions[s][a]` is a tuple of
    (successor, probability) pairs summing exactly to one.
    """

    ids: tuple[str, ...]
    owner: tuple[Owner, ...]
    action_labels: tuple[tuple[str, ...], ...]
    transitions: tuple[tuple[tuple[tuple[int, Fraction], ...], ...], ...]
    rewards: tuple[int, ...]
    initial: int

    @property
    def n_states(self) -> int:
        return len(self.ids)

    def actions(self, s: int) -> range:
        return range(len(self.action_labels[s]))

    def successors(self, s: int, a: int) -> tuple[tuple[int, Fraction], ...]:
        return self.transitions[s][a]

    def index_of(self, state_id: str) -> int:
        try:
            return self.ids.index(state_id)
        except ValueError:
            raise KeyError(f"unknown state id {state_id!r}") from None

    def is_mc(self) -> bool:
        return all(len(acts) == 1 for acts in self.action_labels)

    def is_mdp(self) -> bool:
        return len(set(self.owner)) <= 1

    def owners_present(self) -> set[Owner]:
        return set(self.owner)


@dataclass(frozen=True)
class RiskParams:
    """Risk basis b > 1, aversion factor gamma > 0, optional threshold/precision.

    `reward_scale` is the factor D by which rational input rewards were
    multiplied to make them integral; `gamma_eff` = gamma / D is the factor
    that pairs with the scaled integer rewards so that b^(-gamma_eff * r_scaled)
    equals b^(-gamma * r_original) for every state.
    """

    b: Fraction
    gamma: Fraction
    threshold: Fraction | None = None
    epsilon: Fraction | None = None
    reward_scale: int = 1

    def __post_init__(self):
        if self.b <= 1:
            raise GameValidationError(f"basis b must exceed 1, got {self.b}")
        if self.gamma <= 0:
            raise GameValidationError(f"gamma must be positive, got {self.gamma}")
        if self.epsilon is not None and self.epsilon <= 0:
            raise GameValidationError(f"epsilon must be positive, got {self.epsilon}")
        if self.reward_scale < 1:
            raise GameValidationError("reward scale must be a positive integer")

    @property
    def gamma_eff(self) -> Fraction:
        return self.gamma / self.reward_scale

    @property
    def threshold_eff(self) -> Fraction | None:
        # ERisk of the reward-scaled game is D times the original one.
        if self.threshold is None:
            return None
        return self.threshold * self.reward_scale


@dataclass(frozen=True)
class Strategy:
    """Memoryless deterministic strategy: one action index per owned state."""

    player: Owner
    choice: Mapping[int, int] = field(default_factory=dict)

    def action(self, s: int) -> int:
        return self.choice[s]

    def validate(self, game: Game) -> None:
        for s in range(game.n_states):
            if game.owner[s] is not self.player:
                continue
            if s not in self.choice:
                raise GameValidationError(
                    f"strategy for {self.player.value} misses state {game.ids[s]!r}"
                )
            if not 0 <= self.choice[s] < len(game.action_labels[s]):
                raise GameValidationError(
                    f"strategy picks invalid action {self.choice[s]} at {game.ids[s]!r}"
                )

    def to_json(self, game: Game) -> dict[str, str]:
        return {
            game.ids[s]: game.action_labels[s][a]
            for s, a in sorted(self.choice.items())
            if game.owner[s] is self.player
        }


def _scale_rewards(raw_rewards: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    """Make rewards integral: multiply by the lcm D of their denominators."""
    scale = 1
    for r in raw_rewards:
        scale = scale * r.denominator // math.gcd(scale, r.denominator)
    return tuple(int(r * scale) for r in raw_rewards), scale


def validate_game(raw: Mapping) -> tuple[Game, RiskParams]:
    """Validate a parsed game description and build the immutable model.

    Rational rewards are scaled to integers (factor D recorded in the returned
    RiskParams); every distribution must sum to exactly one. Raises
    GameValidationError with a state/action location on any defect.
    """
    if not isinstance(raw, Mapping):
        raise GameValidationError("top-level game description must be an object")
    states = raw.get("states")
    if not isinstance(states, list) or not states:
        raise GameValidationError("'states' must be a non-empty array")

    ids: list[str] = []
    owners: list[Owner] = []
    raw_rewards: list[Fraction] = []
    for i, st in enumerate(states):
        loc = f"states[{i}]"
        sid = st.get("id")
        if not isinstance(sid, str) or not sid:
            raise GameValidationError("state id must be a non-empty string", loc)
        if sid in ids:
            raise GameValidationError(f"duplicate state id {sid!r}", loc)
        owner_tag = st.get("owner", "max")
        try:
            owner = Owner(owner_tag)
        except ValueError:
            raise GameValidationError(
                f"owner must be 'max' or 'min', got {owner_tag!r}", loc
            ) from None
        reward = parse_fraction(st.get("reward", "0"), location=f"{loc}.reward")
        if reward < 0:
            raise GameValidationError(f"negative reward {reward}", f"state {sid!r}")
        ids.append(sid)
        owners.append(owner)
        raw_rewards.append(reward)

    index = {sid: i for i, sid in enumerate(ids)}
    action_labels: list[list[str]] = [[] for _ in ids]
    rows: list[list[tuple[tuple[int, Fraction], ...]]] = [[] for _ in ids]

    for j, tr in enumerate(raw.get("transitions", [])):
        loc = f"transitions[{j}]"
        src = tr.get("from")
        if src not in index:
            raise GameValidationError(f"unknown source state {src!r}", loc)
        s = index[src]
        label = tr.get("action", "a")
        if label in action_labels[s]:
            raise GameValidationError(
                f"duplicate action {label!r}", f"state {src!r}"
            )
        branches = tr.get("to")
        if not isinstance(branches, list) or not branches:
            raise GameValidationError("'to' must be a non-empty array", loc)
        seen: dict[int, Fraction] = {}
        for br in branches:
            tgt = br.get("target")
            if tgt not in index:
                raise GameValidationError(
                    f"dangling target state {tgt!r}", f"{src!r} action {label!r}"
                )
            prob = parse_fraction(br.get("prob", "1"), location=f"{loc}.prob")
            if prob < 0:
                raise GameValidationError(
                    f"negative probability {prob}", f"{src!r} action {label!r}"
                )
            t = index[tgt]
            seen[t] = seen.get(t, Fraction(0)) + prob
        total = sum(seen.values(), Fraction(0))
        if total != 1:
            raise GameValidationError(
                f"distribution sums to {total}, not 1", f"{src!r} action {label!r}"
            )
        action_labels[s].append(label)
        rows[s].append(tuple(sorted((t, p) for t, p in seen.items() if p > 0)))

    for s, acts in enumerate(action_labels):
        if not acts:
            raise GameValidationError("state has an empty action set", f"state {ids[s]!r}")

    initial_id = raw.get("initial")
    if initial_id not in index:
        raise GameValidationError(f"initial state {initial_id!r} is not defined")

    rewards, scale = _scale_rewards(raw_rewards)

    params_raw = raw.get("params", {})
    if not isinstance(params_raw, Mapping):
        raise GameValidationError("'params' must be an object")
    b = parse_fraction(params_raw.get("b", "2"), location="params.b")
    gamma = parse_fraction(params_raw.get("gamma", "1"), location="params.gamma")
    threshold = (
        parse_fraction(params_raw["threshold"], location="params.threshold")
        if "threshold" in params_raw
        else None
    )
    epsilon = (
        parse_fraction(params_raw["epsilon"], location="params.epsilon")
        if "epsilon" in params_raw
        else None
    )

    game = Game(
        ids=tuple(ids),
        owner=tuple(owners),
        action_labels=tuple(tuple(a) for a in action_labels),
        transitions=tuple(tuple(r) for r in rows),
        rewards=rewards,
        initial=index[initial_id],
    )
    params = RiskParams(
        b=b, gamma=gamma, threshold=threshold, epsilon=epsilon, reward_scale=scale
    )
    return game, params


def load_game(path: str) -> tuple[Game, RiskParams]:
    """Load and validate a game from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameValidationError(f"invalid JSON: {exc}") from exc
    return validate_game(raw)


def game_to_json(game: Game, params: RiskParams) -> dict:
    """Serialize back to the input schema (rewards in scaled integer form)."""
    doc: dict = {
        "states": [
            {
                "id": game.ids[s],
                "owner": game.owner[s].value,
                "reward": str(game.rewards[s]),
            }
            for s in range(game.n_states)
        ],
        "transitions": [
            {
                "from": game.ids[s],
                "action": game.action_labels[s][a],
                "to": [
                    {"target": game.ids[t], "prob": str(p)}
                    for t, p in game.transitions[s][a]
                ],
            }
            for s in range(game.n_states)
            for a in game.actions(s)
        ],
        "initial": game.ids[game.initial],
        "params": {"b": str(params.b), "gamma": str(params.gamma_eff)},
    }
    if params.threshold_eff is not None:
        doc["params"]["threshold"] = str(params.threshold_eff)
    if params.epsilon is not None:
        doc["params"]["epsilon"] = str(params.epsilon)
    return doc
