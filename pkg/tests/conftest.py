"""Shared fixtures: canonical example games and seeded random instance makers."""

from __future__ import annotations

import random

import pytest

from erisk.core import Game, RiskParams, validate_game

FIG2_RAW = {
    "states": [
        {"id": "s1", "owner": "max", "reward": "2"},
        {"id": "s2", "owner": "max", "reward": "2"},
        {"id": "s3", "owner": "max", "reward": "0"},
        {"id": "s4", "owner": "max", "reward": "4"},
    ],
    "transitions": [
        {
            "from": "s1",
            "action": "risk",
            "to": [{"target": "s2", "prob": "1/2"}, {"target": "s3", "prob": "1/2"}],
        },
        {"from": "s1", "action": "safe", "to": [{"target": "s4", "prob": "1"}]},
        {"from": "s2", "action": "loop", "to": [{"target": "s2", "prob": "1"}]},
        {"from": "s3", "action": "loop", "to": [{"target": "s3", "prob": "1"}]},
        {"from": "s4", "action": "go", "to": [{"target": "s3", "prob": "1"}]},
    ],
    "initial": "s1",
    "params": {"b": "2", "gamma": "1", "epsilon": "1/1000", "threshold": "6"},
}

TWO_OUTCOME_RAW = {
    "states": [
        {"id": "c", "owner": "max", "reward": "0"},
        {"id": "one", "owner": "max", "reward": "1"},
        {"id": "zero", "owner": "max", "reward": "0"},
    ],
    "transitions": [
        {
            "from": "c",
            "action": "a",
            "to": [{"target": "one", "prob": "1/2"}, {"target": "zero", "prob": "1/2"}],
        },
        {"from": "one", "action": "a", "to": [{"target": "zero", "prob": "1"}]},
        {"from": "zero", "action": "a", "to": [{"target": "zero", "prob": "1"}]},
    ],
    "initial": "c",
    "params": {"b": "2", "gamma": "1"},
}


@pytest.fixture
def fig2() -> tuple[Game, RiskParams]:
    return validate_game(FIG2_RAW)


@pytest.fixture
def two_outcome() -> tuple[Game, RiskParams]:
    return validate_game(TWO_OUTCOME_RAW)


def random_distribution(rng: random.Random, targets: list[int]) -> list[tuple[int, str]]:
    weights = [rng.randint(1, 4) for _ in targets]
    total = sum(weights)
    return [(t, f"{w}/{total}") for t, w in zip(targets, weights)]


def random_game_raw(
    rng: random.Random,
    n_states: int,
    max_actions: int = 2,
    owners: str = "both",
    max_reward: int = 2,
    b: str = "2",
    gamma: str = "1",
    absorbing_frac: float = 0.3,
) -> dict:
    """A random raw game description; supports are arbitrary, rows exact."""
    ids = [f"q{i}" for i in range(n_states)]
    states = []
    for i in range(n_states):
        if owners == "max":
            owner = "max"
        elif owners == "min":
            owner = "min"
        else:
            owner = rng.choice(["max", "min"])
        states.append(
            {"id": ids[i], "owner": owner, "reward": str(rng.randint(0, max_reward))}
        )
    transitions = []
    for i in range(n_states):
        n_acts = rng.randint(1, max_actions)
        for a in range(n_acts):
            if rng.random() < absorbing_frac:
                targets = [i]
            else:
                size = rng.randint(1, min(3, n_states))
                targets = rng.sample(range(n_states), size)
            transitions.append(
                {
                    "from": ids[i],
                    "action": f"a{a}",
                    "to": [
                        {"target": ids[t], "prob": p}
                        for t, p in random_distribution(rng, targets)
                    ],
                }
            )
    return {
        "states": states,
        "transitions": transitions,
        "initial": ids[0],
        "params": {"b": b, "gamma": gamma},
    }


def random_game(rng: random.Random, **kwargs) -> tuple[Game, RiskParams]:
    return validate_game(random_game_raw(rng, **kwargs))


def absorbing_target_game_raw(rng: random.Random, n_states: int) -> tuple[dict, list[str]]:
    """Random game with an absorbing target set, rewards 1 on targets, 0 off.

    The shape needed by the reachability-capture identity: reward indicator of
    an absorbing T, gamma = 1.
    """
    ids = [f"q{i}" for i in range(n_states)]
    n_targets = rng.randint(1, max(1, n_states // 3))
    target_ids = set(rng.sample(ids, n_targets))
    states = [
        {
            "id": sid,
            "owner": rng.choice(["max", "min"]),
            "reward": "1" if sid in target_ids else "0",
        }
        for sid in ids
    ]
    transitions = []
    for i, sid in enumerate(ids):
        if sid in target_ids:
            transitions.append(
                {"from": sid, "action": "stay", "to": [{"target": sid, "prob": "1"}]}
            )
            continue
        for a in range(rng.randint(1, 2)):
            size = rng.randint(1, min(3, n_states))
            targets = rng.sample(range(n_states), size)
            transitions.append(
                {
                    "from": sid,
                    "action": f"a{a}",
                    "to": [
                        {"target": ids[t], "prob": p}
                        for t, p in random_distribution(rng, targets)
                    ],
                }
            )
    raw = {
        "states": states,
        "transitions": transitions,
        "initial": ids[0],
        "params": {"b": "2", "gamma": "1"},
    }
    return raw, sorted(target_ids)
