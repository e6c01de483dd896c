"""Data model, validation, and reward-scaling behavior."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from erisk.core import (
    GameValidationError,
    Owner,
    parse_fraction,
    validate_game,
)


def test_fraction_arithmetic_properties():
    rng = random.Random(7)
    for _ in range(500):
        a = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        b = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        c = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        if a != 0:
            assert a * (1 / a) == 1
        s = a + b
        assert s.denominator > 0
        import math

        assert math.gcd(s.numerator, s.denominator) == 1


def test_parse_fraction_rejects_floats():
    with pytest.raises(GameValidationError):
        parse_fraction("0.5")
    with pytest.raises(GameValidationError):
        parse_fraction("1e-3")
    assert parse_fraction("3/4") == Fraction(3, 4)
    assert parse_fraction("-2") == Fraction(-2)


def test_fig2_valid(fig2):
    game, rp = fig2
    assert game.n_states == 4
    assert game.rewards == (2, 2, 0, 4)
    assert rp.reward_scale == 1
    assert game.owner[0] is Owner.MAX
    assert game.is_mdp() and not game.is_mc()


def test_degenerate_single_absorbing_state():
    raw = {
        "states": [{"id": "s", "owner": "max", "reward": "0"}],
        "transitions": [{"from": "s", "action": "a", "to": [{"target": "s", "prob": "1"}]}],
        "initial": "s",
        "params": {"b": "2", "gamma": "1"},
    }
    game, rp = validate_game(raw)
    assert game.n_states == 1 and rp.reward_scale == 1


def test_rational_rewards_scaled():
    raw = {
        "states": [
            {"id": "a", "owner": "max", "reward": "1/2"},
            {"id": "b", "owner": "max", "reward": "3/4"},
        ],
        "transitions": [
            {"from": "a", "action": "go", "to": [{"target": "b", "prob": "1"}]},
            {"from": "b", "action": "stay", "to": [{"target": "b", "prob": "1"}]},
        ],
        "initial": "a",
        "params": {"b": "2", "gamma": "1", "threshold": "1"},
    }
    game, rp = validate_game(raw)
    assert rp.reward_scale == 4
    assert game.rewards == (2, 3)
    assert rp.gamma_eff == Fraction(1, 4)
    assert rp.threshold_eff == 4


def test_reward_scaling_preserves_path_weights():
    # b^(-gamma*X) along any finite prefix is unchanged by (r*D, gamma/D)
    rng = random.Random(3)
    gamma = Fraction(2, 3)
    rewards = [Fraction(1, 2), Fraction(3, 4), Fraction(0), Fraction(5, 6)]
    import math

    scale = 1
    for r in rewards:
        scale = scale * r.denominator // math.gcd(scale, r.denominator)
    scaled = [int(r * scale) for r in rewards]
    gamma_eff = gamma / scale
    for _ in range(50):
        prefix = [rng.randrange(len(rewards)) for _ in range(rng.randint(1, 6))]
        original_exponent = sum(gamma * rewards[i] for i in prefix)
        scaled_exponent = sum(gamma_eff * scaled[i] for i in prefix)
        assert original_exponent == scaled_exponent


@pytest.mark.parametrize(
    "mutation, message",
    [
        (lambda raw: raw["transitions"][0]["to"].pop(), "sums to"),
        (
            lambda raw: raw["transitions"][0]["to"][0].update(prob="-1/2"),
            "negative probability",
        ),
        (lambda raw: raw["states"][0].update(reward="-1"), "negative reward"),
        (
            lambda raw: raw["transitions"][0]["to"][0].update(target="nowhere"),
            "dangling",
        ),
        (lambda raw: raw.update(initial="nowhere"), "initial"),
        (lambda raw: raw["transitions"].pop(2), "empty action set"),
    ],
)
def test_validation_errors(mutation, message):
    import copy

    from tests.conftest import FIG2_RAW

    raw = copy.deepcopy(FIG2_RAW)
    mutation(raw)
    with pytest.raises(GameValidationError, match=message):
        validate_game(raw)


def test_duplicate_state_rejected():
    raw = {
        "states": [
            {"id": "s", "owner": "max", "reward": "0"},
            {"id": "s", "owner": "max", "reward": "0"},
        ],
        "transitions": [{"from": "s", "action": "a", "to": [{"target": "s", "prob": "1"}]}],
        "initial": "s",
    }
    with pytest.raises(GameValidationError, match="duplicate"):
        validate_game(raw)
