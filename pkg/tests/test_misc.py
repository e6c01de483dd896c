"""Odds and ends: parameter validation, JSON round trip, helper edge cases."""

from __future__ import annotations

from fractions import Fraction

import pytest

from erisk.algebra import Extension, embed
from erisk.core import (
    GameValidationError,
    Owner,
    RiskParams,
    Strategy,
    game_to_json,
    validate_game,
)
from erisk.enclose import rational_power

from tests.conftest import FIG2_RAW


def test_risk_params_validation():
    with pytest.raises(GameValidationError):
        RiskParams(b=Fraction(1), gamma=Fraction(1))
    with pytest.raises(GameValidationError):
        RiskParams(b=Fraction(1, 2), gamma=Fraction(1))
    with pytest.raises(GameValidationError):
        RiskParams(b=Fraction(2), gamma=Fraction(0))
    with pytest.raises(GameValidationError):
        RiskParams(b=Fraction(2), gamma=Fraction(1), epsilon=Fraction(-1))


def test_game_json_round_trip():
    game, rp = validate_game(FIG2_RAW)
    doc = game_to_json(game, rp)
    game2, rp2 = validate_game(doc)
    assert game2.ids == game.ids
    assert game2.rewards == game.rewards
    assert game2.transitions == game.transitions
    assert rp2.b == rp.b and rp2.gamma == rp.gamma_eff


def test_strategy_validation():
    game, _ = validate_game(FIG2_RAW)
    incomplete = Strategy(player=Owner.MAX, choice={0: 0})
    with pytest.raises(GameValidationError, match="misses"):
        incomplete.validate(game)
    bad = Strategy(player=Owner.MAX, choice={0: 5, 1: 0, 2: 0, 3: 0})
    with pytest.raises(GameValidationError, match="invalid action"):
        bad.validate(game)


def test_rational_power_cases():
    assert rational_power(Fraction(2), Fraction(-3)) == Fraction(1, 8)
    assert rational_power(Fraction(4, 9), Fraction(1, 2)) == Fraction(2, 3)
    assert rational_power(Fraction(2), Fraction(1, 2)) is None
    assert rational_power(Fraction(8), Fraction(2, 3)) == 4
    # huge encoding, rational answer
    assert rational_power(Fraction(2), Fraction(6 * 10**9, 10**9)) == 64
    # huge encoding, irrational answer, still fast
    assert rational_power(Fraction(2), Fraction(6 * 10**9 + 1, 10**9)) is None


def test_embed_rejects_mismatched_base():
    a = Extension(Fraction(2), 2)
    b = Extension(Fraction(3), 4)
    with pytest.raises(ValueError, match="same base"):
        embed(a.one(), b)
    c = Extension(Fraction(2), 3)
    with pytest.raises(ValueError, match="non-multiple"):
        embed(Extension(Fraction(2), 2).one(), c)


def test_qualitative_scales_to_hundreds_of_states():
    import random
    import time

    from erisk.qualitative import analyze
    from tests.conftest import random_game

    game, _ = random_game(random.Random(12), n_states=200, max_actions=2)
    start = time.monotonic()
    analyze(game)
    assert time.monotonic() - start < 5.0
