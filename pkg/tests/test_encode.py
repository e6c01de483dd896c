"""SMT-LIB emission: shape, determinism, and recorded-answer round trip."""

from __future__ import annotations

import importlib.util
import re
from dataclasses import replace
from fractions import Fraction

import pytest

from erisk.core import validate_game
from erisk.encode import emit_inequalities
from erisk.exact import decide_threshold
from erisk.qualitative import analyze

from tests.conftest import FIG2_RAW, TWO_OUTCOME_RAW

HAVE_Z3 = importlib.util.find_spec("z3") is not None


def emit(game, rp):
    bounds, _ = analyze(game)
    return emit_inequalities(game, rp, bounds)


def test_deterministic_byte_for_byte(fig2):
    game, rp = fig2
    assert emit(game, rp) == emit(game, rp)


def test_zero_reward_state_has_no_chain(fig2):
    game, rp = fig2
    text = emit(game, rp)
    # all fig2 factors are rational powers of two: no chain variables at all
    assert "declare-fun f" not in text
    assert "(/ 1.0 4.0)" in text and "(/ 1.0 16.0)" in text
    assert text.startswith("(set-logic QF_NRA)")
    assert text.endswith("(check-sat)\n")


def test_chain_lengths_for_fractional_gamma():
    raw = {
        "states": [
            {"id": "a", "owner": "max", "reward": "1"},
            {"id": "z", "owner": "max", "reward": "0"},
        ],
        "transitions": [
            {"from": "a", "action": "x", "to": [{"target": "z", "prob": "1"}]},
            {"from": "z", "action": "x", "to": [{"target": "z", "prob": "1"}]},
        ],
        "initial": "a",
        "params": {"b": "2", "gamma": "3/4", "threshold": "1"},
    }
    game, rp = validate_game(raw)
    text = emit(game, rp)
    # x^4 = b^-3: squaring chain c1, c2 (ceil log2 4 = 2) and d0, d1 (ceil log2 3 = 2)
    assert "(declare-fun f0_c1 () Real)" in text
    assert "(declare-fun f0_c2 () Real)" in text
    assert "f0_c3" not in text
    assert "(declare-fun d1 () Real)" in text
    assert "(assert (> f0 0.0))" in text
    # closing product: negative exponent form c-prod * d-prod = 1
    assert re.search(r"\(assert \(= \(\* f0_c2 d0 d1\) 1\.0\)\)", text)


def test_variable_count_matches_spec(fig2):
    game, rp = fig2
    text = emit(game, rp)
    declared = re.findall(r"\(declare-fun (\S+) \(\) Real\)", text)
    assert declared == [f"v{s}" for s in range(game.n_states)]


def recorded_instances():
    """(raw, threshold, expected SAT) fixtures; expectations from exact values."""
    out = []
    for t, sat in (("6", True), ("7", False), ("5", True), ("13/2", False)):
        out.append((FIG2_RAW, t, sat))
    # two-outcome MC: ERisk = 2 - log2(3) ~ 0.41504
    for t, sat in (("2/5", True), ("42/100", False), ("0", True), ("-1", True)):
        out.append((TWO_OUTCOME_RAW, t, sat))
    return out


@pytest.mark.parametrize("raw, t, expected", recorded_instances())
def test_recorded_answers_match_decide_threshold(raw, t, expected):
    game, rp = validate_game(raw)
    rp = replace(rp, threshold=Fraction(t))
    assert decide_threshold(game, rp).satisfied == expected
    text = emit(game, rp)
    assert "(check-sat)" in text


@pytest.mark.skipif(not HAVE_Z3, reason="no external NRA solver available")
@pytest.mark.parametrize("raw, t, expected", recorded_instances())
def test_external_solver_round_trip(raw, t, expected):
    import z3

    game, rp = validate_game(raw)
    rp = replace(rp, threshold=Fraction(t))
    text = emit(game, rp)
    solver = z3.Solver()
    solver.add(z3.parse_smt2_string(text))
    result = solver.check()
    assert (result == z3.sat) == expected
