"""Certified enclosure primitives: roots, logarithms, directed rounding."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from erisk.enclose import (
    Interval,
    format_decimal,
    iroot_floor,
    ln_enclosure,
    log2_enclosure,
    pow_enclosure,
    round_down,
    round_up,
)


def test_iroot_floor_matches_definition():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randrange(0, 10**12)
        k = rng.randint(1, 7)
        r = iroot_floor(n, k)
        assert r**k <= n < (r + 1) ** k
    assert iroot_floor(8, 3) == 2
    assert iroot_floor(7, 3) == 1
    assert iroot_floor(2**60, 2) == 2**30


def test_rounding_directions():
    rng = random.Random(5)
    for _ in range(200):
        x = Fraction(rng.randint(-999, 999), rng.randint(1, 999))
        lo, hi = round_down(x, 16), round_up(x, 16)
        assert lo <= x <= hi
        assert hi - lo <= Fraction(1, 1 << 15)
        assert lo.denominator & (lo.denominator - 1) == 0  # dyadic


def test_pow_enclosure_exact_cases():
    assert pow_enclosure(Fraction(2), Fraction(-2), 8) == Interval.point(Fraction(1, 4))
    # 4/9 has an exact square root
    iv = pow_enclosure(Fraction(4, 9), Fraction(1, 2), 8)
    assert iv.lo == iv.hi == Fraction(2, 3)


def test_pow_enclosure_brackets_true_value():
    rng = random.Random(17)
    for _ in range(100):
        base = Fraction(rng.randint(2, 50), rng.randint(1, 10))
        if base <= 1:
            continue
        expo = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
        iv = pow_enclosure(base, expo, 64)
        true = float(base) ** float(expo)
        assert float(iv.lo) <= true * (1 + 1e-12) and true <= float(iv.hi) * (1 + 1e-12)
        if iv.lo != iv.hi:
            assert iv.width <= Fraction(3, 1 << 60)  # shrinks with bits


def test_ln_enclosure_width_and_truth():
    for x in (Fraction(2), Fraction(1, 2), Fraction(3), Fraction(10, 7), Fraction(1)):
        iv = ln_enclosure(x, 80)
        assert iv.width <= Fraction(1, 1 << 80)
        assert float(iv.lo) <= math.log(float(x)) + 1e-15
        assert math.log(float(x)) <= float(iv.hi) + 1e-15


def test_log2_enclosure():
    iv = log2_enclosure(Fraction(8), 60)
    assert iv.contains(Fraction(3))
    iv = log2_enclosure(Fraction(3), 60)
    assert abs(float(iv.lo) - math.log2(3)) < 1e-15


def test_interval_division_outward():
    a = Interval(Fraction(1), Fraction(2))
    b = Interval(Fraction(3), Fraction(4))
    q = a / b
    assert q.lo == Fraction(1, 4) and q.hi == Fraction(2, 3)


def test_format_decimal_exact():
    assert format_decimal(Fraction(1, 64), 6) == "0.015625"
    assert format_decimal(Fraction(-3, 2), 3) == "-1.500"
    assert format_decimal(Fraction(6), 0) == "6"
