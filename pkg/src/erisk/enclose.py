"""Certified rational interval enclosures with directed rounding.

Every function returns exact `Fraction` bounds that are guaranteed to bracket
the true real value; precision is a bit count and callers refine by asking for
more bits. Integer k-th roots provide the only irrational primitives, so no
floating point is involved anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "Interval",
    "round_down",
    "round_up",
    "iroot_floor",
    "rational_power",
    "pow_enclosure",
    "ln_enclosure",
    "log2_enclosure",
    "format_decimal",
    "decimal_enclosure_str",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def round_down(x: Fraction, bits: int) -> Fraction:
    """Largest dyadic m/2^bits that is <= x."""
    scaled = x.numerator * (1 << bits)
    return Fraction(scaled // x.denominator, 1 << bits)


def round_up(x: Fraction, bits: int) -> Fraction:
    """Smallest dyadic m/2^bits that is >= x."""
    scaled = x.numerator * (1 << bits)
    return Fraction(-((-scaled) // x.denominator), 1 << bits)


def iroot_floor(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1, by Newton iteration on integers."""
    if n < 0:
        raise ValueError("iroot_floor needs a non-negative radicand")
    if k == 1 or n in (0, 1):
        return n
    if k >= n.bit_length():  # n < 2^k, so the root is below 2
        return 1
    x = 1 << (-(-n.bit_length() // k))  # 2^ceil(bits/k) >= n^(1/k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:  # Newton may overshoot by one near powers
        x -= 1
    return x


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: Fraction | int) -> "Interval":
        f = Fraction(x)
        return Interval(f, f)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        products = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ]
        return Interval(min(products), max(products))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        quotients = [
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        ]
        return Interval(min(quotients), max(quotients))

    def scale(self, c: Fraction) -> "Interval":
        return Interval(self.lo * c, self.hi * c) if c >= 0 else Interval(self.hi * c, self.lo * c)

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def strictly_above(self, x: Fraction) -> bool:
        return self.lo > x

    def strictly_below(self, x: Fraction) -> bool:
        return self.hi < x

    def outward(self, bits: int) -> "Interval":
        return Interval(round_down(self.lo, bits), round_up(self.hi, bits))


def pow_enclosure(base: Fraction, expo: Fraction, bits: int) -> Interval:
    """Enclosure of base**expo for base > 0 and rational expo.

    Exact when the value is rational (integral exponent, or the radicand is a
    perfect power); otherwise [lo, hi] are dyadics with hi - lo <= 3 * 2^-bits
    relative to the scaled root, which shrinks to 0 as bits grows.
    """
    if base <= 0:
        raise ValueError("pow_enclosure needs a positive base")
    num, den = expo.numerator, expo.denominator
    value = Fraction(base.numerator, base.denominator) ** num
    if den == 1:
        return Interval.point(value)
    n_root = iroot_floor(value.numerator, den)
    d_root = iroot_floor(value.denominator, den)
    if n_root**den == value.numerator and d_root**den == value.denominator:
        return Interval.point(Fraction(n_root, d_root))
    # den-th root of the exact rational `value`, bracketed by integer roots.
    shift = 1 << bits
    t_lo = (value.numerator * shift**den) // value.denominator
    t_hi = -((-value.numerator * shift**den) // value.denominator)
    lo_int = iroot_floor(t_lo, den)
    hi_int = iroot_floor(t_hi, den) + 1
    return Interval(Fraction(lo_int, shift), Fraction(hi_int, shift))


def _divisors_desc(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return large[::-1] + small[::-1]


def rational_power(base: Fraction, expo: Fraction) -> Fraction | None:
    """base**expo as an exact rational, or None when the value is irrational.

    Cheap for arbitrarily large exponent denominators: pulls the largest
    divisor d of the denominator for which both parts of `base` are perfect
    d-th powers, then checks divisibility of the numerator. The returned value
    (when rational) has magnitude base**expo, so its size is governed by the
    exponent's numerical value, not its encoding.
    """
    if base <= 0:
        raise ValueError("rational_power needs a positive base")
    num, den = expo.numerator, expo.denominator
    if den == 1:
        return base**num
    b1, b2 = base.numerator, base.denominator
    for d in _divisors_desc(den):
        r1, r2 = iroot_floor(b1, d), iroot_floor(b2, d)
        if r1**d == b1 and r2**d == b2:
            q = den // d
            if num % q:
                return None
            return Fraction(r1, r2) ** (num // q)
    return None  # unreachable: d = 1 always matches


_LN2_CACHE: dict[int, Interval] = {}


def _atanh_series(u: Fraction, bits: int) -> Interval:
    """Enclosure of 2*atanh(u) = ln((1+u)/(1-u)) for 0 <= u < 1/2."""
    if u == 0:
        return Interval.point(_ZERO)
    target = Fraction(1, 1 << (bits + 2))
    total = _ZERO
    term = u
    u2 = u * u
    j = 0
    while True:
        total += term / (2 * j + 1)
        term *= u2
        j += 1
        # tail of 2*sum u^(2k+1)/(2k+1) from k=j, geometric bound
        tail = 2 * term / ((2 * j + 1) * (1 - u2))
        if tail <= target:
            break
        if j > 4 * bits + 64:
            raise RuntimeError("atanh series failed to converge")
    lo = 2 * total
    return Interval(lo, lo + tail).outward(bits + 4)


def ln_enclosure(x: Fraction, bits: int) -> Interval:
    """Enclosure of ln(x) for x > 0 with width at most 2^-bits."""
    if x <= 0:
        raise ValueError("ln_enclosure needs a positive argument")
    work = bits + 8
    while True:
        k = 0
        y = x
        while y >= 2:
            y /= 2
            k += 1
        while y < 1:
            y *= 2
            k -= 1
        # pre-round to dyadics so the series runs on small numbers; ln is monotone
        y_lo = round_down(y, work)
        y_hi = round_up(y, work)
        lo = _atanh_series((y_lo - 1) / (y_lo + 1), work).lo
        hi = _atanh_series((y_hi - 1) / (y_hi + 1), work).hi
        if k != 0:
            if work not in _LN2_CACHE:
                _LN2_CACHE[work] = _atanh_series(Fraction(1, 3), work)
            ln2 = _LN2_CACHE[work]
            ln2k = ln2.scale(Fraction(k))
            lo, hi = lo + ln2k.lo, hi + ln2k.hi
        result = Interval(lo, hi).outward(work)
        if result.width <= Fraction(1, 1 << bits):
            return result
        work *= 2


def log2_enclosure(x: Fraction, bits: int) -> Interval:
    """Enclosure of log2(x) for x > 0 with width at most 2^-bits."""
    work = bits + 4
    while True:
        num = ln_enclosure(x, work)
        if num.lo == num.hi == 0:
            return Interval.point(_ZERO)
        den = ln_enclosure(Fraction(2), work)
        result = num / den
        if result.width <= Fraction(1, 1 << bits):
            return result
        work *= 2


def format_decimal(x: Fraction, digits: int) -> str:
    """Exact decimal rendering of x truncated toward zero at `digits` places."""
    sign = "-" if x < 0 else ""
    x = abs(x)
    scaled = x.numerator * 10**digits // x.denominator
    whole, frac = divmod(scaled, 10**digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{str(frac).zfill(digits)}"


def decimal_enclosure_str(iv: Interval, digits: int = 12) -> str:
    return f"[{format_decimal(iv.lo, digits)}, {format_decimal(iv.hi, digits)}]"
