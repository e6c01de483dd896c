"""Exact arithmetic in the simple radical extension Q(b^(1/q)).

A number is a rational coordinate vector over the basis
(1, beta, beta^2, ..., beta^(q'-1)) where beta is the positive real root of
the irreducible polynomial x^q' - b'. The pair (b', q') comes from
normalizing the requested (b, q): pulling out the largest divisor d of q such
that both numerator and denominator of b are perfect d-th powers. Zero tests
and field operations are exact; only sign determination of a nonzero element
consults a refinable interval enclosure of beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .enclose import Interval, iroot_floor, pow_enclosure

__all__ = [
    "Extension",
    "AlgebraicRep",
    "normalize_extension",
    "represent_power",
    "root_power",
    "multiply",
    "invert",
    "sign_of",
    "lift",
    "embed",
]


def _perfect_root(n: int, k: int) -> int | None:
    r = iroot_floor(n, k)
    return r if r**k == n else None


class Extension:
    """The field Q(b^(1/q)), normalized so x^q' - b' is irreducible.

    `root_value` b'^(1/q') equals b^(1/q) exactly; `scale_divisor` is the
    divisor d pulled out of q during normalization (q' = q/d).
    """

    def __init__(self, base: Fraction, degree: int):
        if base <= 0 or base == 1:
            raise ValueError(f"extension base must be positive and not 1, got {base}")
        if degree < 1:
            raise ValueError(f"extension degree must be positive, got {degree}")
        b1, b2 = base.numerator, base.denominator
        d = 1
        for cand in range(degree, 0, -1):
            if degree % cand:
                continue
            r1, r2 = _perfect_root(b1, cand), _perfect_root(b2, cand)
            if r1 is not None and r2 is not None:
                d, b1, b2 = cand, r1, r2
                break
        self.base = base
        self.degree_requested = degree
        self.scale_divisor = d
        self.base_normalized = Fraction(b1, b2)
        self.degree = degree // d
        for p in _prime_divisors(self.degree):
            if _perfect_root(b1, p) is not None and _perfect_root(b2, p) is not None:
                raise AssertionError("normalization left a reducible radical")
        self._enclosure_bits = 0
        self._enclosure: Interval | None = None
        self._mul_table = _multiplication_table(self.base_normalized, self.degree)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Extension)
            and self.base == other.base
            and self.degree_requested == other.degree_requested
        )

    def __repr__(self) -> str:
        return f"Extension(x^{self.degree} - {self.base_normalized})"

    def root_enclosure(self, bits: int) -> Interval:
        """Refinable enclosure of beta = b'^(1/q'); cached at the best precision seen."""
        if self._enclosure is None or self._enclosure_bits < bits:
            self._enclosure = pow_enclosure(
                self.base_normalized, Fraction(1, self.degree), bits
            )
            self._enclosure_bits = bits
        return self._enclosure

    def zero(self) -> "AlgebraicRep":
        return AlgebraicRep(self, (Fraction(0),) * self.degree)

    def one(self) -> "AlgebraicRep":
        return self.from_rational(Fraction(1))

    def from_rational(self, c: Fraction | int) -> "AlgebraicRep":
        coords = [Fraction(0)] * self.degree
        coords[0] = Fraction(c)
        return AlgebraicRep(self, tuple(coords))


def _prime_divisors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _multiplication_table(base: Fraction, q: int) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
    """m[l][h] = (index, coeff) with beta^l * beta^h = coeff * beta^index."""
    table = []
    for l in range(q):
        row = []
        for h in range(q):
            if l + h < q:
                row.append((l + h, Fraction(1)))
            else:
                row.append((l + h - q, base))
        table.append(tuple(row))
    return tuple(table)


@dataclass(frozen=True)
class AlgebraicRep:
    """An element of Q(b^(1/q)) as coordinates over (1, beta, ..., beta^(q'-1))."""

    ext: Extension = field(compare=False)
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.ext.degree:
            raise ValueError("coordinate vector length must equal the extension degree")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is irrational")
        return self.coords[0]

    def _check(self, other: "AlgebraicRep") -> None:
        if self.ext != other.ext:
            raise ValueError("operands live in different extensions")

    def __add__(self, other: "AlgebraicRep") -> "AlgebraicRep":
        self._check(other)
        return AlgebraicRep(self.ext, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AlgebraicRep") -> "AlgebraicRep":
        self._check(other)
        return AlgebraicRep(self.ext, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AlgebraicRep":
        return AlgebraicRep(self.ext, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, AlgebraicRep):
            return multiply(self, other)
        return self.scale(Fraction(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, AlgebraicRep):
            return multiply(self, invert(other))
        return self.scale(1 / Fraction(other))

    def scale(self, c: Fraction) -> "AlgebraicRep":
        return AlgebraicRep(self.ext, tuple(a * c for a in self.coords))

    def sign(self) -> int:
        return sign_of(self)

    def __lt__(self, other: "AlgebraicRep") -> bool:
        return sign_of(self - other) < 0

    def __le__(self, other: "AlgebraicRep") -> bool:
        return sign_of(self - other) <= 0

    def __gt__(self, other: "AlgebraicRep") -> bool:
        return sign_of(self - other) > 0

    def __ge__(self, other: "AlgebraicRep") -> bool:
        return sign_of(self - other) >= 0

    def enclosure(self, bits: int) -> Interval:
        """Certified interval around the represented real."""
        beta = self.ext.root_enclosure(bits)
        total = Interval.point(Fraction(0))
        power = Interval.point(Fraction(1))
        for i, c in enumerate(self.coords):
            if i:
                power = power * beta
            if c:
                total = total + power.scale(c)
        return total


def normalize_extension(b: Fraction, q: int) -> tuple[Extension, int]:
    """Normalize Q(b^(1/q)); returns the extension and the pulled-out divisor d."""
    ext = Extension(b, q)
    return ext, ext.scale_divisor


def root_power(ext: Extension, m: int, c: Fraction | int = 1) -> AlgebraicRep:
    """c * (b^(1/q))^m as an element of the normalized extension, any integer m.

    Reduces beta^m with beta^q' = b': m = k*q' + l (floor division) gives
    c * b'^k at coordinate l.
    """
    k, l = divmod(m, ext.degree)
    coords = [Fraction(0)] * ext.degree
    coords[l] = Fraction(c) * ext.base_normalized**k
    return AlgebraicRep(ext, tuple(coords))


def represent_power(c: Fraction | int, n: int, ext: Extension) -> AlgebraicRep:
    """Representation of c * b'^(-n/q') for natural n: single nonzero coordinate.

    n = k*q' + l with 0 <= l < q'; for l = 0 the value is c*b'^(-k) at e_0,
    otherwise c*b'^(-k-1) at e_(q'-l), using b'^(-n/q') = b'^(-k-1) * beta^(q'-l).
    """
    if n < 0:
        raise ValueError("represent_power takes a natural exponent")
    return root_power(ext, -n, c)


def multiply(x: AlgebraicRep, y: AlgebraicRep) -> AlgebraicRep:
    x._check(y)
    q = x.ext.degree
    coords = [Fraction(0)] * q
    table = x.ext._mul_table
    for l, xl in enumerate(x.coords):
        if not xl:
            continue
        row = table[l]
        for h, yh in enumerate(y.coords):
            if not yh:
                continue
            idx, coeff = row[h]
            coords[idx] += xl * yh * coeff
    return AlgebraicRep(x.ext, tuple(coords))


def invert(x: AlgebraicRep) -> AlgebraicRep:
    """Multiplicative inverse via the q' x q' rational linear system x * y = 1."""
    if x.is_zero():
        raise ZeroDivisionError("inversion of zero in the extension field")
    q = x.ext.degree
    if x.is_rational():
        return x.ext.from_rational(1 / x.coords[0])
    # column h of the matrix holds the coordinates of x * beta^h
    matrix = [[Fraction(0)] * q for _ in range(q)]
    table = x.ext._mul_table
    for l, xl in enumerate(x.coords):
        if not xl:
            continue
        for h in range(q):
            idx, coeff = table[l][h]
            matrix[idx][h] += xl * coeff
    rhs = [Fraction(0)] * q
    rhs[0] = Fraction(1)
    solution = _solve_rational(matrix, rhs)
    return AlgebraicRep(x.ext, tuple(solution))


def _solve_rational(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(matrix)
    m = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        m[col], m[pivot] = m[pivot], m[col]
        pv = m[col][col]
        m[col] = [v / pv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def sign_of(x: AlgebraicRep) -> int:
    """Exact sign: 0 iff the coordinate vector is zero, else by enclosure refinement."""
    if x.is_zero():
        return 0
    if x.is_rational():
        c = x.coords[0]
        return (c > 0) - (c < 0)
    bits = 32
    while True:
        iv = x.enclosure(bits)
        if iv.lo > 0:
            return 1
        if iv.hi < 0:
            return -1
        bits *= 2
        if bits > 1 << 20:
            raise RuntimeError("sign refinement exceeded precision guard")


def lift(x: AlgebraicRep, target_degree: int) -> AlgebraicRep:
    """Re-express x over the basis of Q(b'^(1/L)) for L a multiple of q'.

    Errors when q' does not divide L after the degree-L instance of the same
    b' is normalized; when normalization is trivial this is the pure index map
    e_i -> e_(i*L/q').
    """
    q = x.ext.degree
    if target_degree % q:
        raise ValueError(
            f"target degree {target_degree} is not a multiple of the current degree {q}"
        )
    target = Extension(x.ext.base_normalized, target_degree)
    step = target_degree // q
    out = target.zero()
    for i, c in enumerate(x.coords):
        if c:
            out = out + root_power(target, i * step, c)
    return out


def embed(x: AlgebraicRep, target: Extension) -> AlgebraicRep:
    """Embed x in a larger extension of the *same original* (b, q | q2).

    Coordinate i of x stands for (b^(1/q1))^i = (b^(1/q2))^(i * q2/q1);
    reduction against the target's minimal polynomial is exact.
    """
    if target.base != x.ext.base:
        raise ValueError("embedding requires extensions of the same base")
    q1, q2 = x.ext.degree_requested, target.degree_requested
    if q2 % q1:
        raise ValueError(f"cannot embed degree {q1} into non-multiple degree {q2}")
    step = q2 // q1
    out = target.zero()
    for i, c in enumerate(x.coords):
        if c:
            out = out + root_power(target, i * step, c)
    return out
