"""Emitter for the threshold inequality system as an SMT-LIB QF_NRA problem.

One real variable per state; each constant b^(-gamma*r(s)) (and the threshold
bound b^(-gamma*t)) that is irrational is defined through repeated-squaring
chains: c_i = c_(i-1)^2 starting from the constant itself and d_i = d_(i-1)^2
starting from b, closed by a product constraint picking the binary digits of
the two exponents. Rational constants are inlined as exact literals. The
document is deterministic byte for byte.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .core import Game, GameValidationError, Owner, RiskParams
from .qualitative import BoundarySets
from .reduction import exact_factor

__all__ = ["emit_inequalities"]


def _smt_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return f"{x.numerator}.0" if x.numerator >= 0 else f"(- {-x.numerator}.0)"
    body = f"(/ {abs(x.numerator)}.0 {x.denominator}.0)"
    return body if x >= 0 else f"(- {body})"


def _bits_of(n: int) -> list[int]:
    """Indices of set bits, least significant first."""
    out, i = [], 0
    while n:
        if n & 1:
            out.append(i)
        n >>= 1
        i += 1
    return out


class _ChainWriter:
    """Shared repeated-squaring machinery for constants b^(num/den)."""

    def __init__(self, b: Fraction):
        self.b = b
        self.decls: list[str] = []
        self.asserts: list[str] = []
        self._d_len = 0  # d_i = b^(2^i) defined for i < _d_len

    def _ensure_b_chain(self, upto: int) -> None:
        while self._d_len <= upto:
            i = self._d_len
            self.decls.append(f"(declare-fun d{i} () Real)")
            if i == 0:
                # d0 = b, stated multiplicatively to keep integer literals
                self.asserts.append(
                    f"(assert (= (* {self.b.denominator}.0 d0) {self.b.numerator}.0))"
                )
            else:
                self.asserts.append(f"(assert (= d{i} (* d{i-1} d{i-1})))")
            self._d_len += 1

    def define_power(self, name: str, expo: Fraction) -> None:
        """Declare `name` and constrain name = b**expo (positive real root)."""
        num, den = expo.numerator, expo.denominator
        self.decls.append(f"(declare-fun {name} () Real)")
        self.asserts.append(f"(assert (> {name} 0.0))")
        for i in range(1, den.bit_length()):
            self.decls.append(f"(declare-fun {name}_c{i} () Real)")
        prev = name
        for i in range(1, den.bit_length()):
            self.asserts.append(f"(assert (= {name}_c{i} (* {prev} {prev})))")
            prev = f"{name}_c{i}"
        c_terms = [f"{name}_c{i}" if i else name for i in _bits_of(den)]
        d_terms = []
        if num:
            self._ensure_b_chain(max(_bits_of(abs(num))))
            d_terms = [f"d{i}" for i in _bits_of(abs(num))]
        c_prod = c_terms[0] if len(c_terms) == 1 else "(* " + " ".join(c_terms) + ")"
        if num == 0:
            self.asserts.append(f"(assert (= {c_prod} 1.0))")
        elif num > 0:
            d_prod = d_terms[0] if len(d_terms) == 1 else "(* " + " ".join(d_terms) + ")"
            self.asserts.append(f"(assert (= {c_prod} {d_prod}))")
        else:
            both = c_terms + d_terms
            self.asserts.append(f"(assert (= (* {' '.join(both)}) 1.0))")


def emit_inequalities(g: Game, rp: RiskParams, bounds: BoundarySets) -> str:
    """The inequality system deciding ERisk* >= t, as an SMT-LIB 2 document.

    Satisfiable iff the optimal entropic risk reaches the threshold (for
    stopping instances, where the anchored system pins the optimal value).
    """
    if rp.threshold is None:
        raise GameValidationError("threshold t is missing")
    gamma = rp.gamma_eff
    q = gamma.denominator
    chains = _ChainWriter(rp.b)
    factor_expr: dict[int, str] = {}
    for s in range(g.n_states):
        n_s = gamma.numerator * g.rewards[s]
        if n_s == 0:
            factor_expr[s] = "1.0"
            continue
        rational = exact_factor(rp.b, n_s, q)
        if rational is not None:
            factor_expr[s] = _smt_rational(rational)
        else:
            name = f"f{s}"
            gcd = math.gcd(n_s, q)
            chains.define_power(name, Fraction(-(n_s // gcd), q // gcd))
            factor_expr[s] = name

    thr_expo = -rp.gamma * rp.threshold
    thr_rational = exact_factor(rp.b, -thr_expo.numerator, thr_expo.denominator)
    if thr_rational is not None:
        thr_expr = _smt_rational(thr_rational)
    else:
        chains.define_power("thr", thr_expo)
        thr_expr = "thr"

    def rhs(s: int, a: int) -> str:
        terms = [
            f"(* {_smt_rational(p)} v{t})" for t, p in g.successors(s, a)
        ]
        total = terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"
        if factor_expr[s] == "1.0":
            return total
        return f"(* {factor_expr[s]} {total})"

    lines: list[str] = []
    lines.append("(set-logic QF_NRA)")
    lines.append("; entropic-risk threshold system")
    for s in range(g.n_states):
        lines.append(f"; v{s} <-> state {g.ids[s]}")
    for s in range(g.n_states):
        lines.append(f"(declare-fun v{s} () Real)")
    lines.extend(chains.decls)
    lines.extend(chains.asserts)
    lines.append(f"(assert (<= v{g.initial} {thr_expr}))")
    for s in sorted(bounds.sinf):
        lines.append(f"(assert (= v{s} 0.0))")
    for s in sorted(bounds.s0):
        lines.append(f"(assert (= v{s} 1.0))")
    for s in range(g.n_states):
        op = "<=" if g.owner[s] is Owner.MAX else ">="
        for a in g.actions(s):
            lines.append(f"(assert ({op} v{s} {rhs(s, a)}))")
    for s in range(g.n_states):
        eqs = [f"(= v{s} {rhs(s, a)})" for a in g.actions(s)]
        body = eqs[0] if len(eqs) == 1 else "(or " + " ".join(eqs) + ")"
        lines.append(f"(assert {body})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
