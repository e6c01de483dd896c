"""Field-generic exact solvers for the anchored utility fixpoint system.

The system v(s) = opt_a f_s * sum_t p(s,a,t) v(t), with v fixed to 1 on the
target anchor and 0 on the zero anchor, is solved by policy iteration (one
player) or strategy iteration over the minimizing player with a policy
iteration inner loop (two players). Coefficients live in an arbitrary ordered
field: exact rationals for the rounded game, radical-extension elements for
the symbolic one. MAX picks the pointwise smallest option, MIN the largest.

Policy evaluation computes the true utility of the profile: states that can
reach neither an anchor nor a leaky row (a positive-reward state) under the
profile accrue no further reward and are pinned to 1; the remaining linear
system is then nonsingular and solved by exact Gaussian elimination.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Generic, Sequence, TypeVar

from .core import Owner

__all__ = ["FieldOps", "System", "ResourceLimitError", "evaluate_policy", "solve",
           "solve_enumerate", "value_iteration_sweeps", "q_value"]

log = logging.getLogger(__name__)

V = TypeVar("V")

_MAX_ITERATIONS = 100_000


class ResourceLimitError(RuntimeError):
    """Raised when an iterative solve exceeds its iteration guard."""


@dataclass(frozen=True)
class FieldOps(Generic[V]):
    zero: V
    one: V
    from_fraction: Callable[[Fraction], V]
    is_zero: Callable[[V], bool]
    invert: Callable[[V], V]

    def is_less(self, a: V, b: V) -> bool:
        return a < b


FRACTION_OPS: FieldOps[Fraction] = FieldOps(
    zero=Fraction(0),
    one=Fraction(1),
    from_fraction=Fraction,
    is_zero=lambda v: v == 0,
    invert=lambda v: 1 / v,
)


@dataclass
class System(Generic[V]):
    """Anchored Bellman system over a field.

    `rows[s][a]` lists (successor, coefficient) with the state factor f_s
    already folded into every coefficient. `anchor` maps boundary states to
    their fixed values; `leaky[s]` marks rows whose coefficients sum below one
    (positive reward), which drain toward the implicit sink.
    """

    n: int
    owner: Sequence[Owner]
    rows: Sequence[Sequence[Sequence[tuple[int, V]]]]
    anchor: dict[int, V]
    leaky: Sequence[bool]
    ops: FieldOps[V]

    def free_states(self) -> list[int]:
        return [s for s in range(self.n) if s not in self.anchor]


def q_value(system: System[V], values: list[V], s: int, a: int) -> V:
    total = system.ops.zero
    for t, coeff in system.rows[s][a]:
        total = total + coeff * values[t]
    return total


def _stalled_states(system: System[V], policy: dict[int, int]) -> set[int]:
    """Free states from which the profile reaches neither an anchor nor a leak."""
    free = set(policy)
    good = set(system.anchor) | {s for s in free if system.leaky[s]}
    reverse: dict[int, list[int]] = {}
    for s in free:
        for t, _ in system.rows[s][policy[s]]:
            reverse.setdefault(t, []).append(s)
    seen = set(good)
    queue = list(good)
    while queue:
        node = queue.pop()
        for pred in reverse.get(node, ()):
            if pred not in seen:
                seen.add(pred)
                queue.append(pred)
    return free - seen


def evaluate_policy(system: System[V], policy: dict[int, int]) -> list[V]:
    """Exact utility of a fixed MD profile on every state."""
    ops = system.ops
    values: list[V] = [ops.zero] * system.n
    known: dict[int, V] = dict(system.anchor)
    for s in _stalled_states(system, policy):
        known[s] = ops.one
    unknown = [s for s in range(system.n) if s not in known]
    if unknown:
        pos = {s: i for i, s in enumerate(unknown)}
        k = len(unknown)
        matrix = [[ops.zero] * k for _ in range(k)]
        rhs = [ops.zero] * k
        for s in unknown:
            i = pos[s]
            matrix[i][i] = matrix[i][i] + ops.one
            for t, coeff in system.rows[s][policy[s]]:
                if t in pos:
                    j = pos[t]
                    matrix[i][j] = matrix[i][j] - coeff
                else:
                    rhs[i] = rhs[i] + coeff * known[t]
        solution = _gaussian_solve(matrix, rhs, ops)
        for s in unknown:
            known[s] = solution[pos[s]]
    for s, v in known.items():
        values[s] = v
    return values


def _gaussian_solve(matrix: list[list[V]], rhs: list[V], ops: FieldOps[V]) -> list[V]:
    """Classical exact elimination; pivots are the first nonzero per column."""
    n = len(matrix)
    m = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not ops.is_zero(m[r][col])), None)
        if pivot is None:
            raise ArithmeticError("singular policy-evaluation system")
        m[col], m[pivot] = m[pivot], m[col]
        inv = ops.invert(m[col][col])
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and not ops.is_zero(m[r][col]):
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    if log.isEnabledFor(logging.DEBUG):
        bits = max(_bit_size(m[i][n]) for i in range(n)) if n else 0
        log.debug("gaussian solve: %d unknowns, max solution bit size %d", n, bits)
    return [m[i][n] for i in range(n)]


def _bit_size(v) -> int:
    if isinstance(v, Fraction):
        return v.numerator.bit_length() + v.denominator.bit_length()
    return max(
        c.numerator.bit_length() + c.denominator.bit_length() for c in v.coords
    )


def _improve(
    system: System[V], policy: dict[int, int], values: list[V], player: Owner
) -> bool:
    """Greedy strict improvement for `player`; ties keep the incumbent.

    MAX switches to a strictly smaller one-step value, MIN to a strictly
    larger one; among strict improvements the best value wins and equal best
    values resolve to the lowest action index. Strictness keeps every switch
    from opening a zero-reward cycle the evaluation would pin to 1.
    """
    ops = system.ops
    changed = False
    for s in policy:
        if system.owner[s] is not player:
            continue
        incumbent = q_value(system, values, s, policy[s])
        best_a = None
        best_q = incumbent
        for a in range(len(system.rows[s])):
            if a == policy[s]:
                continue
            q = q_value(system, values, s, a)
            better = ops.is_less(q, best_q) if player is Owner.MAX else ops.is_less(best_q, q)
            if better:
                best_a, best_q = a, q
        if best_a is not None:
            policy[s] = best_a
            changed = True
    return changed


def _policy_iteration(
    system: System[V], policy: dict[int, int], player: Owner
) -> list[V]:
    for _ in range(_MAX_ITERATIONS):
        values = evaluate_policy(system, policy)
        if not _improve(system, policy, values, player):
            return values
    raise ResourceLimitError("policy iteration exceeded the iteration guard")


def solve(system: System[V]) -> tuple[list[V], dict[int, int]]:
    """Optimal values and a witnessing MD profile.

    Initialization is the lowest-index policy (greedy w.r.t. the zero vector).
    With both players present, strategy iteration runs over MIN with the MAX
    policy-iteration solver as the inner best-response oracle.
    """
    policy = {s: 0 for s in system.free_states()}
    has_max = any(system.owner[s] is Owner.MAX for s in policy)
    has_min = any(system.owner[s] is Owner.MIN for s in policy)
    if has_max and has_min:
        for _ in range(_MAX_ITERATIONS):
            values = _policy_iteration(system, policy, Owner.MAX)
            if not _improve(system, policy, values, Owner.MIN):
                return values, policy
        raise ResourceLimitError("strategy iteration exceeded the iteration guard")
    if has_max or has_min:
        player = Owner.MAX if has_max else Owner.MIN
        values = _policy_iteration(system, policy, player)
        return values, policy
    return evaluate_policy(system, policy), policy


def solve_enumerate(system: System[V]) -> tuple[list[V], dict[int, int]]:
    """Exhaustive max-min over MD profiles; exponential, used as a fallback.

    For each MAX assignment, the worst (largest) initial-state value over all
    MIN assignments is taken; the MAX assignment minimizing that is returned.
    Values are compared at every state lexicographically from state 0 to keep
    the outcome deterministic.
    """
    free = system.free_states()
    max_states = [s for s in free if system.owner[s] is Owner.MAX]
    min_states = [s for s in free if system.owner[s] is Owner.MIN]
    if len(max_states) + len(min_states) > 24:
        raise ResourceLimitError("profile enumeration limited to 24 choice states")

    def assignments(states: list[int]):
        if not states:
            yield {}
            return
        head, *tail = states
        for rest in assignments(tail):
            for a in range(len(system.rows[head])):
                yield {head: a, **rest}

    ops = system.ops
    best_vals: list[V] | None = None
    best_profile: dict[int, int] | None = None
    for sigma in assignments(max_states):
        worst_vals: list[V] | None = None
        worst_profile = None
        for tau in assignments(min_states):
            policy = {**sigma, **tau}
            vals = evaluate_policy(system, policy)
            if worst_vals is None or _lex_less(worst_vals, vals, ops):
                worst_vals, worst_profile = vals, policy
        assert worst_vals is not None and worst_profile is not None
        if best_vals is None or _lex_less(worst_vals, best_vals, ops):
            best_vals, best_profile = worst_vals, worst_profile
    assert best_vals is not None and best_profile is not None
    return best_vals, best_profile


def _lex_less(a: list[V], b: list[V], ops: FieldOps[V]) -> bool:
    for x, y in zip(a, b):
        if ops.is_less(x, y):
            return True
        if ops.is_less(y, x):
            return False
    return False


def value_iteration_sweeps(system: System[V], sweeps: int) -> list[list[V]]:
    """Bellman sweeps from the all-zero start; monotone toward the least fixpoint."""
    ops = system.ops
    values = [system.anchor.get(s, ops.zero) for s in range(system.n)]
    history = [values[:]]
    for _ in range(sweeps):
        nxt = values[:]
        for s in range(system.n):
            if s in system.anchor:
                continue
            best = None
            for a in range(len(system.rows[s])):
                q = q_value(system, values, s, a)
                if best is None:
                    best = q
                elif system.owner[s] is Owner.MAX:
                    best = q if ops.is_less(q, best) else best
                else:
                    best = q if ops.is_less(best, q) else best
            nxt[s] = best if best is not None else ops.zero
        values = nxt
        history.append(values[:])
    return history
