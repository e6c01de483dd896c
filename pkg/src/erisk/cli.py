"""Command-line surface: analyze | reduce | approx | exact | threshold | emit-smt | simulate.

Human-readable output by default, one JSON document on stdout under --json.
Exit codes: 0 success, 1 usage error, 2 input validation error, 3 resource
limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from fractions import Fraction

from . import exact as exact_mod
from . import numeric, sim
from ._solver import ResourceLimitError
from .core import (
    Game,
    GameValidationError,
    Owner,
    RiskParams,
    Strategy,
    load_game,
    parse_fraction,
)
from .enclose import decimal_enclosure_str, format_decimal
from .encode import emit_inequalities
from .qualitative import analyze
from .reduction import build_rounded_game, compute_precision_bits

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3


def _fraction_arg(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except GameValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erisk",
        description="Entropic-risk solver for stochastic games with total reward",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: ERISK_THREADS or available parallelism)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("game", help="game description (JSON)")
        return p

    add("analyze", "print the boundary sets and the stopping flag")
    p = add("reduce", "dump the rounded reachability game")
    p.add_argument("--epsilon", type=_fraction_arg, default=None)
    p.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p = add("approx", "approximate ERisk* within epsilon")
    p.add_argument("--epsilon", type=_fraction_arg, default=None)
    p.add_argument("--emit-strategy", default=None, metavar="PATH")
    p.add_argument("--dump-values", action="store_true")
    p = add("exact", "exact algebraic value of ERisk*")
    p.add_argument("--digits", type=int, default=12, help="decimal digits printed")
    p.add_argument(
        "--method", choices=("auto", "enumerate"), default="auto",
        help="auto: policy/strategy iteration; enumerate: exhaustive MD profiles",
    )
    p = add("threshold", "decide ERisk* >= t")
    p.add_argument("--t", type=_fraction_arg, default=None, help="threshold override")
    p = add("emit-smt", "write the inequality system as SMT-LIB")
    p.add_argument("--t", type=_fraction_arg, default=None, help="threshold override")
    p.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p = add("simulate", "Monte Carlo estimate of a strategy profile's utility")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", default=None, metavar="PATH", help="profile JSON")
    return parser


def _strategies_json(game: Game, smax: Strategy, smin: Strategy) -> dict:
    out: dict = {}
    if any(o is Owner.MAX for o in game.owner):
        out["max"] = smax.to_json(game)
    if any(o is Owner.MIN for o in game.owner):
        out["min"] = smin.to_json(game)
    return out


def _load_profile(path: str, game: Game) -> tuple[Strategy, Strategy]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    choices: dict[Owner, dict[int, int]] = {Owner.MAX: {}, Owner.MIN: {}}
    flat = {}
    for key in ("max", "min"):
        flat.update(doc.get(key, {}))
    for sid, label in flat.items():
        s = game.index_of(sid)
        try:
            a = game.action_labels[s].index(label)
        except ValueError:
            raise GameValidationError(
                f"unknown action {label!r}", f"state {sid!r}"
            ) from None
        choices[game.owner[s]][s] = a
    smax = Strategy(player=Owner.MAX, choice=choices[Owner.MAX])
    smin = Strategy(player=Owner.MIN, choice=choices[Owner.MIN])
    smax.validate(game)
    smin.validate(game)
    return smax, smin


def _default_profile(game: Game) -> tuple[Strategy, Strategy]:
    maxc = {s: 0 for s in range(game.n_states) if game.owner[s] is Owner.MAX}
    minc = {s: 0 for s in range(game.n_states) if game.owner[s] is Owner.MIN}
    return Strategy(player=Owner.MAX, choice=maxc), Strategy(player=Owner.MIN, choice=minc)


def _cmd_analyze(game: Game, rp: RiskParams, args) -> dict:
    bounds, stopping = analyze(game)
    return {
        "S0": sorted(game.ids[s] for s in bounds.s0),
        "Sinf": sorted(game.ids[s] for s in bounds.sinf),
        "stopping": stopping,
    }


def _require_epsilon(rp: RiskParams, override: Fraction | None) -> RiskParams:
    eps = override if override is not None else rp.epsilon
    if eps is None:
        raise GameValidationError("epsilon is required (flag --epsilon or params.epsilon)")
    return replace(rp, epsilon=eps)


def _cmd_reduce(game: Game, rp: RiskParams, args) -> dict:
    rp = _require_epsilon(rp, args.epsilon)
    bounds, _ = analyze(game)
    plan = compute_precision_bits(game, rp)
    rg = build_rounded_game(game, rp, plan, bounds)
    doc = rg.to_json(rp)
    text = json.dumps(doc, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        return {"written": args.output, "precision_bits": plan.bits}
    return doc


def _cmd_approx(game: Game, rp: RiskParams, args) -> dict:
    rp = _require_epsilon(rp, args.epsilon)
    result = numeric.approximate_erisk(game, rp)
    out: dict = {"epsilon": str(rp.epsilon)}
    if result.erisk.infinite:
        out["erisk"] = "inf"
    else:
        out["erisk_lo"] = str(result.erisk.lo)
        out["erisk_hi"] = str(result.erisk.hi)
        out["erisk_decimal"] = [
            format_decimal(result.erisk.lo, 12),
            format_decimal(result.erisk.hi, 12),
        ]
    if result.utility is not None:
        out["utility"] = str(result.utility)
    out["strategies"] = _strategies_json(game, result.strategy_max, result.strategy_min)
    if args.dump_values and result.values is not None:
        out["values"] = {
            game.ids[s]: str(result.values.values[s]) for s in range(game.n_states)
        }
    if args.emit_strategy:
        with open(args.emit_strategy, "w", encoding="utf-8") as fh:
            json.dump(out["strategies"], fh, indent=2)
            fh.write("\n")
    return out


def _cmd_exact(game: Game, rp: RiskParams, args) -> dict:
    bounds, _ = analyze(game)
    if not bounds.s0:
        return {"erisk": "inf", "utility": "0"}
    sol = exact_mod.optimize_exact(game, rp, bounds, method=args.method)
    ext = sol.extension
    digits = args.digits
    tol = Fraction(1, 10 ** max(1, digits))
    u_enc = sol.utility_enclosure(bits=4 * digits + 16)
    e_enc = sol.erisk_enclosure(rp, tol=tol)
    out = {
        "extension": {
            "minimal_polynomial": f"x^{ext.degree} - {ext.base_normalized}",
            "degree": ext.degree,
            "scale_divisor": ext.scale_divisor,
        },
        "utility_coords": [str(c) for c in sol.value.coords],
        "utility_enclosure": [str(u_enc.lo), str(u_enc.hi)],
        "utility_decimal": decimal_enclosure_str(u_enc, digits),
        "strategies": _strategies_json(game, sol.strategy_max, sol.strategy_min),
    }
    if e_enc.infinite:
        out["erisk"] = "inf"
    else:
        out["erisk_enclosure"] = [str(e_enc.lo), str(e_enc.hi)]
        out["erisk_decimal"] = [
            format_decimal(e_enc.lo, digits),
            format_decimal(e_enc.hi, digits),
        ]
    return out


def _cmd_threshold(game: Game, rp: RiskParams, args) -> dict:
    if args.t is not None:
        rp = replace(rp, threshold=args.t)
    if rp.threshold is None:
        raise GameValidationError("threshold is required (flag --t or params.threshold)")
    result = exact_mod.decide_threshold(game, rp)
    out = {
        "threshold": str(rp.threshold),
        "answer": "YES" if result.satisfied else "NO",
    }
    if result.solution is not None:
        out["strategies"] = _strategies_json(
            game, result.solution.strategy_max, result.solution.strategy_min
        )
    return out


def _cmd_emit_smt(game: Game, rp: RiskParams, args) -> dict:
    if args.t is not None:
        rp = replace(rp, threshold=args.t)
    if rp.threshold is None:
        raise GameValidationError("threshold is required (flag --t or params.threshold)")
    bounds, _ = analyze(game)
    text = emit_inequalities(game, rp, bounds)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        return {"written": args.output}
    return {"smt": text}


def _cmd_simulate(game: Game, rp: RiskParams, args, threads: int) -> dict:
    if args.strategy:
        profile = _load_profile(args.strategy, game)
    else:
        profile = _default_profile(game)
    result = sim.estimate_utility(
        game, rp, profile, samples=args.samples, seed=args.seed, threads=threads
    )
    return {
        "samples": result.samples,
        "estimate_lo": str(result.estimate_lo),
        "estimate_hi": str(result.estimate_hi),
        "estimate_decimal": format_decimal(result.estimate, 9),
        "ci_lo": format_decimal(result.ci_lo, 9),
        "ci_hi": format_decimal(result.ci_hi, 9),
        "confidence": str(result.confidence),
        "bracketed_trajectories": result.floored,
    }


def _render_human(doc: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, value in doc.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_render_human(value, indent + 1))
        elif isinstance(value, list):
            lines.append(f"{pad}{key}: {', '.join(str(v) for v in value) or '(none)'}")
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    threads = args.threads
    if threads is None:
        try:
            threads = int(os.environ.get("ERISK_THREADS", "0"))
        except ValueError:
            threads = 0
        threads = threads or (os.cpu_count() or 1)
    try:
        game, rp = load_game(args.game)
        if args.command == "analyze":
            doc = _cmd_analyze(game, rp, args)
        elif args.command == "reduce":
            doc = _cmd_reduce(game, rp, args)
        elif args.command == "approx":
            doc = _cmd_approx(game, rp, args)
        elif args.command == "exact":
            doc = _cmd_exact(game, rp, args)
        elif args.command == "threshold":
            doc = _cmd_threshold(game, rp, args)
        elif args.command == "emit-smt":
            doc = _cmd_emit_smt(game, rp, args)
        elif args.command == "simulate":
            doc = _cmd_simulate(game, rp, args, threads)
        else:  # pragma: no cover
            parser.error(f"unknown command {args.command!r}")
            return EXIT_USAGE
    except GameValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if args.json:
        print(json.dumps(doc, indent=2))
    elif args.command == "emit-smt" and "smt" in doc:
        sys.stdout.write(doc["smt"])
    else:
        print(_render_human(doc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
