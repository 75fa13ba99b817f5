"""Command-line interface.

Exit codes: 0 success / "yes" / certificate accepted, 1 "no" / certificate
rejected, 2 usage, parse or mode errors, 3 size-guard refusal.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from . import generators, io
from .dot import to_dot
from .game import GameInstance, Owner, StrategyError, TransducerStrategy, parse_rational
from .games import (
    ConpCertificate,
    SizeGuardError,
    check_conp_certificate_fm,
    check_np_certificate_assup,
    game_value_fm,
    game_value_inf_meaninf,
    memory_bound,
    peel_meansup,
)
from .mdp import (
    mdp_value_fm,
    mdp_value_inf,
    synthesize_randomized_memoryless,
    winning_ecs_finite,
    winning_mecs_infinite,
)
from .simulate import simulate

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3

MODES = ("mdp-fm", "mdp-inf-inf", "mdp-inf-sup", "game-fm", "game-inf-meaninf", "game-as-sup")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(doc: dict[str, Any]) -> None:
    sys.stdout.write(io.dump_document(doc))


def _ordered_set(inst: GameInstance, states) -> list[str]:
    return [s for s in inst.game.states if s in states]


def _solve(args) -> int:
    inst = io.load_game(_read(args.file))
    g, r = inst.game, inst.rewards
    state = args.state or g.initial
    if state not in g.owner:
        raise UsageError(f"unknown state {state!r}")
    threshold = None
    if args.threshold is not None:
        try:
            threshold = parse_rational(args.threshold)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if not 0 <= threshold <= 1:
            raise UsageError(f"threshold {threshold} outside [0,1]")

    started = time.perf_counter()
    doc: dict[str, Any] = {"instance": inst.name, "mode": args.mode, "state": state}
    mode = args.mode
    verdict = None
    if mode.startswith("mdp-"):
        if g.controller is not Owner.MAX:
            raise UsageError(f"mode {mode} needs an MDP controlled by Max; use a game-* mode")
        m = g.as_max_mdp()
        if mode == "mdp-fm":
            values = mdp_value_fm(m, r)
            winning = winning_ecs_finite(m, r)
        else:
            flavor = mode.rsplit("-", 1)[1]
            values = mdp_value_inf(m, r, flavor)
            winning = winning_mecs_infinite(m, r, flavor)
        doc["values"] = io.values_document(values, g.states)
        doc["winning_sets"] = [_ordered_set(inst, w) for w in winning]
        if args.synthesize:
            if mode != "mdp-fm":
                raise UsageError("--synthesize is available with --mode mdp-fm only")
            syn = synthesize_randomized_memoryless(m, r)
            doc["strategy"] = io.strategy_document(Owner.MAX, {s: syn.strategy[s] for s in g.states})
            doc["strategy"]["degenerate"] = syn.degenerate
    else:
        if args.synthesize:
            raise UsageError("--synthesize is available with --mode mdp-fm only")
        if mode == "game-as-sup":
            if threshold is not None:
                raise UsageError("game-as-sup computes the almost-sure set only; no --threshold")
            peel = peel_meansup(g, r, limit=args.max_adversaries)
            doc["winning_set"] = _ordered_set(inst, peel.win)
            doc["layers"] = [
                {
                    "dimension": layer.dim + 1,
                    "violating": _ordered_set(inst, layer.violating),
                    "removed": _ordered_set(inst, layer.removed),
                    "min_strategy": dict(layer.strategy),
                }
                for layer in peel.layers
            ]
            doc["contains_state"] = state in peel.win
        else:
            solver = game_value_fm if mode == "game-fm" else game_value_inf_meaninf
            verdict = solver(g, r, limit=args.max_adversaries, jobs=args.jobs)
            values = verdict.values
            doc["values"] = io.values_document(values, g.states)
            doc["witness"] = dict(verdict.witnesses[state])
            doc["uniform_witness"] = None if verdict.uniform_witness is None else dict(verdict.uniform_witness)
            if mode == "game-fm":
                doc["memory_bound"] = str(memory_bound(g))

    code = EXIT_OK
    if threshold is not None:
        holds = values[state] >= threshold
        doc["threshold"] = {"state": state, "lambda": str(threshold), "value": str(values[state]), "holds": holds}
        if not holds:
            code = EXIT_NO
            if verdict is not None:
                cert = ConpCertificate(dict(verdict.witnesses[state]), threshold, state, verdict.mode)
                doc["certificate"] = io.certificate_document(cert)
                doc["certificate"]["mode"] = verdict.mode
    doc["elapsed_ms"] = int((time.perf_counter() - started) * 1000)
    _emit(doc)
    return code


def _check(args) -> int:
    inst = io.load_game(_read(args.file))
    cert = io.load_certificate(_read(args.certificate))
    kind = "conp-fm" if isinstance(cert, ConpCertificate) else "np-as-sup"
    if args.kind and args.kind != kind:
        raise UsageError(f"certificate is of kind {kind}, not {args.kind}")
    started = time.perf_counter()
    if isinstance(cert, ConpCertificate):
        result = check_conp_certificate_fm(inst.game, inst.rewards, cert)
    else:
        result = check_np_certificate_assup(inst.game, inst.rewards, cert, limit=args.max_adversaries)
    doc = {
        "instance": inst.name,
        "kind": kind,
        "accepted": result.accepted,
        "reason": result.reason,
    }
    if result.value is not None:
        doc["value"] = str(result.value)
    doc["elapsed_ms"] = int((time.perf_counter() - started) * 1000)
    _emit(doc)
    return EXIT_OK if result.accepted else EXIT_NO


def _gen(args) -> int:
    try:
        if args.family == "fig-frequency":
            doc = generators.fig_frequency()
        elif args.family == "fig-not-connected":
            doc = generators.fig_not_connected()
        elif args.family == "exponential":
            if args.k is None:
                raise UsageError("exponential needs --k")
            doc = generators.exponential(args.k)
        else:
            if args.seed is None:
                raise UsageError("random needs --seed")
            doc = generators.random_game(args.seed, args.states, args.actions, args.dims, mdp=args.mdp)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = io.dump_document(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _export_dot(args) -> int:
    sys.stdout.write(to_dot(io.load_game(_read(args.file))))
    return EXIT_OK


def _simulate(args) -> int:
    inst = io.load_game(_read(args.file))
    strategies = {}
    for path in args.strategy or []:
        spec = io.load_strategy(_read(path))
        if spec["player"] in strategies:
            raise UsageError(f"two strategy files for player {spec['player'].value}")
        strategies[spec["player"]] = spec
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    try:
        res = simulate(inst, strategies, args.steps, args.seed)
    except StrategyError as exc:
        raise UsageError(str(exc)) from None
    _emit(
        {
            "instance": inst.name,
            "approximate": {
                "note": "empirical running average of one sampled run",
                "steps": res.steps,
                "seed": res.seed,
                "average": [float(v) for v in res.average],
                "average_exact": [str(v) for v in res.average],
            },
            "trajectory_tail": list(res.trajectory_tail),
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genmp", description="Exact solvers for generalized mean-payoff games and MDPs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def guard_options(p):
        p.add_argument("--max-adversaries", type=int, default=None,
                       help="refuse games with more Min strategies than this (default $GENMP_MAX_ADVERSARIES or 2^20)")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="worker processes for adversary enumeration")

    p = sub.add_parser("solve", help="compute values or winning sets")
    p.add_argument("file")
    p.add_argument("--mode", required=True, choices=MODES)
    p.add_argument("--state")
    p.add_argument("--threshold")
    p.add_argument("--synthesize", action="store_true")
    guard_options(p)
    p.set_defaults(run=_solve)

    p = sub.add_parser("check", help="verify a certificate")
    p.add_argument("file")
    p.add_argument("certificate")
    p.add_argument("--kind", choices=("conp-fm", "np-as-sup"))
    guard_options(p)
    p.set_defaults(run=_check)

    p = sub.add_parser("gen", help="generate a game file")
    p.add_argument("family", choices=("fig-frequency", "fig-not-connected", "exponential", "random"))
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--states", type=int, default=5)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--mdp", action="store_true", help="random: give every state to Max")
    p.add_argument("-o", "--output")
    p.set_defaults(run=_gen)

    p = sub.add_parser("export-dot", help="render a game file as Graphviz DOT")
    p.add_argument("file")
    p.set_defaults(run=_export_dot)

    p = sub.add_parser("simulate", help="seeded Monte Carlo run (approximate)")
    p.add_argument("file")
    p.add_argument("--strategy", action="append", help="strategy file; repeat for both players")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except SizeGuardError as exc:
        print(f"genmp: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, io.FormatError, StrategyError) as exc:
        print(f"genmp: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
