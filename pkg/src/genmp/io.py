"""Game files, certificate files and result documents (all JSON).

Numbers that must stay exact are strings ``"p/q"`` (or integers); JSON
floats are rejected when reading.  See ``docs/FORMATS.md`` for the grammar.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .game import GameInstance, GameValidationError, Owner, parse_rational, validate_game
from .games import ConpCertificate, NpCertificate


class FormatError(ValueError):
    """Unreadable input; ``line``/``column`` are set for JSON syntax errors."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


def _reject_float(text: str):
    raise ValueError(f"decimal number {text} is not exact; write it as 'p/q'")


def decode(text: str) -> Any:
    try:
        return json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_document(doc: Mapping[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_game(text: str) -> GameInstance:
    doc = decode(text)
    try:
        return validate_game(doc)
    except GameValidationError as exc:
        raise FormatError("invalid game: " + "; ".join(exc.violations)) from None


def game_document(inst: GameInstance) -> dict[str, Any]:
    """The file document of a game (declared actions only; thresholds already applied)."""
    g = inst.game
    prefix = "mdp-" if inst.mdp_tagged else ""
    states = []
    for s in g.states:
        states.append(
            {
                "id": s,
                "owner": prefix + g.owner[s].value,
                "reward": [str(v) for v in inst.rewards(s)],
                "transitions": {
                    a: [[t, str(p)] for t, p in g.transitions[(s, a)].items()] for a in g.enabled[s]
                },
            }
        )
    return {
        "name": inst.name,
        "dimensions": inst.rewards.dim,
        "actions": list(g.actions),
        "states": states,
        "initial": g.initial,
    }


def dump_game(inst: GameInstance) -> str:
    return dump_document(game_document(inst))


# -- certificates -------------------------------------------------------------


def load_certificate(text: str) -> ConpCertificate | NpCertificate:
    doc = decode(text)
    if not isinstance(doc, Mapping):
        raise FormatError("certificate must be an object")
    kind = doc.get("kind")
    try:
        if kind == "conp-fm":
            strategy = doc["strategy"]
            if not isinstance(strategy, Mapping) or not all(isinstance(v, str) for v in strategy.values()):
                raise FormatError("strategy must map states to actions")
            return ConpCertificate(dict(strategy), parse_rational(doc["bound"]), doc["state"], "fm")
        if kind == "np-as-sup":
            win = doc["win"]
            if not isinstance(win, list) or not all(isinstance(s, str) for s in win):
                raise FormatError("win must be a list of state ids")
            return NpCertificate(frozenset(win))
    except KeyError as exc:
        raise FormatError(f"certificate field missing: {exc.args[0]}") from None
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from None
    raise FormatError(f"unknown certificate kind {kind!r}")


def certificate_document(cert: ConpCertificate | NpCertificate, states_order: list[str] | None = None) -> dict[str, Any]:
    if isinstance(cert, ConpCertificate):
        return {
            "kind": "conp-fm",
            "state": cert.state,
            "bound": str(cert.bound),
            "strategy": dict(cert.strategy),
        }
    order = states_order or sorted(cert.win)
    return {"kind": "np-as-sup", "win": [s for s in order if s in cert.win]}


# -- strategies ----------------------------------------------------------------


def load_strategy(text: str) -> dict[str, Any]:
    """Strategy file: ``{"player": "max"|"min", "choices": {...}}`` or a transducer.

    ``choices`` maps a state to an action id or to ``{action: "p/q"}``.
    """
    doc = decode(text)
    if not isinstance(doc, Mapping) or doc.get("player") not in ("max", "min"):
        raise FormatError("strategy file needs player 'max' or 'min'")
    out: dict[str, Any] = {"player": Owner(doc["player"])}
    try:
        if "memory" in doc:
            out["transducer"] = {
                "memory": list(doc["memory"]),
                "initial": doc["initial"],
                "update": {m: dict(row) for m, row in doc["update"].items()},
                "next": {m: {a: parse_rational(p) for a, p in d.items()} for m, d in doc["next"].items()},
            }
        else:
            choices = {}
            for s, c in doc["choices"].items():
                choices[s] = {c: Fraction(1)} if isinstance(c, str) else {a: parse_rational(p) for a, p in c.items()}
            out["choices"] = choices
    except (KeyError, AttributeError, TypeError) as exc:
        raise FormatError(f"malformed strategy file: {exc}") from None
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return out


def strategy_document(player: Owner, strategy: Mapping[str, Mapping[str, Fraction]]) -> dict[str, Any]:
    choices: dict[str, Any] = {}
    for s, dist in strategy.items():
        if len(dist) == 1 and next(iter(dist.values())) == 1:
            choices[s] = next(iter(dist))
        else:
            choices[s] = {a: str(p) for a, p in dist.items()}
    return {"player": player.value, "choices": choices}


def values_document(values: Mapping[str, Fraction], order) -> dict[str, str]:
    return {s: str(values[s]) for s in order}


def parse_values(doc: Mapping[str, str]) -> dict[str, Fraction]:
    return {s: parse_rational(v) for s, v in doc.items()}
