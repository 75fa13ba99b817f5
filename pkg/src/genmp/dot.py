"""Graphviz rendering: Max states are ellipses, Min states boxes."""

from __future__ import annotations

from .game import GameInstance, Owner


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(inst: GameInstance) -> str:
    g, r = inst.game, inst.rewards
    lines = [f"digraph {_q(inst.name)} {{"]
    for s in g.states:
        shape = "ellipse" if g.owner[s] is Owner.MAX else "box"
        reward = "(" + ", ".join(str(v) for v in r(s)) + ")"
        extra = ", penwidth=2" if s == g.initial else ""
        lines.append(f"  {_q(s)} [shape={shape}, label={_q(s + chr(10) + reward)}{extra}];")
    for s in g.states:
        for a in g.enabled[s]:
            dist = g.transitions[(s, a)]
            if len(dist) == 1:
                (t, p), = dist.items()
                lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(f'{a}:{p}')}];")
                continue
            # a random move gets its own small node
            mid = f"{s}.{a}"
            lines.append(f"  {_q(mid)} [shape=diamond, label=\"\", width=0.15, height=0.15];")
            lines.append(f"  {_q(s)} -> {_q(mid)} [label={_q(a)}];")
            for t, p in dist.items():
                lines.append(f"  {_q(mid)} -> {_q(t)} [label={_q(str(p))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
