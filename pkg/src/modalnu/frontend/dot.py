"""Graphviz export.

Conventions: may-only transitions are dashed, singleton musts solid, and a
disjunctive must is a solid line into a small junction point that fans out
to its alternatives. Initial states get a double border.
"""
from __future__ import annotations

from ..core import embed_lts, fmt_set, kind_of, render, ssorted


def _q(x):
    return '"' + render(x).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(system, graph_name="spec") -> str:
    from ..refinement import to_dmts

    kind = kind_of(system)
    d = embed_lts(system, "dmts") if kind == "lts" else to_dmts(system)
    lines = [f"digraph {_q(graph_name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for s in ssorted(d.states):
        extra = ", peripheries=2" if s in d.initials else ""
        lines.append(f"  {_q(s)} [label={_q(s)}{extra}];")
    covered = set()
    junctions = 0
    for s, n in sorted(d.must, key=lambda p: (render(p[0]), fmt_set(p[1]))):
        if len(n) == 1:
            (a, t), = n
            lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(a)}];")
        else:
            junctions += 1
            j = _q(f"_j{junctions}")
            lines.append(f"  {j} [shape=point, label=\"\"];")
            lines.append(f"  {_q(s)} -> {j} [arrowhead=none];")
            for a, t in ssorted(n):
                lines.append(f"  {j} -> {_q(t)} [label={_q(a)}];")
        covered |= {(s, a, t) for a, t in n}
    for s, a, t in sorted(d.may - covered, key=render):
        lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(a)}, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
