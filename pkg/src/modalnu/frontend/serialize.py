"""Serialization back into the ``.spec`` grammar.

Output is deterministic (everything sorted by name) and binary formula
operators are always parenthesized, so ``parse(serialize(x))`` gives back
exactly ``x``.
"""
from __future__ import annotations

import re

from ..core import (
    And,
    Box,
    Diamond,
    Ff,
    Not,
    Or,
    Tt,
    Var,
    fmt_set,
    kind_of,
    render,
    ssorted,
    states_of,
    stringify,
)

_IDENT = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_'.]*\Z")
_RESERVED = {"tt", "ff"}


def name(x) -> str:
    text = render(x)
    if _IDENT.match(text) and text not in _RESERVED:
        return text
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def names(xs) -> str:
    return ", ".join(name(x) for x in ssorted(xs))


def pair_set(pairs) -> str:
    inner = ", ".join(f"{name(a)} {name(t)}" for a, t in ssorted(pairs))
    return "{ " + inner + " }" if inner else "{ }"


def formula(f) -> str:
    if isinstance(f, Tt):
        return "tt"
    if isinstance(f, Ff):
        return "ff"
    if isinstance(f, Var):
        return name(f.name)
    if isinstance(f, Diamond):
        return f"<{name(f.action)}>{formula(f.body)}"
    if isinstance(f, Box):
        return f"[{name(f.action)}]{formula(f.body)}"
    if isinstance(f, Not):
        return f"!{formula(f.body)}"
    if isinstance(f, And):
        return f"({formula(f.left)} & {formula(f.right)})"
    if isinstance(f, Or):
        return f"({formula(f.left)} | {formula(f.right)})"
    raise TypeError(f"not a formula: {f!r}")


def _list_clause(word, xs):
    return f"  {word} {names(xs)};" if xs else f"  {word};"


def serialize_system(system, sysname) -> str:
    kind = kind_of(system)
    if any(not isinstance(s, str) for s in states_of(system)):
        system = stringify(system)
    lines = [f"system {kind} {name(sysname)} {{"]
    lines.append(_list_clause("alphabet", system.alphabet))
    lines.append(_list_clause("states", states_of(system)))
    if system.initials:
        lines.append(f"  initial {names(system.initials)};")
    if kind == "lts":
        for s, a, t in sorted(system.trans, key=render):
            lines.append(f"  trans {name(s)} {name(a)} {name(t)};")
    elif kind == "dmts":
        for s, a, t in sorted(system.may, key=render):
            lines.append(f"  may {name(s)} {name(a)} {name(t)};")
        for s, n in sorted(system.must, key=lambda p: (render(p[0]), fmt_set(p[1]))):
            lines.append(f"  must {name(s)} {pair_set(n)};")
    elif kind == "aa":
        for s in ssorted(system.states):
            sets = " ".join(pair_set(m) for m in sorted(system.tran[s], key=fmt_set))
            lines.append(f"  tran {name(s)} {sets};" if sets else f"  tran {name(s)};")
    elif kind == "nu":
        for x in ssorted(system.vars):
            for n in sorted(system.diamond[x], key=fmt_set):
                lines.append(f"  diamond {name(x)} {pair_set(n)};")
        for (x, a) in sorted(system.box, key=render):
            if system.box[(x, a)]:
                lines.append(f"  box {name(x)} {name(a)} {{ {names(system.box[(x, a)])} }};")
    else:
        mapping = system.phi if kind == "hybrid" else system.delta
        for x in ssorted(mapping):
            lines.append(f"  def {name(x)} = {formula(mapping[x])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_trrel(pairs, relname) -> str:
    lines = [f"trrel {name(relname)} {{"]
    for s, t in sorted(pairs, key=render):
        lines.append(f"  tr {name(s)} {name(t)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize(spec) -> str:
    """Whole :class:`SpecFile` back to text."""
    parts = [serialize_system(s, n) for n, s in spec.systems.items()]
    parts += [serialize_trrel(p, n) for n, p in spec.trrels.items()]
    return "\n".join(parts)
