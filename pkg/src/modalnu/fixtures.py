"""Small example systems used throughout the tests, docs and CLI demos."""
from __future__ import annotations

import itertools

from .core import (
    Aa,
    Box,
    Diamond,
    Dmts,
    Ff,
    HmlDecl,
    Lts,
    Var,
    conj,
    disj,
)
from .core import And as _And

FIG1_SIGMA = {"grant", "idle", "work", "req"}

# request/grant protocol: after a request, either work or grant must follow
FIG1_DMTS = Dmts(
    FIG1_SIGMA,
    {"X", "Y"},
    {"X"},
    may={
        ("X", "grant", "X"), ("X", "work", "X"), ("X", "idle", "X"), ("X", "req", "Y"),
        ("Y", "grant", "X"), ("Y", "work", "Y"),
    },
    must=[("Y", {("grant", "X"), ("work", "Y")})],
)

FIG1_FORMULA = HmlDecl(
    FIG1_SIGMA,
    {"X", "Y"},
    {"X"},
    {
        "X": _And(
            conj(Box(a, Var("X")) for a in ("grant", "idle", "work")),
            Box("req", Var("Y")),
        ),
        "Y": _And(
            disj([Diamond("work", Var("Y")), Diamond("grant", Var("X"))]),
            conj(Box(a, Ff()) for a in ("idle", "req")),
        ),
    },
)


def _fig1_nu():
    from .transform import dh

    return dh(FIG1_DMTS)


FIG1_NU = _fig1_nu()

# a DMTS and its may-completion; t3 ⊑t t1 and v3 ⊑t v1 hold semantically
FIG2_SIGMA = {"a", "b", "c", "d"}
_FIG2_MAY = {
    ("s", "a", "t1"),
    ("t1", "a", "u1"), ("t1", "a", "u2"),
    ("t3", "a", "u3"),
    ("u1", "a", "v1"),
    ("u2", "d", "u2"),
    ("u3", "a", "v3"),
    ("v1", "b", "v1"), ("v1", "c", "v1"),
    ("v3", "b", "v3"),
}
_FIG2_STATES = {"s", "t1", "t3", "u1", "u2", "u3", "v1", "v3"}
FIG2_D = Dmts(FIG2_SIGMA, _FIG2_STATES, {"s"}, _FIG2_MAY, [("u1", {("a", "v1")})])
FIG2_MC = Dmts(
    FIG2_SIGMA,
    _FIG2_STATES,
    {"s"},
    _FIG2_MAY | {("s", "a", "t3"), ("u1", "a", "v3"), ("v1", "b", "v3"), ("v1", "c", "v3")},
    [("u1", {("a", "v1")})],
)
FIG2_TR_FACTS = {("t3", "t1"), ("v3", "v1")}

FIG3_D1 = Dmts(
    FIG2_SIGMA,
    {"s''", "t1''", "u1''", "u2''", "v1''"},
    {"s''"},
    {
        ("s''", "a", "t1''"), ("t1''", "a", "u1''"), ("t1''", "a", "u2''"),
        ("u1''", "a", "v1''"), ("v1''", "b", "v1''"), ("v1''", "c", "v1''"),
        ("u2''", "d", "u2''"),
    },
    [("u1''", {("a", "v1''")})],
)
FIG3_D2 = Dmts(
    FIG2_SIGMA,
    {"s", "t", "u", "v"},
    {"s"},
    {("s", "a", "t"), ("t", "a", "u"), ("u", "a", "v"), ("v", "b", "v")},
)

# the two operands of the composition example
FIG4_D1 = Dmts(
    {"a", "b"},
    {"s1", "t1", "u1"},
    {"s1"},
    {("s1", "a", "t1"), ("s1", "b", "u1"), ("t1", "a", "t1")},
    [("s1", {("a", "t1"), ("b", "u1")}), ("t1", {("a", "t1")})],
)
FIG4_D2 = Dmts(
    {"a", "b"},
    {"s2", "t2", "u2"},
    {"s2"},
    {("s2", "a", "t2"), ("s2", "a", "u2"), ("t2", "a", "t2")},
    [("s2", {("a", "t2")}), ("s2", {("a", "u2")}), ("t2", {("a", "t2")})],
)

TOY_P = Dmts({"a"}, {"p", "q"}, {"p"}, {("p", "a", "q")}, [("p", {("a", "q")})])
TOY_P_LTS = Lts({"a"}, {"p", "q"}, {"p"}, {("p", "a", "q")})


def unit_lts(alphabet) -> Lts:
    """One state with a self-loop on every action."""
    return Lts(alphabet, {"u"}, {"u"}, {("u", a, "u") for a in alphabet})


def even_aa(n: int) -> Aa:
    """One-state AA over ``n`` actions admitting exactly the even-size subsets.

    Every DMTS with the same implementations needs at least 2**(n-1) states.
    """
    alphabet = [f"a{i}" for i in range(1, n + 1)]
    pairs = [(a, "s0") for a in alphabet]
    tran = [
        frozenset(c)
        for r in range(0, n + 1, 2)
        for c in itertools.combinations(pairs, r)
    ]
    return Aa(alphabet, {"s0"}, {"s0"}, {"s0": tran})
