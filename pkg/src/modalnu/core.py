"""Data model shared by every formalism.

Five kinds of system live here: labeled transition systems (:class:`Lts`),
disjunctive modal transition systems (:class:`Dmts`), acceptance automata
(:class:`Aa`), hybrid-logic expressions (:class:`HybridExpr`) and modal
nu-calculus expressions, either as general declarations (:class:`HmlDecl`) or
in normal form (:class:`NuExprNF`).

All values are immutable once built. States and variables may be any hashable
value; strings are the norm, but the translations produce structured states
(tuples, frozensets) which :func:`render` turns into readable names.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache

from . import _checks


class InvalidSystem(ValueError):
    """Raised when an operation receives a system violating its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class AlphabetMismatch(ValueError):
    pass


# --------------------------------------------------------------------------
# naming helpers


@lru_cache(maxsize=1 << 18)
def render(x) -> str:
    """Readable, deterministic rendering of a (possibly structured) state."""
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "(" + ",".join(render(e) for e in x) + ")"
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(render(e) for e in x)) + "}"
    return str(x)


def skey(x):
    return render(x)


def ssorted(items):
    return sorted(items, key=skey)


def fmt_set(pairs) -> str:
    return "{" + ",".join(f"({render(a)},{render(t)})" for a, t in ssorted(pairs)) + "}"


# --------------------------------------------------------------------------
# formulas (HML and hybrid logic share one AST)


@dataclass(frozen=True)
class Tt:
    def __str__(self):
        return "tt"


@dataclass(frozen=True)
class Ff:
    def __str__(self):
        return "ff"


@dataclass(frozen=True)
class Var:
    name: object

    def __str__(self):
        return render(self.name)


@dataclass(frozen=True)
class Diamond:
    action: str
    body: object

    def __str__(self):
        return f"<{self.action}>{self.body}"


@dataclass(frozen=True)
class Box:
    action: str
    body: object

    def __str__(self):
        return f"[{self.action}]{self.body}"


@dataclass(frozen=True)
class And:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Not:
    body: object

    def __str__(self):
        return f"!{self.body}"


TT = Tt()
FF = Ff()


def conj(items):
    """Left-folded conjunction; the empty conjunction is ``tt``."""
    items = list(items)
    if not items:
        return TT
    out = items[0]
    for f in items[1:]:
        out = And(out, f)
    return out


def disj(items):
    items = list(items)
    if not items:
        return FF
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


def hybrid_or(left, right):
    """Disjunction spelled with negation and conjunction only."""
    return Not(And(Not(left), Not(right)))


def subformulas(f):
    yield f
    if isinstance(f, (Diamond, Box, Not)):
        yield from subformulas(f.body)
    elif isinstance(f, (And, Or)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


# --------------------------------------------------------------------------
# systems


def _fs(x):
    return frozenset(x)


def _pairs(x):
    return frozenset((a, t) for a, t in x)


@dataclass(frozen=True)
class Lts:
    alphabet: frozenset
    states: frozenset
    initials: frozenset
    trans: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _fs(self.alphabet))
        object.__setattr__(self, "states", _fs(self.states))
        object.__setattr__(self, "initials", _fs(self.initials))
        object.__setattr__(self, "trans", frozenset((s, a, t) for s, a, t in self.trans))

    def successors(self):
        succ = {s: {a: set() for a in self.alphabet} for s in self.states}
        for s, a, t in self.trans:
            succ.setdefault(s, {}).setdefault(a, set()).add(t)
        return succ


@dataclass(frozen=True)
class Dmts:
    alphabet: frozenset
    states: frozenset
    initials: frozenset
    may: frozenset = frozenset()
    must: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _fs(self.alphabet))
        object.__setattr__(self, "states", _fs(self.states))
        object.__setattr__(self, "initials", _fs(self.initials))
        object.__setattr__(self, "may", frozenset((s, a, t) for s, a, t in self.may))
        object.__setattr__(self, "must", frozenset((s, _pairs(n)) for s, n in self.must))

    def may_of(self):
        """state -> set of (action, target) pairs it may take."""
        out = {s: set() for s in self.states}
        for s, a, t in self.may:
            out.setdefault(s, set()).add((a, t))
        return out

    def must_of(self):
        out = {s: [] for s in self.states}
        for s, n in self.must:
            out.setdefault(s, []).append(n)
        return out


def _tran_map(states, tran):
    out = {s: frozenset() for s in states}
    for s, sets in dict(tran).items():
        out[s] = frozenset(_pairs(m) for m in sets)
    return out


@dataclass(frozen=True)
class Aa:
    alphabet: frozenset
    states: frozenset
    initials: frozenset
    tran: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _fs(self.alphabet))
        object.__setattr__(self, "states", _fs(self.states))
        object.__setattr__(self, "initials", _fs(self.initials))
        object.__setattr__(self, "tran", _tran_map(self.states, self.tran))


@dataclass(frozen=True)
class HybridExpr:
    alphabet: frozenset
    vars: frozenset
    initials: frozenset
    phi: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _fs(self.alphabet))
        object.__setattr__(self, "vars", _fs(self.vars))
        object.__setattr__(self, "initials", _fs(self.initials))
        phi = {x: TT for x in self.vars}
        phi.update(self.phi)
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class HmlDecl:
    alphabet: frozenset
    vars: frozenset
    initials: frozenset
    delta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _fs(self.alphabet))
        object.__setattr__(self, "vars", _fs(self.vars))
        object.__setattr__(self, "initials", _fs(self.initials))
        delta = {x: TT for x in self.vars}
        delta.update(self.delta)
        object.__setattr__(self, "delta", delta)


@dataclass(frozen=True)
class NuExprNF:
    """Normal-form expression.

    ``diamond[x]`` is a set of disjunctive requirements (each a set of
    ``(action, var)`` pairs); ``box[(x, a)]`` is the set of variables an
    ``a``-successor of ``x`` may satisfy.
    """

    alphabet: frozenset
    vars: frozenset
    initials: frozenset
    diamond: dict = field(default_factory=dict)
    box: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _fs(self.alphabet))
        object.__setattr__(self, "vars", _fs(self.vars))
        object.__setattr__(self, "initials", _fs(self.initials))
        dia = {x: frozenset() for x in self.vars}
        for x, ns in dict(self.diamond).items():
            dia[x] = frozenset(_pairs(n) for n in ns)
        box = {(x, a): frozenset() for x in self.vars for a in self.alphabet}
        for k, ys in dict(self.box).items():
            box[k] = frozenset(ys)
        object.__setattr__(self, "diamond", dia)
        object.__setattr__(self, "box", box)


SYSTEM_KINDS = {
    Lts: "lts",
    Dmts: "dmts",
    Aa: "aa",
    HybridExpr: "hybrid",
    HmlDecl: "hml",
    NuExprNF: "nu",
}


def kind_of(system) -> str:
    try:
        return SYSTEM_KINDS[type(system)]
    except KeyError:
        raise TypeError(f"not a system: {system!r}") from None


def states_of(system):
    return system.vars if hasattr(system, "vars") else system.states


def check_alphabets(*systems):
    alphabets = {s.alphabet for s in systems}
    if len(alphabets) > 1:
        shown = " vs ".join("{" + ",".join(sorted(a)) + "}" for a in alphabets)
        raise AlphabetMismatch(f"alphabet mismatch: {shown}")


# --------------------------------------------------------------------------
# validation


def _check_pairs(where, pairs, alphabet, states, out):
    for a, t in ssorted(pairs):
        if a not in alphabet:
            out.append(f"{where}: action {render(a)} not in alphabet")
        if t not in states:
            out.append(f"{where}: undeclared state {render(t)}")


def _check_formula(where, f, alphabet, names, hybrid, out):
    for g in subformulas(f):
        if isinstance(g, (Diamond, Box)) and g.action not in alphabet:
            out.append(f"{where}: action {render(g.action)} not in alphabet")
        if hybrid:
            if isinstance(g, Box):
                out.append(f"{where}: box modality not allowed in hybrid formula")
            if isinstance(g, Diamond) and not isinstance(g.body, Var):
                out.append(f"{where}: hybrid diamond must point at a variable")
        elif isinstance(g, Not):
            out.append(f"{where}: negation not allowed in HML")
        if isinstance(g, Var) and g.name not in names:
            out.append(f"{where}: undeclared variable {render(g.name)}")
    if hybrid:
        # bare variables are only legal as diamond bodies
        def bare(g, under_dia):
            if isinstance(g, Var) and not under_dia:
                out.append(f"{where}: bare variable {render(g.name)} in hybrid formula")
            elif isinstance(g, Diamond):
                bare(g.body, True)
            elif isinstance(g, Not):
                bare(g.body, False)
            elif isinstance(g, (And, Or)):
                bare(g.left, False)
                bare(g.right, False)

        bare(f, False)


def _looks_valid(system, consistent=True) -> bool:
    """Fast set-based version of the checks below; True iff no violation."""
    kind = kind_of(system)
    names = states_of(system)
    sigma = system.alphabet
    if not system.initials <= names:
        return False
    if kind == "lts":
        return all(s in names and a in sigma and t in names for s, a, t in system.trans)
    if kind == "dmts":
        if not all(s in names and a in sigma and t in names for s, a, t in system.may):
            return False
        return all(s in names and all((s, a, t) in system.may for a, t in n) for s, n in system.must)
    if kind == "aa":
        return (
            all(
                s in names and all(a in sigma and t in names for m in ms for a, t in m)
                for s, ms in system.tran.items()
            )
            and (not consistent or all(system.tran.get(s) for s in system.initials))
        )
    if kind == "nu":
        return all(
            x in names
            and all(a in sigma and y in system.box.get((x, a), ()) for n in ns for a, y in n)
            for x, ns in system.diamond.items()
        ) and all(x in names and a in sigma and ys <= names for (x, a), ys in system.box.items())
    return False


def validate(system, consistent=True) -> list:
    """Every invariant violation of ``system``, ordered by state name.

    With ``consistent=False`` an acceptance automaton may have initial states
    with no admissible set. Such states have no implementations; they arise
    legitimately inside translation and composition pipelines.
    """
    if _looks_valid(system, consistent):
        return []
    out = []
    kind = kind_of(system)
    names = states_of(system)
    for s in ssorted(system.initials - names):
        out.append(f"initial {render(s)} is not a declared state")
    if kind == "lts":
        for s, a, t in sorted(system.trans, key=skey):
            where = f"trans {render(s)} -{render(a)}-> {render(t)}"
            if s not in names:
                out.append(f"{where}: undeclared state {render(s)}")
            _check_pairs(where, [(a, t)], system.alphabet, names, out)
    elif kind == "dmts":
        for s, a, t in sorted(system.may, key=skey):
            where = f"may {render(s)} -{render(a)}-> {render(t)}"
            if s not in names:
                out.append(f"{where}: undeclared state {render(s)}")
            _check_pairs(where, [(a, t)], system.alphabet, names, out)
        for s, n in sorted(system.must, key=skey):
            where = f"must {render(s)} {fmt_set(n)}"
            if s not in names:
                out.append(f"{where}: undeclared state {render(s)}")
            _check_pairs(where, n, system.alphabet, names, out)
            for a, t in ssorted(n):
                if (s, a, t) not in system.may:
                    out.append(f"{where}: missing may {render(s)} -{render(a)}-> {render(t)}")
    elif kind == "aa":
        for s in ssorted(system.tran):
            if s not in names:
                out.append(f"tran {render(s)}: undeclared state")
            for m in ssorted(system.tran[s]):
                _check_pairs(f"tran {render(s)} {fmt_set(m)}", m, system.alphabet, names, out)
        for s in ssorted(system.initials) if consistent else ():
            if not system.tran.get(s):
                out.append(f"initial {render(s)} has an empty transition constraint")
    elif kind in ("hybrid", "hml"):
        mapping = system.phi if kind == "hybrid" else system.delta
        for x in ssorted(mapping):
            where = f"def {render(x)}"
            if x not in names:
                out.append(f"{where}: undeclared variable")
            _check_formula(where, mapping[x], system.alphabet, names, kind == "hybrid", out)
    elif kind == "nu":
        for x in ssorted(system.diamond):
            if x not in names:
                out.append(f"diamond {render(x)}: undeclared variable")
            for n in ssorted(system.diamond[x]):
                where = f"diamond {render(x)} {fmt_set(n)}"
                _check_pairs(where, n, system.alphabet, names, out)
                for a, y in ssorted(n):
                    if y not in system.box.get((x, a), ()):
                        out.append(f"{where}: {render(y)} not in box {render(x)} {render(a)}")
        for (x, a) in ssorted(system.box):
            where = f"box {render(x)} {render(a)}"
            if x not in names:
                out.append(f"{where}: undeclared variable")
            if a not in system.alphabet:
                out.append(f"{where}: action not in alphabet")
            for y in ssorted(system.box[(x, a)] - names):
                out.append(f"{where}: undeclared variable {render(y)}")
    return out


def ensure_valid(*systems, consistent=True):
    for system in systems:
        problems = validate(system, consistent)
        if problems:
            raise InvalidSystem(problems)


def checked(system, consistent=True):
    """Validate ``system`` when invariant checks are enabled; return it."""
    if _checks.enabled:
        _checks.counts["validate"] += 1
        problems = validate(system, consistent)
        assert not problems, problems
    return system


# --------------------------------------------------------------------------
# implementations and the LTS embeddings


def is_implementation(system) -> bool:
    ensure_valid(system)
    kind = kind_of(system)
    if kind == "lts":
        return True
    if kind == "dmts":
        return system.must == frozenset((s, frozenset({(a, t)})) for s, a, t in system.may)
    if kind == "aa":
        return all(len(ms) == 1 for ms in system.tran.values())
    if kind == "hybrid":
        from .semantics import eval_hybrid

        return all(
            len(eval_hybrid(system.phi[x], system.alphabet, system.vars)) == 1 for x in system.vars
        )
    if kind == "nu":
        return all(
            system.diamond[x]
            == frozenset(frozenset({(a, y)}) for a in system.alphabet for y in system.box[(x, a)])
            for x in system.vars
        )
    raise TypeError("HML declarations have no implementation notion; normalize first")


def embed_lts(lts: Lts, target: str):
    """The LTS ``lts`` viewed as an implementation in formalism ``target``."""
    succ = {s: set() for s in lts.states}
    for s, a, t in lts.trans:
        succ[s].add((a, t))
    if target == "lts":
        return lts
    if target == "dmts":
        return Dmts(
            lts.alphabet,
            lts.states,
            lts.initials,
            lts.trans,
            [(s, {(a, t)}) for s, a, t in lts.trans],
        )
    if target == "aa":
        return Aa(lts.alphabet, lts.states, lts.initials, {s: [succ[s]] for s in lts.states})
    if target == "hybrid":
        universe = [(a, t) for a in sorted(lts.alphabet) for t in ssorted(lts.states)]
        phi = {}
        for s in lts.states:
            lits = [Diamond(a, Var(t)) for a, t in universe if (a, t) in succ[s]]
            lits += [Not(Diamond(a, Var(t))) for a, t in universe if (a, t) not in succ[s]]
            phi[s] = conj(lits)
        return HybridExpr(lts.alphabet, lts.states, lts.initials, phi)
    if target == "nu":
        box = {}
        for s, a, t in lts.trans:
            box.setdefault((s, a), set()).add(t)
        return NuExprNF(
            lts.alphabet,
            lts.states,
            lts.initials,
            {s: [{p} for p in succ[s]] for s in lts.states},
            box,
        )
    raise ValueError(f"unknown target formalism {target!r}")


def as_lts(system) -> Lts:
    """Inverse of :func:`embed_lts` for implementations."""
    if not is_implementation(system):
        raise ValueError("system is not an implementation")
    kind = kind_of(system)
    if kind == "lts":
        return system
    if kind == "dmts":
        trans = system.may
    elif kind == "aa":
        trans = [(s, a, t) for s, ms in system.tran.items() for m in ms for a, t in m]
    elif kind == "hybrid":
        from .semantics import eval_hybrid

        trans = [
            (x, a, y)
            for x in system.vars
            for m in eval_hybrid(system.phi[x], system.alphabet, system.vars)
            for a, y in m
        ]
    else:
        trans = [(x, a, y) for (x, a), ys in system.box.items() for y in ys]
    return Lts(system.alphabet, states_of(system), system.initials, trans)


def nf_to_decl(n: NuExprNF) -> HmlDecl:
    """Spell a normal-form expression out as an HML declaration."""
    delta = {}
    for x in n.vars:
        parts = [disj(Diamond(a, Var(y)) for a, y in ssorted(nset)) for nset in ssorted(n.diamond[x])]
        parts += [
            Box(a, disj(Var(y) for y in ssorted(n.box[(x, a)]))) for a in sorted(n.alphabet)
        ]
        delta[x] = conj(parts)
    return HmlDecl(n.alphabet, n.vars, n.initials, delta)


# --------------------------------------------------------------------------
# generic structural helpers


def rename(system, mapping):
    """Rename states/variables through ``mapping`` (missing keys stay)."""
    f = lambda s: mapping.get(s, s)  # noqa: E731
    kind = kind_of(system)
    if kind == "lts":
        return Lts(system.alphabet, map(f, system.states), map(f, system.initials),
                   [(f(s), a, f(t)) for s, a, t in system.trans])
    if kind == "dmts":
        return Dmts(
            system.alphabet,
            map(f, system.states),
            map(f, system.initials),
            [(f(s), a, f(t)) for s, a, t in system.may],
            [(f(s), [(a, f(t)) for a, t in n]) for s, n in system.must],
        )
    if kind == "aa":
        return Aa(system.alphabet, map(f, system.states), map(f, system.initials),
                  {f(s): [[(a, f(t)) for a, t in m] for m in ms] for s, ms in system.tran.items()})
    if kind == "nu":
        return NuExprNF(
            system.alphabet,
            map(f, system.vars),
            map(f, system.initials),
            {f(x): [[(a, f(y)) for a, y in n] for n in ns] for x, ns in system.diamond.items()},
            {(f(x), a): [f(y) for y in ys] for (x, a), ys in system.box.items()},
        )

    def rf(g):
        if isinstance(g, Var):
            return Var(f(g.name))
        if isinstance(g, (Diamond, Box)):
            return type(g)(g.action, rf(g.body))
        if isinstance(g, Not):
            return Not(rf(g.body))
        if isinstance(g, (And, Or)):
            return type(g)(rf(g.left), rf(g.right))
        return g

    mapping_attr = "phi" if kind == "hybrid" else "delta"
    cls = type(system)
    return cls(system.alphabet, map(f, system.vars), map(f, system.initials),
               {f(x): rf(g) for x, g in getattr(system, mapping_attr).items()})


def stringify(system):
    """Rename structured states to their rendered names (collision-free)."""
    mapping = {}
    taken = set()
    for s in ssorted(states_of(system)):
        name = render(s)
        while name in taken:
            name += "'"
        taken.add(name)
        mapping[s] = name
    return rename(system, mapping)


def canonical(system):
    """Rename states to 0..n-1 in sorted-name order."""
    order = {s: i for i, s in enumerate(ssorted(states_of(system)))}
    return rename(system, order)


def isomorphic(a, b) -> bool:
    """Equality after canonical renaming (see module docs on its scope)."""
    return canonical(a) == canonical(b)


def with_initials(system, initials):
    initials = frozenset(initials)
    return replace(system, initials=initials)


def powerset(items):
    items = list(items)
    return (
        frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)
    )
