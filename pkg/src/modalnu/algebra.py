"""Operators on specifications: disjunction, conjunction, parallel composition
and quotient, plus the bottom, top and unit elements.

Composition is CSP style: both components move together on every action.
Composition and quotient only build the part of the product reachable from
the initial states.
"""
from __future__ import annotations

import itertools

from .core import (
    Aa,
    Dmts,
    Lts,
    NuExprNF,
    check_alphabets,
    checked,
    embed_lts,
    ensure_valid,
    render,
    ssorted,
)
from .fixtures import unit_lts
from .transform import admissible_sets, bd, db, dh, hd

# --------------------------------------------------------------------------
# lattice operations


def _disjoint_names(n1, n2):
    """Renaming for ``n2`` that avoids the variables of ``n1``."""
    taken = set(n1.vars)
    mapping = {}
    for x in ssorted(n2.vars):
        y = x
        while y in taken:
            y = y + "'" if isinstance(y, str) else (y, "'")
        taken.add(y)
        mapping[x] = y
    return mapping


def nu_or(n1: NuExprNF, n2: NuExprNF) -> NuExprNF:
    """Disjoint union; implementations of either operand."""
    check_alphabets(n1, n2)
    ensure_valid(n1, n2)
    f = _disjoint_names(n1, n2)
    diamond = dict(n1.diamond)
    box = dict(n1.box)
    for x, ns in n2.diamond.items():
        diamond[f[x]] = [[(a, f[y]) for a, y in n] for n in ns]
    for (x, a), ys in n2.box.items():
        box[(f[x], a)] = [f[y] for y in ys]
    return checked(
        NuExprNF(
            n1.alphabet,
            set(n1.vars) | {f[x] for x in n2.vars},
            set(n1.initials) | {f[x] for x in n2.initials},
            diamond,
            box,
        )
    )


def nu_and(n1: NuExprNF, n2: NuExprNF) -> NuExprNF:
    """Product construction; implementations of both operands."""
    check_alphabets(n1, n2)
    ensure_valid(n1, n2)
    vars_ = [(x1, x2) for x1 in n1.vars for x2 in n2.vars]
    box = {
        ((x1, x2), a): [(y1, y2) for y1 in n1.box[(x1, a)] for y2 in n2.box[(x2, a)]]
        for x1, x2 in vars_
        for a in n1.alphabet
    }
    diamond = {}
    for x1, x2 in vars_:
        ns = []
        for n in n1.diamond[x1]:
            ns.append({(a, (y1, y2)) for a, y1 in n for y2 in n2.box[(x2, a)]})
        for n in n2.diamond[x2]:
            ns.append({(a, (y1, y2)) for a, y2 in n for y1 in n1.box[(x1, a)]})
        diamond[(x1, x2)] = ns
    initials = [(x1, x2) for x1 in n1.initials for x2 in n2.initials]
    return checked(NuExprNF(n1.alphabet, vars_, initials, diamond, box))


def bottom(alphabet) -> NuExprNF:
    return NuExprNF(alphabet, (), (), {}, {})


def top(alphabet) -> NuExprNF:
    return NuExprNF(alphabet, {"top"}, {"top"}, {}, {("top", a): {"top"} for a in alphabet})


def unit(alphabet) -> NuExprNF:
    return embed_lts(unit_lts(alphabet), "nu")


def constants(alphabet):
    return {"bottom": bottom(alphabet), "top": top(alphabet), "unit": unit(alphabet)}


# --------------------------------------------------------------------------
# composition


def _reachable(initials, step):
    seen = set(initials)
    todo = list(initials)
    while todo:
        s = todo.pop()
        for t in step(s):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


def lts_compose(l1: Lts, l2: Lts) -> Lts:
    check_alphabets(l1, l2)
    ensure_valid(l1, l2)
    s1, s2 = l1.successors(), l2.successors()

    def moves(p):
        return [
            (a, (t1, t2))
            for a in sorted(l1.alphabet)
            for t1 in ssorted(s1[p[0]].get(a, ()))
            for t2 in ssorted(s2[p[1]].get(a, ()))
        ]

    initials = [(x, y) for x in l1.initials for y in l2.initials]
    states = _reachable(initials, lambda p: [t for _, t in moves(p)])
    trans = [(p, a, t) for p in states for a, t in moves(p)]
    return Lts(l1.alphabet, states, initials, trans)


def sync(m1, m2):
    """Synchronized product of two admissible sets."""
    return frozenset((a, (t1, t2)) for a, t1 in m1 for b, t2 in m2 if a == b)


def aa_compose(a1: Aa, a2: Aa) -> Aa:
    check_alphabets(a1, a2)
    ensure_valid(a1, a2, consistent=False)

    def tran(p):
        return {sync(m1, m2) for m1 in a1.tran[p[0]] for m2 in a2.tran[p[1]]}

    initials = [(x, y) for x in a1.initials for y in a2.initials]
    states = _reachable(initials, lambda p: [t for m in tran(p) for _, t in m])
    return checked(Aa(a1.alphabet, states, initials, {p: tran(p) for p in states}), consistent=False)


def bh(a: Aa) -> NuExprNF:
    return dh(bd(a))


def hb(n: NuExprNF) -> Aa:
    return db(hd(n))


def nu_compose(n1: NuExprNF, n2: NuExprNF) -> NuExprNF:
    """Composition through acceptance automata and back."""
    check_alphabets(n1, n2)
    return checked(bh(aa_compose(hb(n1), hb(n2))))


def dmts_compose(d1: Dmts, d2: Dmts) -> Dmts:
    """The DMTS analogue of composition; states are composite admissible sets."""
    check_alphabets(d1, d2)
    composite = bd(aa_compose(db(d1), db(d2)))
    return restrict_reachable(composite)


def restrict_reachable(d: Dmts) -> Dmts:
    may = d.may_of()
    states = _reachable(d.initials, lambda s: [t for _, t in may[s]])
    return Dmts(
        d.alphabet,
        states,
        d.initials,
        [(s, a, t) for s, a, t in d.may if s in states],
        [(s, n) for s, n in d.must if s in states],
    )


# --------------------------------------------------------------------------
# quotient

MAX_POST = 4096


class QuotientTooLarge(ValueError):
    pass


def _initial_states(dividend_initials, divisor_initials):
    """One quotient initial per way of assigning dividend initials to divisor initials."""
    divisor_initials = ssorted(divisor_initials)
    out = []
    for choice in itertools.product(ssorted(dividend_initials), repeat=len(divisor_initials)):
        out.append(frozenset(zip(choice, divisor_initials)))
    return out


class _QuotientCore:
    """Successor structure shared by the AA and DMTS forms of the quotient.

    ``succ1(s, a)`` lists the dividend's possible a-successors of s (those
    occurring in some admissible set), likewise ``succ2`` for the divisor.
    ``tran1``/``tran2`` are the admissible sets.
    """

    def __init__(self, alphabet, tran1, tran2):
        self.alphabet = sorted(alphabet)
        self.tran1, self.tran2 = tran1, tran2
        self._succ = {}

    def succ(self, tran, s, a):
        key = (id(tran), s, a)
        if key not in self._succ:
            self._succ[key] = ssorted({t for m in tran[s] for b, t in m if b == a})
        return self._succ[key]

    def permissible(self, q, a):
        return all(
            self.succ(self.tran1, s1, a) or not self.succ(self.tran2, s2, a) for s1, s2 in q
        )

    def post(self, q, a):
        """All successor quotient states for action ``a`` from ``q``."""
        slots = [
            (s1, t2) for s1, s2 in ssorted(q) for t2 in self.succ(self.tran2, s2, a)
        ]
        choices = [self.succ(self.tran1, s1, a) for s1, _ in slots]
        size = 1
        for c in choices:
            size *= len(c)
        if size > MAX_POST:
            raise QuotientTooLarge(f"{size} successor assignments from {render(q)} on {a}")
        return ssorted(
            {
                frozenset((t1, t2) for t1, (_, t2) in zip(pick, slots))
                for pick in itertools.product(*choices)
            }
        )

    def post_all(self, q):
        if not q:
            return [(a, q) for a in self.alphabet]
        return [(a, t) for a in self.alphabet if self.permissible(q, a) for t in self.post(q, a)]

    def project(self, m, s1, m2):
        """The admissible set of the dividend state ``s1`` that ``m`` induces
        together with the divisor's admissible set ``m2``."""
        out = set()
        for a, t in m:
            nexts = set(self.succ(self.tran1, s1, a))
            for b, t2 in m2:
                if a == b:
                    out |= {(a, t1) for t1, u2 in t if u2 == t2 and t1 in nexts}
        return frozenset(out)


def aa_quotient(dividend: Aa, divisor: Aa) -> Aa:
    """Most permissive X with divisor ∥ X refining the dividend (AA form).

    Quotient states are sets of (dividend state, divisor state) pairs; the
    empty set is the universal state that admits everything.
    """
    check_alphabets(dividend, divisor)
    ensure_valid(dividend, divisor, consistent=False)
    core = _QuotientCore(dividend.alphabet, dividend.tran, divisor.tran)

    def tran(q):
        post = core.post_all(q)
        if not q:
            return {frozenset(c) for r in range(len(post) + 1) for c in itertools.combinations(post, r)}
        if len(post) > 16:
            raise QuotientTooLarge(f"{len(post)} candidate transitions from {render(q)}")
        out = set()
        for r in range(len(post) + 1):
            for combo in itertools.combinations(post, r):
                m = frozenset(combo)
                if all(
                    core.project(m, s1, m2) in dividend.tran[s1]
                    for s1, s2 in q
                    for m2 in divisor.tran[s2]
                ):
                    out.add(m)
        return out

    initials = _initial_states(dividend.initials, divisor.initials)
    states = _reachable(initials, lambda q: [t for _, t in core.post_all(q)])
    return checked(Aa(dividend.alphabet, states, initials, {q: tran(q) for q in states}), consistent=False)


def _minimal_sets(sets):
    sets = set(sets)
    return [s for s in ssorted(sets) if not any(o < s for o in sets)]


def dmts_quotient(dividend: Dmts, divisor: Dmts) -> Dmts:
    """Quotient computed directly in DMTS form.

    It has the same states as :func:`aa_quotient` applied to the AA
    translations, and its admissible sets coincide with that quotient's
    transition constraints. Each obligation "the projection must meet the
    dividend's must N for every divisor choice M2" becomes one disjunctive
    must; only minimal M2 matter because projections grow with M2.
    """
    check_alphabets(dividend, divisor)
    ensure_valid(dividend, divisor)
    may1, must1 = dividend.may_of(), dividend.must_of()
    may2, must2 = divisor.may_of(), divisor.must_of()
    tran1 = {}
    for s in dividend.states:
        # only emptiness matters for the successor structure: a state with the
        # empty must has no admissible set at all
        tran1[s] = [frozenset(may1[s])] if frozenset() not in must1[s] else []
    tran2_cache = {}

    def tran2(s):
        if s not in tran2_cache:
            tran2_cache[s] = admissible_sets(may2[s], must2[s])
        return tran2_cache[s]

    tran2_view = {s: ([frozenset(may2[s])] if tran2(s) else []) for s in divisor.states}
    core = _QuotientCore(dividend.alphabet, tran1, tran2_view)

    initials = _initial_states(dividend.initials, divisor.initials)
    states = _reachable(initials, lambda q: [t for _, t in core.post_all(q)])
    may, must = [], []
    for q in states:
        post = core.post_all(q)
        may += [(q, a, t) for a, t in post]
        for s1, s2 in ssorted(q):
            if not tran2(s2):
                continue
            if not tran1[s1]:
                must.append((q, frozenset()))
                continue
            for m2 in _minimal_sets(tran2(s2)):
                for n in must1[s1]:
                    g = {
                        (a, t)
                        for a, t in post
                        if any(
                            b == a and (t1, t2) in t and (a, t1) in n
                            for b, t2 in m2
                            for t1 in core.succ(tran1, s1, a)
                        )
                    }
                    must.append((q, frozenset(g)))
    return checked(Dmts(dividend.alphabet, states, initials, may, must))


def nu_quotient(n: NuExprNF, n1: NuExprNF) -> NuExprNF:
    """Most permissive n2 with n1 ∥ n2 refining n."""
    check_alphabets(n, n1)
    return checked(dh(dmts_quotient(hd(n), hd(n1))))
