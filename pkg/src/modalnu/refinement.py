"""Refinement checking.

Modal refinement in every formalism is the greatest relation satisfying a
local clause; it is computed by starting from all pairs and deleting violating
pairs until nothing changes. Deleted pairs remember why they were deleted so a
failed check can be explained.

Thorough refinement (inclusion of implementation sets) is only approximated:
:func:`concretizations` enumerates implementations of a DMTS and
:func:`check_thorough` looks for one that the right-hand side rejects. A
refutation is a proof; failing to find one is not.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import _checks
from .core import (
    Aa,
    Dmts,
    HybridExpr,
    Lts,
    NuExprNF,
    check_alphabets,
    embed_lts,
    ensure_valid,
    fmt_set,
    kind_of,
    render,
    skey,
    ssorted,
    with_initials,
)


@dataclass
class RefinementWitness:
    """Outcome of a refinement check.

    ``relation`` is the greatest refinement relation found. When the check
    fails, ``counterexample`` is ``(state, message)`` for an initial state
    of the left side without a partner, and ``reasons`` maps every deleted
    pair to the clause that removed it and the pairs it depended on.
    """

    holds: bool
    relation: frozenset
    counterexample: tuple | None = None
    reasons: dict = field(default_factory=dict)
    provenance: tuple | None = None
    partners: tuple = ()

    def __bool__(self):
        return self.holds

    def explain(self, limit=12):
        """Human-readable trace from the failing initial state downwards."""
        if self.holds:
            return ["refinement holds"]
        lines = [self.counterexample[1]]
        state = self.counterexample[0]
        todo = [(state, y) for y in self.partners]
        seen = set()
        while todo and len(lines) < limit:
            pair = todo.pop(0)
            if pair in seen or pair not in self.reasons:
                continue
            seen.add(pair)
            text, culprits = self.reasons[pair]
            lines.append(f"({render(pair[0])}, {render(pair[1])}): {text}")
            todo.extend(c for c in culprits if c not in seen)
        return lines


def _gfp(left, right, clause):
    """Greatest relation over ``left × right`` on which ``clause`` holds.

    ``clause(pair, rel)`` returns ``None`` when the pair is fine and
    ``(message, culprits)`` otherwise. Deletion order is deterministic.
    """
    rel = {(x, y) for x in left for y in right}
    order = sorted(rel, key=skey)
    reasons = {}
    changed = True
    while changed:
        changed = False
        for pair in order:
            if pair not in rel:
                continue
            bad = clause(pair, rel)
            if bad is not None:
                rel.discard(pair)
                reasons[pair] = bad
                changed = True
    if _checks.enabled:
        _checks.counts["gfp_extra_sweep"] += 1
        for pair in order:
            if pair in rel:
                assert clause(pair, rel) is None, pair
            else:
                assert clause(pair, rel | {pair}) is not None, pair
    return frozenset(rel), reasons


def _verdict(rel, reasons, initials1, initials2):
    for x in ssorted(initials1):
        if not any((x, y) in rel for y in initials2):
            partners = ", ".join(render(y) for y in ssorted(initials2)) or "none"
            msg = f"initial {render(x)} has no refining partner among initials: {partners}"
            return RefinementWitness(False, rel, (x, msg), reasons, partners=tuple(ssorted(initials2)))
    return RefinementWitness(True, rel, None, reasons)


def _matched(pairs1, pairs2, rel):
    """Every (a, t1) in pairs1 has some (a, t2) in pairs2 with (t1, t2) in rel."""
    return all(any(a == b and (t1, t2) in rel for b, t2 in pairs2) for a, t1 in pairs1)


def _matched_back(pairs2, pairs1, rel):
    """Every (a, t2) in pairs2 has some (a, t1) in pairs1 with (t1, t2) in rel."""
    return all(any(a == b and (t1, t2) in rel for b, t1 in pairs1) for a, t2 in pairs2)


def _prepare(x, y):
    check_alphabets(x, y)
    ensure_valid(x, y, consistent=False)


# --------------------------------------------------------------------------
# modal refinement per formalism


def mr_dmts(d1: Dmts, d2: Dmts) -> RefinementWitness:
    _prepare(d1, d2)
    may1, may2 = d1.may_of(), d2.may_of()
    must1, must2 = d1.must_of(), d2.must_of()

    def clause(pair, rel):
        s1, s2 = pair
        for a, t1 in ssorted(may1[s1]):
            if not any(b == a and (t1, t2) in rel for b, t2 in may2[s2]):
                culprits = [(t1, t2) for b, t2 in ssorted(may2[s2]) if b == a]
                return (
                    f"may {render(s1)} -{a}-> {render(t1)} has no matching "
                    f"may-transition from {render(s2)}",
                    culprits,
                )
        for n2 in sorted(must2[s2], key=fmt_set):
            if not any(_matched(n1, n2, rel) for n1 in must1[s1]):
                culprits = [(t1, t2) for n1 in must1[s1] for a, t1 in n1 for b, t2 in n2 if a == b]
                return (
                    f"must {render(s2)} {fmt_set(n2)} is not matched by any must of {render(s1)}",
                    ssorted(set(culprits)),
                )
        return None

    rel, reasons = _gfp(d1.states, d2.states, clause)
    return _verdict(rel, reasons, d1.initials, d2.initials)


def _mr_sets(tran1, tran2, states1, states2, initials1, initials2):
    def clause(pair, rel):
        s1, s2 = pair
        for m1 in sorted(tran1[s1], key=fmt_set):
            ok = any(
                _matched(m1, m2, rel) and _matched_back(m2, m1, rel)
                for m2 in tran2[s2]
            )
            if not ok:
                culprits = {(t1, t2) for m2 in tran2[s2] for a, t1 in m1 for b, t2 in m2 if a == b}
                return (
                    f"admissible set {fmt_set(m1)} of {render(s1)} is not matched by any "
                    f"admissible set of {render(s2)}",
                    ssorted(culprits),
                )
        return None

    rel, reasons = _gfp(states1, states2, clause)
    return _verdict(rel, reasons, initials1, initials2)


def mr_aa(a1: Aa, a2: Aa) -> RefinementWitness:
    _prepare(a1, a2)
    return _mr_sets(a1.tran, a2.tran, a1.states, a2.states, a1.initials, a2.initials)


def hybrid_tran(e: HybridExpr):
    from .semantics import eval_hybrid

    return {x: eval_hybrid(e.phi[x], e.alphabet, e.vars) for x in e.vars}


def mr_hybrid(e1: HybridExpr, e2: HybridExpr) -> RefinementWitness:
    _prepare(e1, e2)
    return _mr_sets(hybrid_tran(e1), hybrid_tran(e2), e1.vars, e2.vars, e1.initials, e2.initials)


def _nu_must_clause(n1, n2, x1, x2, rel):
    for n2set in sorted(n2.diamond[x2], key=fmt_set):
        if not any(_matched(n1set, n2set, rel) for n1set in n1.diamond[x1]):
            culprits = {
                (y1, y2) for n1set in n1.diamond[x1] for a, y1 in n1set for b, y2 in n2set if a == b
            }
            return (
                f"diamond {fmt_set(n2set)} of {render(x2)} is not matched by any diamond "
                f"of {render(x1)}",
                ssorted(culprits),
            )
    return None


def mr_nu(n1: NuExprNF, n2: NuExprNF) -> RefinementWitness:
    _prepare(n1, n2)
    actions = sorted(n1.alphabet)

    def clause(pair, rel):
        x1, x2 = pair
        for a in actions:
            for y1 in ssorted(n1.box[(x1, a)]):
                if not any((y1, y2) in rel for y2 in n2.box[(x2, a)]):
                    return (
                        f"box [{a}] of {render(x1)} allows {render(y1)}, which refines no "
                        f"variable of box [{a}] of {render(x2)}",
                        ssorted((y1, y2) for y2 in n2.box[(x2, a)]),
                    )
        return _nu_must_clause(n1, n2, x1, x2, rel)

    rel, reasons = _gfp(n1.vars, n2.vars, clause)
    return _verdict(rel, reasons, n1.initials, n2.initials)


# --------------------------------------------------------------------------
# thorough-inclusion relations


@dataclass(frozen=True)
class TrRelation:
    """Pairs (s1, s2) taken to satisfy ⟦s1⟧ ⊆ ⟦s2⟧, with per-pair provenance."""

    pairs: frozenset
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    @staticmethod
    def identity(states):
        return TrRelation(frozenset((s, s) for s in states), {(s, s): "reflexive" for s in states})

    @staticmethod
    def asserted(states, pairs):
        """Identity on ``states`` plus the given pairs, tagged as asserted."""
        prov = {(s, s): "reflexive" for s in states}
        for p in pairs:
            prov.setdefault(tuple(p), "asserted")
        return TrRelation(frozenset(prov), prov)

    def is_reflexive_on(self, states):
        return all((s, s) in self.pairs for s in states)

    def below(self, y):
        """All y' with y' ⊑t y."""
        return {a for a, b in self.pairs if b == y}

    def describe(self):
        tags = sorted(set(self.provenance.values()))
        return ", ".join(tags) if tags else "untagged"


def _require_reflexive(tr, states, which):
    missing = [s for s in ssorted(states) if (s, s) not in tr.pairs]
    if missing:
        raise ValueError(f"{which} is not reflexive: missing ({render(missing[0])}, {render(missing[0])})")


def mtr_nu(n1: NuExprNF, n2: NuExprNF, tr1: TrRelation, tr2: TrRelation) -> RefinementWitness:
    """Modal-thorough refinement relative to the supplied inclusion facts."""
    _prepare(n1, n2)
    _require_reflexive(tr1, n1.vars, "tr1")
    _require_reflexive(tr2, n2.vars, "tr2")
    actions = sorted(n1.alphabet)
    below1 = {y: tr1.below(y) & n1.vars for y in n1.vars}
    below2 = {y: tr2.below(y) & n2.vars for y in n2.vars}

    def clause(pair, rel):
        x1, x2 = pair
        for a in actions:
            targets2 = set()
            for y2 in n2.box[(x2, a)]:
                targets2 |= below2[y2]
            for y1 in ssorted(n1.box[(x1, a)]):
                for y1p in ssorted(below1[y1]):
                    if not any((y1p, y2p) in rel for y2p in targets2):
                        return (
                            f"box [{a}] of {render(x1)} allows {render(y1p)} (below "
                            f"{render(y1)}), which refines nothing below box [{a}] of {render(x2)}",
                            ssorted((y1p, y2p) for y2p in targets2),
                        )
        return _nu_must_clause(n1, n2, x1, x2, rel)

    rel, reasons = _gfp(n1.vars, n2.vars, clause)
    w = _verdict(rel, reasons, n1.initials, n2.initials)
    w.provenance = (tr1.describe(), tr2.describe())
    return w


def mr(x, y) -> RefinementWitness:
    """Modal refinement between two systems of the same formalism."""
    kx, ky = kind_of(x), kind_of(y)
    if kx != ky:
        raise TypeError(f"cannot compare a {kx} with a {ky}")
    if kx == "lts":
        return mr_dmts(embed_lts(x, "dmts"), embed_lts(y, "dmts"))
    table = {"dmts": mr_dmts, "aa": mr_aa, "hybrid": mr_hybrid, "nu": mr_nu}
    if kx not in table:
        raise TypeError("normalize HML declarations before checking refinement")
    return table[kx](x, y)


# --------------------------------------------------------------------------
# implementation enumeration and the thorough-refinement oracle


@dataclass(frozen=True)
class Budget:
    """Search bound for the thorough-refinement oracle.

    ``memory`` is the number of copies of each specification state an
    implementation may use; ``max_yield`` caps the number of implementations
    examined per query.
    """

    memory: int = 1
    max_yield: int = 2000

    def describe(self):
        return f"oracle-bounded(memory={self.memory}, max={self.max_yield})"


def _options(d: Dmts, memory):
    """Per state: a generator of every allowed outgoing set over the copy space.

    Sets are produced lazily, smallest first, so a capped search never pays for
    the full powerset of a state with many may transitions.
    """
    may, must = d.may_of(), d.must_of()

    def gen(s):
        cands = [(a, t, k) for a, t in ssorted(may[s]) for k in range(memory)]
        for r in range(len(cands) + 1):
            for combo in itertools.combinations(cands, r):
                proj = {(a, t) for a, t, _ in combo}
                if all(proj & n for n in must[s]):
                    yield combo

    return gen


def concretizations(d: Dmts, memory: int = 1, initial=None):
    """Lazily yield implementations (as LTS) of ``d``.

    Each yielded LTS has one initial state and contains only reachable
    states. With ``memory == 1`` states keep their names; otherwise state
    copies are named ``(s, k)``.
    """
    ensure_valid(d)
    if memory < 1:
        raise ValueError("memory must be positive")
    opts = _options(d, memory)
    name = (lambda s, k: s) if memory == 1 else (lambda s, k: (s, k))
    roots = ssorted(d.initials) if initial is None else [initial]
    for s0 in roots:
        start = (s0, 0)

        def search(frontier, assigned):
            if not frontier:
                trans = [
                    (name(*src), a, name(t, k))
                    for src, combo in assigned.items()
                    for a, t, k in combo
                ]
                lts = Lts(d.alphabet, [name(*c) for c in assigned], [name(*start)], trans)
                if _checks.enabled:
                    _checks.counts["concretization"] += 1
                    assert mr_dmts(embed_lts(lts, "dmts"), with_initials(d, [s0])).holds
                yield lts
                return
            cur, rest = frontier[0], frontier[1:]
            for combo in opts(cur[0]):
                new = dict(assigned)
                new[cur] = combo
                nxt = list(rest)
                for _, t, k in combo:
                    if (t, k) not in new and (t, k) not in nxt:
                        nxt.append((t, k))
                yield from search(nxt, new)

        yield from search([start], {})


def to_dmts(system):
    """Translate any specification into a DMTS with the same implementations."""
    from . import transform

    kind = kind_of(system)
    if kind == "dmts":
        return system
    if kind == "lts":
        return embed_lts(system, "dmts")
    if kind == "aa":
        return transform.bd(system)
    if kind == "hybrid":
        return transform.bd(transform.lb(system))
    if kind == "nu":
        return transform.hd(system)
    if kind == "hml":
        return transform.hd(transform.normalize(system))
    raise TypeError(kind)


def implements(lts: Lts, spec) -> bool:
    """Whether ``lts`` is an implementation of ``spec`` (any formalism)."""
    kind = kind_of(spec)
    if kind == "hml":
        from .semantics import models

        return models(lts, spec)
    if kind == "lts":
        return mr_dmts(embed_lts(lts, "dmts"), embed_lts(spec, "dmts")).holds
    return mr(embed_lts(lts, kind), spec).holds


@dataclass
class Refuted:
    witness: Lts

    refuted = True

    def describe(self):
        return "refuted: found an implementation of the left side rejected by the right side"


@dataclass
class NoCounterexampleUpTo:
    budget: Budget
    explored: int
    exhausted: bool

    refuted = False

    def describe(self):
        how = "search space exhausted" if self.exhausted else "budget reached"
        return (
            f"no counterexample among {self.explored} implementations "
            f"({self.budget.describe()}, {how}); this is not a proof of inclusion"
        )


def check_thorough(lhs, rhs, budget: Budget = Budget()):
    """Search for an implementation of ``lhs`` that is not one of ``rhs``."""
    check_alphabets(lhs, rhs)
    d = to_dmts(lhs)
    explored = 0
    exhausted = True
    if budget.max_yield > 0:
        for lts in concretizations(d, budget.memory):
            if explored >= budget.max_yield:
                exhausted = False
                break
            explored += 1
            if not implements(lts, rhs):
                assert implements(lts, lhs), "oracle produced a non-implementation"
                return Refuted(lts)
    else:
        exhausted = False
    return NoCounterexampleUpTo(budget, explored, exhausted)


def bounded_tr(d: Dmts, budget: Budget = Budget(memory=2)) -> TrRelation:
    """Approximate ⊑t between the states of ``d``.

    A pair is kept when modal refinement proves it, or (with a positive
    budget) when the oracle fails to refute it.
    """
    ensure_valid(d)
    prov = {(s, s): "reflexive" for s in d.states}
    for s1 in ssorted(d.states):
        for s2 in ssorted(d.states):
            if s1 == s2:
                continue
            left, right = with_initials(d, [s1]), with_initials(d, [s2])
            if mr_dmts(left, right).holds:
                prov[(s1, s2)] = "modal"
            elif budget.max_yield > 0:
                if isinstance(check_thorough(left, right, budget), NoCounterexampleUpTo):
                    prov[(s1, s2)] = budget.describe()
    return TrRelation(frozenset(prov), prov)

