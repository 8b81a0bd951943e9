"""Translations between the formalisms, may-completion and normalization.

Naming follows the usual two-letter scheme: the first letter is the source,
the second the target, with ``d`` for DMTS, ``b`` for acceptance automata,
``l`` for hybrid logic and ``h`` for the nu-calculus. ``hdt`` is the older
nu-to-DMTS translation that takes state inclusions into account.
"""
from __future__ import annotations

import itertools

from . import _checks
from .core import (
    TT,
    Aa,
    And,
    Box,
    Diamond,
    Dmts,
    Ff,
    HmlDecl,
    HybridExpr,
    InvalidSystem,
    Not,
    NuExprNF,
    Or,
    Tt,
    Var,
    checked,
    conj,
    disj,
    ensure_valid,
    fmt_set,
    render,
    ssorted,
)

# --------------------------------------------------------------------------
# acceptance automata and hybrid logic


def bl(a: Aa) -> HybridExpr:
    """Hybrid expression whose formulas denote exactly the Tran sets."""
    ensure_valid(a, consistent=False)
    universe = [(b, u) for b in sorted(a.alphabet) for u in ssorted(a.states)]
    phi = {}
    for s in a.states:
        disjuncts = []
        for m in sorted(a.tran[s], key=fmt_set):
            lits = [Diamond(b, Var(u)) for b, u in universe if (b, u) in m]
            lits += [Not(Diamond(b, Var(u))) for b, u in universe if (b, u) not in m]
            disjuncts.append(conj(lits))
        phi[s] = disj(disjuncts)
    return checked(HybridExpr(a.alphabet, a.states, a.initials, phi))


def lb(e: HybridExpr) -> Aa:
    from .semantics import eval_hybrid

    ensure_valid(e)
    tran = {x: eval_hybrid(e.phi[x], e.alphabet, e.vars) for x in e.vars}
    empty = [x for x in ssorted(e.initials) if not tran[x]]
    if empty:
        raise InvalidSystem(
            [f"initial {render(x)} denotes no admissible set; initial states need a "
             "non-empty transition constraint" for x in empty]
        )
    return checked(Aa(e.alphabet, e.vars, e.initials, tran))


# --------------------------------------------------------------------------
# DMTS and acceptance automata


def admissible_sets(succ, musts):
    """Subsets of ``succ`` that meet every set in ``musts``."""
    succ = ssorted(succ)
    out = []
    for r in range(len(succ) + 1):
        for combo in itertools.combinations(succ, r):
            m = frozenset(combo)
            if all(m & n for n in musts):
                out.append(m)
    return frozenset(out)


def is_convex(sets) -> bool:
    """M1, M2 admissible and M1 ⊆ M ⊆ M1 ∪ M2 imply M admissible.

    It suffices to test one-element extensions M1 ∪ {e} with e ∈ M2: every
    M between M1 and M1 ∪ M2 is reached by a chain of such steps, each of
    which stays between an admissible set and its union with M2.
    """
    sets = set(sets)
    for m1 in sets:
        for m2 in sets:
            for e in m2 - m1:
                if m1 | {e} not in sets:
                    return False
    return True


def db(d: Dmts) -> Aa:
    ensure_valid(d)
    may, must = d.may_of(), d.must_of()
    tran = {s: admissible_sets(may[s], must[s]) for s in d.states}
    if _checks.enabled:
        _checks.counts["convexity"] += 1
        for s in d.states:
            assert is_convex(tran[s]), s
    return checked(Aa(d.alphabet, d.states, d.initials, tran), consistent=False)


def bd(a: Aa) -> Dmts:
    """DMTS whose states are the admissible sets of ``a``."""
    ensure_valid(a, consistent=False)
    states = set()
    for s in a.states:
        states |= a.tran[s]
    initials = set()
    for s in a.initials:
        initials |= a.tran[s]
    must = set()
    for m in states:
        for b, t in m:
            must.add((m, frozenset((b, m2) for m2 in a.tran[t])))
    may = {(m, b, m2) for m, n in must for b, m2 in n}
    return checked(Dmts(a.alphabet, states, initials, may, must))


# --------------------------------------------------------------------------
# DMTS and nu-calculus


def dh(d: Dmts) -> NuExprNF:
    ensure_valid(d)
    diamond = {s: [] for s in d.states}
    for s, n in d.must:
        diamond[s].append(n)
    box = {}
    for s, a, t in d.may:
        box.setdefault((s, a), set()).add(t)
    return checked(NuExprNF(d.alphabet, d.states, d.initials, diamond, box))


def _nf_must(n: NuExprNF):
    ensure_valid(n)
    return [(x, ns) for x in n.vars for ns in n.diamond[x]]


def hd(n: NuExprNF) -> Dmts:
    must = _nf_must(n)
    may = [(x, a, y) for (x, a), ys in n.box.items() for y in ys]
    return checked(Dmts(n.alphabet, n.vars, n.initials, may, must))


def _require_reflexive(tr, states):
    from .refinement import _require_reflexive as req

    req(tr, states, "inclusion relation")


def hdt(n: NuExprNF, tr) -> Dmts:
    """Like :func:`hd`, but boxes also allow every variable below their targets."""
    must = _nf_must(n)
    _require_reflexive(tr, n.vars)
    may = set()
    for (x, a), ys in n.box.items():
        for y in ys:
            for y2 in tr.below(y):
                if y2 in n.vars:
                    may.add((x, a, y2))
    return checked(Dmts(n.alphabet, n.vars, n.initials, may, must))


def may_completion(d: Dmts, tr) -> Dmts:
    """Add s -a-> t' whenever s -a-> t and t' ⊑t t according to ``tr``."""
    ensure_valid(d)
    _require_reflexive(tr, d.states)
    may = set()
    for s, a, t in d.may:
        for t2 in tr.below(t):
            if t2 in d.states:
                may.add((s, a, t2))
    return checked(Dmts(d.alphabet, d.states, d.initials, may, d.must))


# --------------------------------------------------------------------------
# normalization of HML declarations


class _Namer:
    def __init__(self, taken):
        self.taken = set(taken)
        self.count = 0

    def fresh(self, base):
        name = base
        while name in self.taken:
            name += "'"
        self.taken.add(name)
        return name

    def fresh_anon(self):
        while True:
            self.count += 1
            name = f"_f{self.count}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def _flatten(n: HmlDecl):
    """Rewrite every definition so modal operators only guard variables.

    Returns a definition map over an extended variable set. Nested modal
    bodies get fresh variables; unguarded variable occurrences are unfolded
    (an unguarded cycle denotes ``tt`` under the greatest fixed point).
    """
    namer = _Namer(n.vars)
    delta = dict(n.delta)
    names = {}

    def name_of(body):
        if isinstance(body, Var):
            return body.name
        if body not in names:
            x = namer.fresh_anon()
            names[body] = x
            delta[x] = body
        return names[body]

    def guard(f):
        if isinstance(f, (Tt, Ff, Var)):
            return f
        if isinstance(f, (Diamond, Box)):
            return type(f)(f.action, Var(name_of(f.body)))
        if isinstance(f, (And, Or)):
            return type(f)(guard(f.left), guard(f.right))
        raise ValueError(f"not an HML formula: {f}")

    guarded = {}
    todo = list(delta)
    while todo:
        x = todo.pop()
        if x in guarded:
            continue
        before = set(delta)
        guarded[x] = guard(delta[x])
        todo.extend(set(delta) - before)

    def unfold(f, stack):
        if isinstance(f, Var):
            if f.name in stack:
                return TT
            return unfold(guarded[f.name], stack | {f.name})
        if isinstance(f, (And, Or)):
            return type(f)(unfold(f.left, stack), unfold(f.right, stack))
        return f

    flat = {x: unfold(guarded[x], frozenset({x})) for x in guarded}
    return flat


def _dnf(f):
    """Cubes of ``f`` as pairs (diamond literals, box literals), pruned."""
    if isinstance(f, Tt):
        cubes = [(frozenset(), frozenset())]
    elif isinstance(f, Ff):
        cubes = []
    elif isinstance(f, Diamond):
        cubes = [(frozenset({(f.action, f.body.name)}), frozenset())]
    elif isinstance(f, Box):
        cubes = [(frozenset(), frozenset({(f.action, f.body.name)}))]
    elif isinstance(f, Or):
        cubes = _dnf(f.left) + _dnf(f.right)
    elif isinstance(f, And):
        cubes = [(d1 | d2, b1 | b2) for d1, b1 in _dnf(f.left) for d2, b2 in _dnf(f.right)]
    else:
        raise ValueError(f"unexpected formula {f}")
    return _prune_cubes(cubes)


def _prune_cubes(cubes):
    """Drop duplicate cubes and cubes whose literals include another cube's."""
    uniq = set(cubes)
    keep = []
    for c in uniq:
        if not any(o != c and o[0] <= c[0] and o[1] <= c[1] for o in uniq):
            keep.append(c)
    return sorted(keep, key=lambda c: (fmt_set(c[0]), fmt_set(c[1])))


def _minimal_sets(sets):
    sets = set(sets)
    return {s for s in sets if not any(o < s for o in sets)}


def normalize(n: HmlDecl) -> NuExprNF:
    """Equivalent normal-form expression for an HML declaration.

    Each definition is put into disjunctive normal form over guarded
    literals. Cubes sharing the same box literals form one variant of the
    variable, whose diamond part is the conjunction of the cubes' diamond
    disjunctions. Conjunctions of variables become new variables (named by
    joining the parts with ``+``), which keeps every box a disjunction of
    variables. A diamond target is conjoined with the box for its action so
    diamond targets always appear in the box sets.
    """
    ensure_valid(n)
    flat = _flatten(n)
    cubes = {x: _dnf(flat[x]) for x in flat}
    actions = sorted(n.alphabet)

    # variants of a conjunction (frozenset of base variables): one per box part
    variant_cache = {}

    def variants(conjset):
        """List of (boxes: action -> frozenset, diamonds: set of frozensets of (a, conj))."""
        if conjset in variant_cache:
            return variant_cache[conjset]
        combined = [(frozenset(), frozenset())]
        for x in ssorted(conjset):
            combined = _prune_cubes(
                [(d1 | d2, b1 | b2) for d1, b1 in combined for d2, b2 in cubes[x]]
            )
        groups = {}
        for dia, box in combined:
            groups.setdefault(box, []).append(dia)
        out = []
        for box in sorted(groups, key=fmt_set):
            boxes = {a: frozenset(y for b, y in box if b == a) for a in actions}
            # conjunction of disjunctions: one clause per choice of literal per cube
            dias = groups[box]
            if any(not d for d in dias):
                clauses = set()
            else:
                clauses = {frozenset(choice) for choice in itertools.product(*[ssorted(d) for d in dias])}
                clauses = _minimal_sets(clauses)
            diamonds = frozenset(
                frozenset((a, boxes[a] | {z}) for a, z in clause) for clause in clauses
            )
            out.append((boxes, diamonds))
        variant_cache[conjset] = out
        return out

    # explore reachable conjunction variables; a variable is (conjset, index)
    namer = _Namer(())
    names = {}

    def var_name(conjset, k, count):
        key = (conjset, k)
        if key not in names:
            if not conjset:
                base = "x_tt"
            else:
                base = "+".join(render(x) for x in ssorted(conjset))
            if count > 1:
                base = f"{base}~{k + 1}"
            names[key] = namer.fresh(base)
        return names[key]

    def refs(conjset):
        vs = variants(conjset)
        return [var_name(conjset, k, len(vs)) for k in range(len(vs))]

    initials = []
    for x0 in ssorted(n.initials):
        initials += refs(frozenset({x0}))
    diamond, box, seen = {}, {}, set()
    todo = [frozenset({x0}) for x0 in ssorted(n.initials)]
    while todo:
        conjset = todo.pop(0)
        if conjset in seen:
            continue
        seen.add(conjset)
        for k, (boxes, diamonds) in enumerate(variants(conjset)):
            v = var_name(conjset, k, len(variants(conjset)))
            for a in actions:
                targets = {boxes[a]}
                for nset in diamonds:
                    targets |= {c for b, c in nset if b == a}
                box[(v, a)] = {y for c in targets for y in refs(c)}
                todo.extend(targets)
            diamond[v] = [
                {(a, y) for a, c in nset for y in refs(c)} for nset in diamonds
            ]
    vars_ = set(diamond)
    result = NuExprNF(n.alphabet, vars_, initials, diamond, box)
    return checked(result)


# --------------------------------------------------------------------------
# translation between any two formalisms


def convert(system, target: str):
    """Translate ``system`` into formalism ``target``.

    ``target`` is one of ``lts`` (implementations only), ``dmts``, ``aa``,
    ``nu``, ``hybrid`` or ``hml``. The route always goes through the direct
    translations above; HML declarations are normalized first.
    """
    from .core import as_lts, embed_lts, kind_of, nf_to_decl

    kind = kind_of(system)
    if kind == target:
        return system
    if kind == "lts":
        if target == "hml":
            return nf_to_decl(embed_lts(system, "nu"))
        return embed_lts(system, target)
    if target == "lts":
        return as_lts(convert(system, "dmts") if kind == "hml" else system)
    if kind == "hml":
        return convert(normalize(system), target)
    routes = {
        ("dmts", "aa"): db,
        ("dmts", "nu"): dh,
        ("dmts", "hybrid"): lambda d: bl(db(d)),
        ("aa", "dmts"): bd,
        ("aa", "nu"): lambda a: dh(bd(a)),
        ("aa", "hybrid"): bl,
        ("hybrid", "aa"): lb,
        ("hybrid", "dmts"): lambda e: bd(lb(e)),
        ("hybrid", "nu"): lambda e: dh(bd(lb(e))),
        ("nu", "dmts"): hd,
        ("nu", "aa"): lambda n: db(hd(n)),
        ("nu", "hybrid"): lambda n: bl(db(hd(n))),
    }
    if target == "hml":
        return nf_to_decl(convert(system, "nu"))
    if (kind, target) not in routes:
        raise ValueError(f"unknown target formalism {target!r}")
    return routes[(kind, target)](system)
