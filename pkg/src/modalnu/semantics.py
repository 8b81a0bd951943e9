"""Denotational semantics.

Hybrid formulas denote sets of admissible sets. With ``n = |Σ×X|`` atoms, a set
of subsets of the atom universe is stored as an integer with ``2**n`` bits:
bit ``m`` is set iff the subset with membership mask ``m`` belongs to the
denotation. Conjunction, union and complement are then single integer
operations.

HML declarations are evaluated over an LTS as the greatest fixed point of the
declaration, by descending iteration from the top assignment.
"""
from __future__ import annotations

from functools import lru_cache

from . import _checks
from .core import (
    And,
    Box,
    Diamond,
    Ff,
    HmlDecl,
    Lts,
    Not,
    NuExprNF,
    Or,
    Tt,
    Var,
    check_alphabets,
    ensure_valid,
    nf_to_decl,
    skey,
    ssorted,
)

MAX_ATOMS = 20


def atom_universe(alphabet, vars_):
    """Fixed enumeration of Σ×X used by the bitset encoding."""
    return [(a, x) for a in sorted(alphabet) for x in ssorted(vars_)]


@lru_cache(maxsize=None)
def _atom_pattern(k, n):
    """Bitset of all subsets (over ``n`` atoms) that contain atom ``k``."""
    width = 1 << k
    period = width << 1
    block = ((1 << width) - 1) << width
    reps = (1 << (1 << n)) - 1
    return block * (reps // ((1 << period) - 1))


def eval_hybrid_bits(phi, index, n, memo=None):
    memo = {} if memo is None else memo
    full = (1 << (1 << n)) - 1

    def ev(f):
        if f in memo:
            return memo[f]
        if isinstance(f, Tt):
            r = full
        elif isinstance(f, Ff):
            r = 0
        elif isinstance(f, Diamond):
            if not isinstance(f.body, Var):
                raise ValueError(f"hybrid diamond must point at a variable: {f}")
            r = _atom_pattern(index[(f.action, f.body.name)], n)
        elif isinstance(f, Not):
            r = full & ~ev(f.body)
        elif isinstance(f, And):
            r = ev(f.left) & ev(f.right)
        elif isinstance(f, Or):
            r = ev(f.left) | ev(f.right)
        else:
            raise ValueError(f"not a hybrid formula: {f}")
        memo[f] = r
        return r

    return ev(phi)


def bits_to_sets(bits, atoms):
    out = set()
    m = 0
    while bits:
        if bits & 1:
            out.add(frozenset(atoms[k] for k in range(len(atoms)) if m >> k & 1))
        bits >>= 1
        m += 1
    return frozenset(out)


def eval_hybrid(phi, alphabet, vars_):
    """Set of admissible sets (subsets of Σ×X) satisfying ``phi``."""
    atoms = atom_universe(alphabet, vars_)
    if len(atoms) > MAX_ATOMS:
        raise ValueError(f"|Σ×X| = {len(atoms)} exceeds the enumeration limit {MAX_ATOMS}")
    index = {p: k for k, p in enumerate(atoms)}
    return bits_to_sets(eval_hybrid_bits(phi, index, len(atoms)), atoms)


# --------------------------------------------------------------------------
# HML over an LTS


def _eval_hml(f, succ, sigma, states):
    """States of the LTS satisfying ``f`` under assignment ``sigma``."""
    if isinstance(f, Tt):
        return states
    if isinstance(f, Ff):
        return frozenset()
    if isinstance(f, Var):
        return sigma[f.name]
    if isinstance(f, And):
        return _eval_hml(f.left, succ, sigma, states) & _eval_hml(f.right, succ, sigma, states)
    if isinstance(f, Or):
        return _eval_hml(f.left, succ, sigma, states) | _eval_hml(f.right, succ, sigma, states)
    if isinstance(f, Diamond):
        body = _eval_hml(f.body, succ, sigma, states)
        return frozenset(s for s in states if succ[s].get(f.action, set()) & body)
    if isinstance(f, Box):
        body = _eval_hml(f.body, succ, sigma, states)
        return frozenset(s for s in states if succ[s].get(f.action, set()) <= body)
    raise ValueError(f"not an HML formula: {f}")


def eval_hml_gfp(n, lts: Lts):
    """Greatest assignment σ with σ(x) ⊆ ⟦Δ(x)⟧σ for every variable x."""
    if isinstance(n, NuExprNF):
        n = nf_to_decl(n)
    check_alphabets(n, lts)
    ensure_valid(n, lts)
    succ = lts.successors()
    sigma = {x: lts.states for x in n.vars}
    rounds = 0
    while True:
        rounds += 1
        new = {x: sigma[x] & _eval_hml(n.delta[x], succ, sigma, lts.states) for x in n.vars}
        if new == sigma:
            break
        sigma = new
    if _checks.enabled:
        _checks.counts["gfp_post"] += 1
        for x in n.vars:
            assert sigma[x] <= _eval_hml(n.delta[x], succ, sigma, lts.states), x
    return sigma


def models(lts: Lts, n) -> bool:
    """Every initial state of ``lts`` satisfies some initial variable of ``n``."""
    if not isinstance(n, (HmlDecl, NuExprNF)):
        raise TypeError("models expects an HML declaration or a normal-form expression")
    sigma = eval_hml_gfp(n, lts)
    return all(any(s in sigma[x] for x in n.initials) for s in lts.initials)


def satisfying_states(lts: Lts, n):
    """Per-variable satisfaction sets, keyed and ordered by variable name."""
    sigma = eval_hml_gfp(n, lts)
    return {x: ssorted(sigma[x]) for x in sorted(sigma, key=skey)}
