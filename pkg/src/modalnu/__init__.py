"""Specification theories for the modal nu-calculus and its behavioral twins.

The package covers disjunctive modal transition systems, acceptance
automata, hybrid-logic expressions and nu-calculus expressions: refinement
checking, translations between them, normalization, may-completion and the
algebraic operators (conjunction, disjunction, composition, quotient).
"""
from .core import (
    Aa,
    AlphabetMismatch,
    Dmts,
    HmlDecl,
    HybridExpr,
    InvalidSystem,
    Lts,
    NuExprNF,
    as_lts,
    embed_lts,
    is_implementation,
    validate,
)
from .refinement import (
    Budget,
    RefinementWitness,
    TrRelation,
    bounded_tr,
    check_thorough,
    concretizations,
    mr,
    mr_aa,
    mr_dmts,
    mr_hybrid,
    mr_nu,
    mtr_nu,
)
from .semantics import eval_hml_gfp, eval_hybrid, models
from .transform import bd, bl, convert, db, dh, hd, hdt, lb, may_completion, normalize

__version__ = "0.1.0"

__all__ = [
    "Aa", "AlphabetMismatch", "Dmts", "HmlDecl", "HybridExpr", "InvalidSystem", "Lts",
    "NuExprNF", "as_lts", "embed_lts", "is_implementation", "validate",
    "Budget", "RefinementWitness", "TrRelation", "bounded_tr", "check_thorough",
    "concretizations", "mr", "mr_aa", "mr_dmts", "mr_hybrid", "mr_nu", "mtr_nu",
    "eval_hml_gfp", "eval_hybrid", "models",
    "bd", "bl", "convert", "db", "dh", "hd", "hdt", "lb", "may_completion", "normalize",
]
