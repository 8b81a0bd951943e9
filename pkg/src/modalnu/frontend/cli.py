"""Command-line interface.

Systems are referenced as ``FILE#NAME``; ``#NAME`` may be dropped when the
file holds a single system. Exit status is 0 when a check holds (or an
operation succeeds), 1 when a check fails, and 2 on any error.
"""
from __future__ import annotations

import argparse
import os
import sys

from .. import algebra, refinement, transform
from ..core import AlphabetMismatch, InvalidSystem, kind_of, render, states_of
from .dot import to_dot
from .parser import ParseError, SpecError, parse, parse_tr_lines
from .serialize import serialize_system, serialize_trrel

FORMALISMS = ("lts", "dmts", "aa", "nu", "hybrid", "hml")


class CliError(Exception):
    pass


_cache = {}


def load_file(path):
    if path not in _cache:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}") from None
        _cache[path] = parse(text)
    return _cache[path]


def split_ref(ref):
    path, _, sysname = ref.partition("#")
    return path, sysname


def load_system(ref):
    path, sysname = split_ref(ref)
    spec = load_file(path)
    if not sysname:
        if len(spec.systems) != 1:
            raise CliError(f"{path} holds {len(spec.systems)} systems; use {path}#NAME")
        sysname = next(iter(spec.systems))
    try:
        return spec.get(sysname), sysname
    except KeyError as exc:
        raise CliError(f"{path}: {exc.args[0]}") from None


def load_tr(ref, default_file, states):
    """Inclusion facts from a trrel block (``[FILE#]NAME``) or a plain file."""
    path, name = split_ref(ref)
    if name:
        spec = load_file(path)
    elif os.path.isfile(ref):
        with open(ref, encoding="utf-8") as fh:
            pairs = parse_tr_lines(fh.read())
        return refinement.TrRelation.asserted(states, _restrict(pairs, states))
    else:
        spec, name = load_file(default_file), ref
    if name not in spec.trrels:
        raise CliError(f"no trrel named {name!r}")
    return refinement.TrRelation.asserted(states, _restrict(spec.trrels[name], states))


def _restrict(pairs, states):
    return {(s, t) for s, t in pairs if s in states and t in states}


def emit_system(system, sysname, out):
    out.write(serialize_system(system, sysname))


def _as(system, target):
    try:
        return transform.convert(system, target)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _report(witness, out):
    if witness.holds:
        out.write("holds\n")
        for x, y in sorted(witness.relation, key=render):
            out.write(f"  ({render(x)}, {render(y)})\n")
        return 0
    out.write("fails\n")
    for line in witness.explain():
        out.write(f"  {line}\n")
    return 1


# --------------------------------------------------------------------------
# subcommands


def cmd_check(args, out):
    left, _ = load_system(args.left)
    right, _ = load_system(args.right)
    if args.relation == "mr":
        kind = kind_of(left)
        if kind in ("lts", "hml") or kind != kind_of(right):
            kind = "nu" if "hml" in (kind_of(left), kind_of(right)) else "dmts"
        return _report(refinement.mr(_as(left, kind), _as(right, kind)), out)
    if args.relation == "mtr":
        n1, n2 = _as(left, "nu"), _as(right, "nu")
        tr1 = _tr_for(args, args.tr, args.left, n1)
        tr2 = _tr_for(args, args.tr2 or args.tr, args.right, n2)
        w = refinement.mtr_nu(n1, n2, tr1, tr2)
        out.write(f"inclusion facts: left {w.provenance[0]}; right {w.provenance[1]}\n")
        return _report(w, out)
    budget = refinement.Budget(memory=args.memory, max_yield=args.max)
    verdict = refinement.check_thorough(left, right, budget)
    out.write(verdict.describe() + "\n")
    if verdict.refuted:
        emit_system(verdict.witness, "witness", out)
        return 1
    return 0


def _tr_for(args, ref, sysref, n):
    if args.tr_bounded:
        budget = refinement.Budget(memory=args.tr_bounded)
        return refinement.bounded_tr(transform.hd(n), budget)
    if ref:
        return load_tr(ref, split_ref(sysref)[0], n.vars)
    return refinement.TrRelation.identity(n.vars)


def cmd_translate(args, out):
    system, sysname = load_system(args.system)
    emit_system(_as(system, args.to), args.name or f"{sysname}_{args.to}", out)
    return 0


def cmd_normalize(args, out):
    system, sysname = load_system(args.system)
    if kind_of(system) != "hml":
        raise CliError(f"normalize expects an hml system, got {kind_of(system)}")
    emit_system(transform.normalize(system), args.name or f"{sysname}_nf", out)
    return 0


def cmd_maycomplete(args, out):
    system, sysname = load_system(args.system)
    d = _as(system, "dmts")
    if args.tr_bounded:
        tr = refinement.bounded_tr(d, refinement.Budget(memory=args.tr_bounded))
    elif args.tr:
        tr = load_tr(args.tr, split_ref(args.system)[0], d.states)
    else:
        raise CliError("maycomplete needs --tr NAME or --tr-bounded M")
    emit_system(transform.may_completion(d, tr), args.name or f"{sysname}_mc", out)
    if args.show_tr:
        out.write("\n")
        out.write(serialize_trrel({p for p in tr.pairs if p[0] != p[1]}, f"{sysname}_tr"))
    return 0


def _binary(args, op):
    left, lname = load_system(args.left)
    right, rname = load_system(args.right)
    return left, right, args.name or f"{lname}_{op}_{rname}"


def cmd_compose(args, out):
    left, right, name = _binary(args, "par")
    if kind_of(left) == kind_of(right) == "lts":
        result = algebra.lts_compose(left, right)
    elif kind_of(left) == "dmts":
        result = algebra.dmts_compose(left, _as(right, "dmts"))
    else:
        result = algebra.nu_compose(_as(left, "nu"), _as(right, "nu"))
    emit_system(result, name, out)
    return 0


def cmd_quotient(args, out):
    left, right, name = _binary(args, "by")
    if kind_of(left) == "dmts":
        result = algebra.dmts_quotient(left, _as(right, "dmts"))
    else:
        result = algebra.nu_quotient(_as(left, "nu"), _as(right, "nu"))
    emit_system(result, name, out)
    return 0


def cmd_and(args, out):
    left, right, name = _binary(args, "and")
    emit_system(algebra.nu_and(_as(left, "nu"), _as(right, "nu")), name, out)
    return 0


def cmd_or(args, out):
    left, right, name = _binary(args, "or")
    emit_system(algebra.nu_or(_as(left, "nu"), _as(right, "nu")), name, out)
    return 0


def cmd_models(args, out):
    impl, _ = load_system(args.impl)
    spec, _ = load_system(args.spec)
    lts = _as(impl, "lts")
    ok = refinement.implements(lts, spec)
    out.write("models\n" if ok else "does not model\n")
    return 0 if ok else 1


def cmd_export(args, out):
    system, sysname = load_system(args.system)
    out.write(to_dot(system, sysname))
    return 0


def cmd_validate(args, out):
    spec = load_file(args.file)
    for name, system in spec.systems.items():
        out.write(f"{name}: {kind_of(system)}, {len(states_of(system))} states, ok\n")
    for name, pairs in spec.trrels.items():
        out.write(f"{name}: trrel, {len(pairs)} pairs\n")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="modalnu", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="refinement checks")
    c.add_argument("relation", choices=("mr", "mtr", "thorough"))
    c.add_argument("left")
    c.add_argument("right")
    c.add_argument("--tr", help="trrel block ([FILE#]NAME) or file of 'tr s t' lines")
    c.add_argument("--tr2", help="separate inclusion facts for the right side")
    c.add_argument("--tr-bounded", type=int, metavar="M",
                   help="compute inclusion facts with the bounded oracle at memory M")
    c.add_argument("--memory", type=int, default=1)
    c.add_argument("--max", type=int, default=2000)
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("translate", help="translate into another formalism")
    t.add_argument("--to", required=True, choices=FORMALISMS)
    t.add_argument("system")
    t.add_argument("--name")
    t.set_defaults(func=cmd_translate)

    nm = sub.add_parser("normalize", help="normal form of an hml system")
    nm.add_argument("system")
    nm.add_argument("--name")
    nm.set_defaults(func=cmd_normalize)

    m = sub.add_parser("maycomplete", help="may-completion of a DMTS")
    m.add_argument("system")
    g = m.add_mutually_exclusive_group()
    g.add_argument("--tr")
    g.add_argument("--tr-bounded", type=int, metavar="M")
    m.add_argument("--show-tr", action="store_true", help="also print the inclusion facts used")
    m.add_argument("--name")
    m.set_defaults(func=cmd_maycomplete)

    for cmd, func, helptext in (
        ("compose", cmd_compose, "parallel composition"),
        ("quotient", cmd_quotient, "quotient LEFT / RIGHT"),
        ("and", cmd_and, "conjunction"),
        ("or", cmd_or, "disjunction"),
    ):
        b = sub.add_parser(cmd, help=helptext)
        b.add_argument("left")
        b.add_argument("right")
        b.add_argument("--name")
        b.set_defaults(func=func)

    mo = sub.add_parser("models", help="does an implementation satisfy a specification")
    mo.add_argument("impl")
    mo.add_argument("spec")
    mo.set_defaults(func=cmd_models)

    e = sub.add_parser("export", help="Graphviz output")
    e.add_argument("--dot", action="store_true", required=True)
    e.add_argument("system")
    e.set_defaults(func=cmd_export)

    v = sub.add_parser("validate", help="parse and validate a file")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    _cache.clear()
    try:
        return args.func(args, out)
    except (CliError, ParseError, SpecError, InvalidSystem, AlphabetMismatch,
            algebra.QuotientTooLarge) as exc:
        err.write(f"error: {exc}\n")
    except (ValueError, TypeError) as exc:
        err.write(f"error: {exc}\n")
    return 2


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
