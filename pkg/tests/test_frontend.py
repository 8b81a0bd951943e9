import io
import os

import pytest

from gen import rand_aa, rand_dmts, rand_hml, rand_hybrid, rand_lts, rand_nf, rng_for
from modalnu.core import TT, And, Box, Diamond, Dmts, Not, Or, Var
from modalnu.fixtures import FIG2_D, FIG2_MC, FIG2_TR_FACTS, TOY_P
from modalnu.frontend.cli import main
from modalnu.frontend.dot import to_dot
from modalnu.frontend.parser import (
    ParseError,
    SpecError,
    parse,
    parse_formula,
    parse_tr_lines,
    tokenize,
)
from modalnu.frontend.serialize import name, serialize, serialize_system
from modalnu.transform import db

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SPECS = os.path.join(ROOT, "specs")


def spec_path(name):
    return os.path.join(SPECS, name)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# --------------------------------------------------------------------------
# parser


def test_parse_fig2_file():
    with open(spec_path("fig2.spec"), encoding="utf-8") as fh:
        spec = parse(fh.read())
    assert spec.get("d") == FIG2_D
    assert spec.get("mc") == FIG2_MC
    assert spec.trrels["facts"] == FIG2_TR_FACTS
    with pytest.raises(KeyError, match="known: d, mc, d1, d2"):
        spec.get("nope")


def test_tokens_carry_positions():
    toks = tokenize('system\n  "odd name" # note\n x')
    assert [(t.kind, t.value, t.line, t.col) for t in toks] == [
        ("ident", "system", 1, 1),
        ("name", "odd name", 2, 3),
        ("ident", "x", 3, 2),
        ("eof", "", 3, 3),
    ]


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("system dmts d {\n  alphabet a;\n  bogus x;\n}", 3, 3, "not allowed"),
        ("system foo d { }", 1, 8, "unknown system kind"),
        ("system dmts d {\n  states s;\n  initial s\n}", 4, 1, "expected ';'"),
        ("system lts d { states p; }\nsystem lts d { }", 2, 12, "duplicate system name"),
        ("trrel r { tx a b; }", 1, 11, "expected 'tr'"),
        ("system lts d { states p; $ }", 1, 26, "unexpected character"),
    ],
)
def test_parse_errors_report_position(text, line, col, fragment):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert fragment in str(info.value)
    assert str(info.value).startswith(f"line {line}, column {col}: ")


def test_semantic_errors_name_the_block():
    with pytest.raises(SpecError) as info:
        parse("system dmts bad { alphabet a; states p; initial q; }")
    assert info.value.block == "bad"
    assert info.value.problems == ["initial q is not a declared state"]


def test_duplicate_definition_rejected():
    with pytest.raises(ParseError, match="defined twice"):
        parse("system hml h { alphabet a; states x; def x = tt; def x = ff; }")


def test_formula_precedence():
    assert parse_formula("<a>x & y | z") == Or(And(Diamond("a", Var("x")), Var("y")), Var("z"))
    assert parse_formula("!<a>x & tt") == And(Not(Diamond("a", Var("x"))), TT)
    assert parse_formula("<a>(x | y)") == Diamond("a", Or(Var("x"), Var("y")))


def test_box_over_several_actions():
    assert parse_formula("[a, b]x") == And(Box("a", Var("x")), Box("b", Var("x")))
    with pytest.raises(ParseError, match="at least one action"):
        parse_formula("[]x")


def test_trailing_input_after_formula():
    with pytest.raises(ParseError, match="after formula"):
        parse_formula("x y")


def test_quoted_names():
    spec = parse('system lts "my sys" { alphabet "a b"; states "p q"; initial "p q"; '
                 'trans "p q" "a b" "p q"; }')
    lts = spec.get("my sys")
    assert lts.trans == {("p q", "a b", "p q")}
    assert name("p q") == '"p q"' and name("tt") == '"tt"' and name("x'") == "x'"
    assert name('a"b') == '"a\\"b"'


def test_parse_tr_lines():
    text = "# facts\ntr t3 t1\ntr v3 v1;\n"
    assert parse_tr_lines(text) == FIG2_TR_FACTS
    with pytest.raises(ParseError):
        parse_tr_lines("rt a b")


# --------------------------------------------------------------------------
# serializer


def test_serialize_toy_text():
    assert serialize_system(TOY_P, "p") == (
        "system dmts p {\n"
        "  alphabet a;\n"
        "  states p, q;\n"
        "  initial p;\n"
        "  may p a q;\n"
        "  must p { a q };\n"
        "}\n"
    )


def test_roundtrip_random_systems():
    rng = rng_for("frontend roundtrip")
    makers = [rand_lts, rand_dmts, rand_aa, rand_nf, rand_hml, rand_hybrid]
    for i in range(120):
        system = makers[i % len(makers)](rng)
        text = serialize_system(system, f"s{i}")
        assert parse(text).get(f"s{i}") == system


def test_roundtrip_structured_state_names():
    a = db(FIG2_D)
    from modalnu.transform import bd
    d = bd(a)
    text = serialize_system(d, "x")
    back = parse(text).get("x")
    assert len(back.states) == len(d.states)
    assert serialize_system(back, "x") == text


def test_serialize_whole_file():
    with open(spec_path("fig2.spec"), encoding="utf-8") as fh:
        spec = parse(fh.read())
    again = parse(serialize(spec))
    assert again.systems == spec.systems and again.trrels == spec.trrels


# --------------------------------------------------------------------------
# dot export


def test_dot_conventions():
    d = Dmts({"a", "b"}, {"s", "t"}, {"s"},
             {("s", "a", "t"), ("s", "b", "t"), ("t", "a", "t")},
             [("s", {("a", "t"), ("b", "t")}), ("t", {("a", "t")})])
    text = to_dot(d, "g")
    assert text.startswith('digraph "g" {')
    assert '"s" [label="s", peripheries=2];' in text
    assert '"t" [label="t"];' in text
    assert '"t" -> "t" [label="a"];' in text
    assert '"_j1" [shape=point, label=""];' in text
    assert '"s" -> "_j1" [arrowhead=none];' in text
    assert '"_j1" -> "t" [label="b"];' in text
    assert "dashed" not in text


def test_dot_may_only_is_dashed():
    d = Dmts({"a"}, {"s"}, {"s"}, {("s", "a", "s")})
    assert '"s" -> "s" [label="a", style=dashed];' in to_dot(d)


def test_dot_accepts_every_formalism():
    for system in (TOY_P, db(TOY_P), rand_lts(rng_for("dot"))):
        assert to_dot(system).rstrip().endswith("}")


# --------------------------------------------------------------------------
# command line


def test_cli_check_mr():
    fig2 = spec_path("fig2.spec")
    code, out, _ = run("check", "mr", f"{fig2}#d", f"{fig2}#mc")
    assert code == 0 and out.startswith("holds\n")
    code, out, _ = run("check", "mr", f"{fig2}#mc", f"{fig2}#d")
    assert code == 1 and out.startswith("fails\n")
    assert "initial s has no refining partner" in out


def test_cli_check_mtr_with_facts():
    fig2 = spec_path("fig2.spec")
    code, out, _ = run("check", "mtr", f"{fig2}#mc", f"{fig2}#d", "--tr", "facts")
    assert code == 0
    assert out.startswith("inclusion facts: left asserted, reflexive; right asserted, reflexive")
    code, _, _ = run("check", "mtr", f"{fig2}#mc", f"{fig2}#d")
    assert code == 1


def test_cli_check_across_formalisms():
    fig1 = spec_path("fig1.spec")
    code, out, _ = run("check", "mr", f"{fig1}#d", f"{fig1}#formula")
    assert code == 0
    code, out, _ = run("check", "thorough", f"{fig1}#formula", f"{fig1}#d")
    assert code == 1 and "system lts witness" in out


def test_cli_maycomplete():
    fig2 = spec_path("fig2.spec")
    code, out, _ = run("maycomplete", f"{fig2}#d", "--tr", "facts", "--name", "mc")
    assert code == 0
    assert parse(out).get("mc") == FIG2_MC
    code, out, _ = run("maycomplete", f"{fig2}#d", "--tr-bounded", "2", "--show-tr")
    assert code == 0 and "trrel d_tr" in out
    code, _, err = run("maycomplete", f"{fig2}#d")
    assert code == 2 and "needs --tr" in err


def test_cli_translate_and_normalize():
    fig1 = spec_path("fig1.spec")
    code, out, _ = run("translate", "--to", "aa", f"{fig1}#d")
    assert code == 0 and out.startswith("system aa d_aa {")
    code, out, _ = run("normalize", f"{fig1}#formula")
    assert code == 0 and out.startswith("system nu formula_nf {")
    code, _, err = run("normalize", f"{fig1}#d")
    assert code == 2 and "expects an hml system" in err


def test_cli_algebra_commands():
    fig4 = spec_path("fig4.spec")
    for cmd in ("compose", "quotient", "and", "or"):
        code, out, _ = run(cmd, f"{fig4}#d1", f"{fig4}#d2")
        assert code == 0, cmd
        assert len(parse(out).systems) == 1


def test_cli_models_export_validate():
    fig1 = spec_path("fig1.spec")
    assert run("models", f"{fig1}#grant_loop", f"{fig1}#formula")[0] == 0
    code, out, _ = run("models", f"{fig1}#req_loop", f"{fig1}#formula")
    assert code == 1 and out == "does not model\n"
    code, out, _ = run("export", "--dot", f"{fig1}#d")
    assert code == 0 and out.startswith('digraph "d"')
    code, out, _ = run("validate", fig1)
    assert code == 0 and "d: dmts, 2 states, ok" in out


def test_cli_errors_exit_with_two(tmp_path):
    fig2 = spec_path("fig2.spec")
    assert run("check", "mr", f"{fig2}#d", f"{fig2}#nope")[0] == 2
    assert run("check", "mr", fig2, f"{fig2}#d")[0] == 2
    assert run("check", "mr", str(tmp_path / "missing.spec"), f"{fig2}#d")[0] == 2
    bad = tmp_path / "bad.spec"
    bad.write_text("system dmts d {\n  may;\n}\n")
    code, _, err = run("validate", str(bad))
    assert code == 2 and "line 2" in err
    assert run("bogus")[0] == 2
    assert run("--help")[0] == 0


def test_cli_plain_tr_file(tmp_path):
    fig2 = spec_path("fig2.spec")
    facts = tmp_path / "facts.tr"
    facts.write_text("tr t3 t1\ntr v3 v1\n")
    code, _, _ = run("check", "mtr", f"{fig2}#mc", f"{fig2}#d", "--tr", str(facts))
    assert code == 0
