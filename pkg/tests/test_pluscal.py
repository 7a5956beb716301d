"""Tests for the algorithm-to-action translator.

The Peterson fixture is the main golden: the translation block between
the markers was produced by this translator and hand-checked action by
action, so re-translating the algorithm must reproduce it.
"""
from pathlib import Path

import pytest

from petrel import pluscal, terms as T
from petrel import errors as E
from petrel.lexer import tokenize
from petrel.parser import parse_module

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "peterson.tla"


def fixture_text():
    return FIXTURE.read_text()


def translate_fixture():
    text = fixture_text()
    block, line, col = pluscal.locate_algorithm(text)
    alg = pluscal.parse_algorithm(block, line, col)
    return alg, pluscal.translate(alg)


def toks(src):
    return [(t.kind, t.text) for t in tokenize(src)]


def translation_region(text):
    i = text.index(pluscal.BEGIN_MARK) + len(pluscal.BEGIN_MARK)
    j = text.index(pluscal.END_MARK)
    return text[i:j]


# --- the Peterson golden ---------------------------------------------------------


def test_peterson_summary():
    alg, (variables, defs) = translate_fixture()
    assert pluscal.summary(alg, defs) == "translated: 7 actions, 12 definitions"


def test_peterson_block_matches_fixture_tokens():
    text = fixture_text()
    alg, (variables, defs) = translate_fixture()
    block = pluscal.render_block(variables, defs)
    assert toks(block) == toks(translation_region(text))


def test_peterson_defs_match_parsed_fixture():
    # the defs the module parser sees inside the markers must be
    # structurally identical to a fresh translation
    module = parse_module(fixture_text())
    by_name = {d.name: d for d in module.defs}
    _, (variables, defs) = translate_fixture()
    for d in defs:
        assert by_name[d.name] == d
    assert module.variables == variables


def test_peterson_def_order():
    _, (variables, defs) = translate_fixture()
    assert variables == ("flag", "turn", "pc")
    assert [d.name for d in defs] == [
        "vars", "Init",
        "a0", "a1", "a2", "a3a", "a3b", "cs", "a4",
        "proc", "Next", "Spec",
    ]


def test_peterson_init_shape():
    _, (_, defs) = translate_fixture()
    init = defs[1].body
    assert isinstance(init, T.And) and len(init.items) == 3
    pc_init = init.items[2]
    assert pc_init == T.Eq(
        T.Name("pc"),
        T.FnLit("self", T.SetEnum((T.IntLit(0), T.IntLit(1))),
                T.StrLit("a0")))


def test_unconditional_loop_head():
    # while (TRUE) compiles to a plain step into the body
    _, (_, defs) = translate_fixture()
    a0 = {d.name: d for d in defs}["a0"]
    assert a0.params == ("self",)
    guard, pc_part, unchanged = a0.body.items
    assert guard == T.Eq(T.FnApp(T.Name("pc"), T.Name("self")),
                         T.StrLit("a0"))
    assert pc_part == T.Eq(
        T.Prime(T.Name("pc")),
        T.Except(T.Name("pc"), T.Name("self"), T.StrLit("a1")))
    assert unchanged == T.Unchanged(T.Tup((T.Name("flag"), T.Name("turn"))))


def test_indexed_assignment_becomes_except():
    _, (_, defs) = translate_fixture()
    a1 = {d.name: d for d in defs}["a1"]
    guard, assign, pc_part, turn_same = a1.body.items
    assert assign == T.Eq(
        T.Prime(T.Name("flag")),
        T.Except(T.Name("flag"), T.Name("self"), T.BoolLit(True)))
    # a single leftover variable is kept by equality, not UNCHANGED
    assert turn_same == T.Eq(T.Prime(T.Name("turn")), T.Name("turn"))


def test_branch_wraps_only_the_pc_conjunct():
    _, (_, defs) = translate_fixture()
    a3a = {d.name: d for d in defs}["a3a"]
    guard, pc_part, unchanged = a3a.body.items
    assert isinstance(pc_part, T.If)
    assert pc_part.cond == T.FnApp(
        T.Name("flag"), T.Apply("Not", (T.Name("self"),)))
    assert pc_part.then == T.Eq(
        T.Prime(T.Name("pc")),
        T.Except(T.Name("pc"), T.Name("self"), T.StrLit("a3b")))
    assert pc_part.orelse == T.Eq(
        T.Prime(T.Name("pc")),
        T.Except(T.Name("pc"), T.Name("self"), T.StrLit("cs")))
    assert isinstance(unchanged, T.Unchanged)


def test_loop_body_falls_back_to_header():
    _, (_, defs) = translate_fixture()
    a4 = {d.name: d for d in defs}["a4"]
    pc_part = a4.body.items[2]
    assert pc_part.rhs.value == T.StrLit("a0")


def test_next_and_spec_shape():
    _, (_, defs) = translate_fixture()
    by_name = {d.name: d for d in defs}
    nxt = by_name["Next"].body
    assert nxt == T.Exists(
        "self", T.SetEnum((T.IntLit(0), T.IntLit(1))),
        T.Apply("proc", (T.BoundRef(0, "self"),)))
    spec = by_name["Spec"].body
    assert spec == T.And((
        T.Name("Init"),
        T.Always(T.BoxAction(T.Name("Next"), T.Name("vars")))))
    proc = by_name["proc"].body
    assert isinstance(proc, T.Or) and len(proc.items) == 7


# --- small algorithms ------------------------------------------------------------


def test_skip_only_process():
    src = """--algorithm tiny {
      variables n = 0;
      process (p \\in {0}) {
        l0: skip;
      }
    }"""
    alg = pluscal.parse_algorithm(src)
    variables, defs = pluscal.translate(alg)
    assert variables == ("n", "pc")
    assert pluscal.summary(alg, defs) == "translated: 1 actions, 6 definitions"
    l0 = defs[2]
    assert l0.name == "l0"
    assert l0.body == T.And((
        T.Eq(T.FnApp(T.Name("pc"), T.Name("self")), T.StrLit("l0")),
        T.Eq(T.Prime(T.Name("pc")),
             T.Except(T.Name("pc"), T.Name("self"), T.StrLit("Done"))),
        T.Eq(T.Prime(T.Name("n")), T.Name("n")),
    ))


def test_two_assignments_in_one_step():
    src = """--algorithm two {
      variables x = 0, y = 0;
      process (p \\in {0}) {
        l0: x := 1; y := 2;
      }
    }"""
    alg = pluscal.parse_algorithm(src)
    variables, defs = pluscal.translate(alg)
    l0 = defs[2].body
    assert l0.items == (
        T.Eq(T.FnApp(T.Name("pc"), T.Name("self")), T.StrLit("l0")),
        T.Eq(T.Prime(T.Name("x")), T.IntLit(1)),
        T.Eq(T.Prime(T.Name("y")), T.IntLit(2)),
        T.Eq(T.Prime(T.Name("pc")),
             T.Except(T.Name("pc"), T.Name("self"), T.StrLit("Done"))),
    )


def test_goto_done_is_allowed():
    src = """--algorithm g {
      variables n = 0;
      process (p \\in {0}) {
        l0: goto Done;
      }
    }"""
    variables, defs = pluscal.translate(pluscal.parse_algorithm(src))
    pc_part = defs[2].body.items[1]
    assert pc_part.rhs.value == T.StrLit("Done")


# --- rejected shapes -------------------------------------------------------------


def small(body):
    return """--algorithm bad {
      variables x = 0, y = 0;
      process (p \\in {0}) {
        %s
      }
    }""" % body


def test_first_statement_must_be_labeled():
    with pytest.raises(E.UnlabeledStatement):
        pluscal.parse_algorithm(small("x := 1;"))


def test_statement_after_branch_must_be_labeled():
    with pytest.raises(E.UnlabeledStatement):
        pluscal.parse_algorithm(small("l0: goto l1; skip; l1: skip;"))


def test_assignment_after_branch():
    with pytest.raises(E.AssignmentAfterBranch):
        pluscal.parse_algorithm(small("l0: goto l1; x := 1; l1: skip;"))


def test_while_must_be_labeled():
    with pytest.raises(E.UnlabeledStatement, match="while must be labeled"):
        pluscal.parse_algorithm(
            small("l0: x := 1; while (TRUE) { l1: skip; }"))


def test_duplicate_label():
    with pytest.raises(E.DuplicateName, match="duplicate label"):
        pluscal.parse_algorithm(small("l0: skip; l0: skip;"))


def test_done_label_is_reserved():
    with pytest.raises(E.DuplicateName, match="Done is reserved"):
        pluscal.parse_algorithm(small("Done: skip;"))


def test_duplicate_variable():
    src = """--algorithm bad {
      variables x = 0, x = 1;
      process (p \\in {0}) { l0: skip; }
    }"""
    with pytest.raises(E.DuplicateName):
        pluscal.parse_algorithm(src)


def test_unknown_goto_target():
    with pytest.raises(E.UnknownGotoTarget):
        pluscal.parse_algorithm(small("l0: goto zz;"))


def test_assignment_target_must_be_declared():
    with pytest.raises(E.ScopeError, match="q"):
        pluscal.parse_algorithm(small("l0: q := 1;"))


def test_double_assignment_to_same_variable():
    with pytest.raises(E.MultipleAssignSameVar):
        pluscal.parse_algorithm(small("l0: x := 1; x := 2;"))


def test_branch_arm_must_be_a_single_goto():
    with pytest.raises(E.PlusCalError, match="single goto"):
        pluscal.parse_algorithm(
            small("l0: if (TRUE) { skip } else { goto l0 };"))


def test_while_body_must_not_be_empty():
    with pytest.raises(E.PlusCalError):
        pluscal.parse_algorithm(small("l0: while (TRUE) { }"))


# --- splicing into module text ---------------------------------------------------


def test_splice_is_idempotent_on_the_fixture():
    text = fixture_text()
    alg, (variables, defs) = translate_fixture()
    assert pluscal.splice(text, pluscal.render_block(variables, defs)) == text


def test_splice_requires_markers():
    with pytest.raises(E.PlusCalError):
        pluscal.splice("---- MODULE m ----\n====\n", "X")


def test_splice_rejects_reversed_markers():
    text = "%s\n%s\n" % (pluscal.END_MARK, pluscal.BEGIN_MARK)
    with pytest.raises(E.PlusCalError):
        pluscal.splice(text, "X")


def test_error_positions_are_file_accurate():
    # strip one label from the fixture and the error should point at the
    # statement's true line in the file
    text = fixture_text().replace("a1: flag[self]", "flag[self]")
    block, line, col = pluscal.locate_algorithm(text)
    with pytest.raises(E.UnlabeledStatement) as exc:
        pluscal.parse_algorithm(block, line, col)
    want = next(i for i, ln in enumerate(text.splitlines(), start=1)
                if "flag[self] := TRUE" in ln)
    assert exc.value.line == want


def test_comment_without_algorithm_is_not_located():
    assert pluscal.locate_algorithm("(* nothing here *)\n")[0] is None
