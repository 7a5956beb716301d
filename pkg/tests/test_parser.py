"""Parser and printer: round trips, precedence, layout, errors.

The load-bearing property is the structural round trip: for any term the
printer can emit, reparsing the output yields an equal tree, in both the
single-line and the multi-line bullet layouts.
"""
import pytest
from hypothesis import given, settings

from petrel import printer, terms as T
from petrel import errors as E
from petrel.parser import parse_expression, parse_module

from _gen import general_expr, with_matched_hints


def pe(s):
    return parse_expression(s)


# --- round trips ---------------------------------------------------------------


@settings(max_examples=250, deadline=None)
@given(general_expr())
def test_inline_round_trip(e):
    e = with_matched_hints(e)
    assert pe(printer.inline(e)) == e


@settings(max_examples=250, deadline=None)
@given(general_expr())
def test_block_round_trip(e):
    e = with_matched_hints(e)
    assert pe(printer.block(e, 0)) == e


MODULE = """\
---- MODULE scratch ----
CONSTANTS N

VARIABLES x, y

Not(self) == IF self = 0 THEN 1 ELSE 0

Init == /\\ x = 0
        /\\ y = [i \\in {0, 1} |-> 0]

Bump == /\\ x' = x + 1
        /\\ y' = [y EXCEPT ![0] = 1 - y[0]]

Next == \\/ Bump
        \\/ /\\ x = N
           /\\ UNCHANGED <<x, y>>

Spec == Init /\\ [][Next]_<<x, y>>

Small == \\A i \\in {0, 1}: \\E j \\in {0, 1}: y[i] = j

THEOREM sanity == Spec => []Small
  <1>1. Init => Small
    BY DEF Init, Small
  <1>2. ASSUME NEW CONSTANT k \\in {0, 1},
               Small
        PROVE y[k] \\in {0, 1}
    <2>1. CASE k = 0
      BY <2>1 DEF Small
    <2>2. QED
      BY <2>1
  <1>3. SUFFICES Small => Small
    OBVIOUS
  <1>4. PICK w \\in {0, 1}: y[w] = 0
    OMITTED
  <1>5. QED
    BY <1>1, <1>2, <1>3, <1>4 DEF Spec
====
"""


def test_module_round_trip():
    m1 = parse_module(MODULE)
    m2 = parse_module(printer.format_module(m1))
    assert m2.name == m1.name
    assert m2.constants == m1.constants
    assert m2.variables == m1.variables
    assert m2.defs == m1.defs
    assert m2.theorems == m1.theorems


def test_module_shape():
    m = parse_module(MODULE)
    assert [d.name for d in m.defs] == [
        "Not", "Init", "Bump", "Next", "Spec", "Small"]
    th = m.theorems[0]
    assert th.name == "sanity"
    assert th.goal == T.Implies(T.Name("Spec"), T.Always(T.Name("Small")))
    labels = [s.label for s in th.proof.steps]
    assert labels == ["<1>1", "<1>2", "<1>3", "<1>4", "<1>5"]


# --- precedence and associativity ---------------------------------------------


def test_connective_precedence():
    a, b, c = T.Name("a"), T.Name("b"), T.Name("c")
    assert pe("a /\\ b \\/ c") == T.Or((T.And((a, b)), c))
    assert pe("a \\/ b /\\ c") == T.Or((a, T.And((b, c))))
    assert pe("a => b => c") == T.Implies(a, T.Implies(b, c))
    assert pe("a /\\ b /\\ c") == T.And((a, b, c))
    assert pe("~a /\\ b") == T.And((T.Not(a), b))


def test_arithmetic_precedence():
    a, b, c = T.Name("a"), T.Name("b"), T.Name("c")
    assert pe("a + b * c") == T.Arith("+", a, T.Arith("*", b, c))
    assert pe("a - b - c") == T.Arith("-", T.Arith("-", a, b), c)
    assert pe("1 - y[0]") == T.Arith("-", T.IntLit(1),
                                     T.FnApp(T.Name("y"), T.IntLit(0)))


def test_comparisons_do_not_chain():
    with pytest.raises(E.SyntaxError):
        pe("a = b = c")


def test_postfix_binds_tightest():
    x = T.Name("x")
    assert pe("~x'") == T.Not(T.Prime(x))
    assert pe("x'[i]") == T.FnApp(T.Prime(x), T.Name("i"))
    assert pe("I!(j)'") == T.Prime(T.Bang("I", T.Name("j")))


def test_negation_sugar():
    assert pe("x # y") == T.Not(T.Eq(T.Name("x"), T.Name("y")))
    assert pe("x \\notin S") == T.Not(T.In(T.Name("x"), T.Name("S")))


def test_temporal_forms():
    box = pe("[][Next]_<<x, y>>")
    assert box == T.Always(T.BoxAction(
        T.Name("Next"), T.Tup((T.Name("x"), T.Name("y")))))
    assert pe("[Next]_vars") == T.BoxAction(T.Name("Next"), T.Name("vars"))


def test_unchanged_forms():
    assert pe("UNCHANGED x") == T.Unchanged(T.Name("x"))
    assert pe("UNCHANGED <<x, y>>") == T.Unchanged(
        T.Tup((T.Name("x"), T.Name("y"))))


def test_quantifiers_bind_de_bruijn():
    e = pe("\\A i \\in {0, 1}: \\E j \\in {0, 1}: f[i] = j")
    dom = T.SetEnum((T.IntLit(0), T.IntLit(1)))
    assert e == T.Forall("i", dom, T.Exists("j", dom, T.Eq(
        T.FnApp(T.Name("f"), T.BoundRef(1, "i")), T.BoundRef(0, "j"))))


def test_function_forms():
    assert pe("[i \\in S |-> 0]") == T.FnLit("i", T.Name("S"), T.IntLit(0))
    assert pe("[S -> T]") == T.FnSet(T.Name("S"), T.Name("T"))
    assert pe("[f EXCEPT ![i] = 1 - f[i]]") == T.Except(
        T.Name("f"), T.Name("i"),
        T.Arith("-", T.IntLit(1), T.FnApp(T.Name("f"), T.Name("i"))))


# --- bullet layout -------------------------------------------------------------


def test_bullets_align_into_one_list():
    e = pe("/\\ a\n/\\ b => c\n/\\ d")
    assert e == T.And((T.Name("a"),
                       T.Implies(T.Name("b"), T.Name("c")),
                       T.Name("d")))


def test_bullets_nest_by_column():
    e = pe("/\\ x\n/\\ \\/ y\n   \\/ z")
    assert e == T.And((T.Name("x"), T.Or((T.Name("y"), T.Name("z")))))


def test_single_bullet_unwraps():
    assert pe("/\\ a /\\ b") == T.And((T.Name("a"), T.Name("b")))
    assert pe("\\/ a") == T.Name("a")


def test_parenthesized_bullets_feed_implication():
    e = pe("(/\\ a\n /\\ b) => c")
    assert e == T.Implies(T.And((T.Name("a"), T.Name("b"))), T.Name("c"))


def test_dedented_token_ends_the_list():
    src = """\
---- MODULE m ----
VARIABLES x

A == /\\ x = 0
     /\\ x = 1

B == x = 2
====
"""
    m = parse_module(src)
    assert m.defs[0].body == T.And((T.Eq(T.Name("x"), T.IntLit(0)),
                                    T.Eq(T.Name("x"), T.IntLit(1))))
    assert m.defs[1].body == T.Eq(T.Name("x"), T.IntLit(2))


def test_bullets_on_implication_rhs():
    e = pe("a => /\\ b\n     /\\ c")
    assert e == T.Implies(T.Name("a"), T.And((T.Name("b"), T.Name("c"))))


# --- name resolution errors ------------------------------------------------------


def wrap(defs, theorem=""):
    return f"---- MODULE m ----\nVARIABLES x\n{defs}\n{theorem}\n====\n"


def test_unknown_name_is_a_scope_error():
    with pytest.raises(E.ScopeError):
        parse_module(wrap("A == zz"))


def test_use_before_definition_is_an_order_error():
    with pytest.raises(E.OrderError) as exc:
        parse_module(wrap("A == B\nB == x = 0"))
    assert "B" in exc.value.message


def test_duplicate_names_rejected():
    with pytest.raises(E.DuplicateName):
        parse_module(wrap("A == x = 0\nA == x = 1"))
    with pytest.raises(E.DuplicateName):
        parse_module("---- MODULE m ----\nVARIABLES x, x\n====\n")
    with pytest.raises(E.DuplicateName):
        parse_module(wrap(
            "A == x = 0",
            "THEOREM A\n  <1>1. A\n    OBVIOUS\n  <1>1. QED\n    BY <1>1"))


def test_proof_must_end_with_qed():
    with pytest.raises(E.MissingQED):
        parse_module(wrap(
            "A == x = 0", "THEOREM A\n  <1>1. A\n    OBVIOUS"))


def test_dangling_step_reference():
    with pytest.raises(E.DanglingStepReference):
        parse_module(wrap(
            "A == x = 0",
            "THEOREM A\n  <1>1. QED\n    BY <1>9"))


def test_step_without_proof_is_a_syntax_error():
    with pytest.raises(E.SyntaxError):
        parse_module(wrap(
            "A == x = 0",
            "THEOREM A\n  <1>1. A\n  <1>2. QED\n    BY <1>1"))


def test_errors_carry_positions():
    with pytest.raises(E.ScopeError) as exc:
        parse_module("---- MODULE m ----\nA == zz\n====\n")
    assert exc.value.line == 2
    assert exc.value.col >= 6


# --- embedded algorithm blocks ---------------------------------------------------


def test_algorithm_comment_is_captured():
    src = """\
---- MODULE m ----
VARIABLES x
(* --algorithm demo
variables x = 0;
begin-ish (* nested comment *) text
end algorithm *)
A == x = 0
====
"""
    m = parse_module(src)
    assert m.pluscal_src is not None
    assert m.pluscal_src.startswith("--algorithm demo")
    assert "nested comment" in m.pluscal_src


def test_plain_comments_are_not_an_algorithm():
    m = parse_module("---- MODULE m ----\n(* just notes *)\nVARIABLES x\n====\n")
    assert m.pluscal_src is None
