"""Proof elaboration on the Peterson fixture and on small modules.

The fixture inventory (which steps produce which obligations, with how
many assumed facts) is frozen by hand from the proof text, so structural
regressions in elaboration show up as inventory diffs.
"""
from pathlib import Path

import pytest

from petrel import proofman, terms as T
from petrel import errors as E
from petrel.parser import parse_module
from petrel.proofman import FactItem, NewDecl

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "peterson.tla"


def elaborate_fixture():
    return proofman.elaborate_module(parse_module(FIXTURE.read_text()))


def module(body):
    return parse_module("---- MODULE scratch ----\n" + body + "\n====\n")


# --- fixture inventory -----------------------------------------------------------

# (label, kind, omitted, assumed fact count), in elaboration order
INVENTORY = [
    ("<1>1", "leaf", False, 0),
    ("<2>1", "suffices", False, 1),
    ("<2>2", "leaf", False, 2),
    ("<3>1", "suffices", False, 1),
    ("<3>2", "pick", False, 2),
    ("<3>2", "pick-side", False, 1),
    ("<3>3", "leaf", False, 4),
    ("<3>4", "leaf", False, 4),
    ("<3>5", "qed", False, 3),
    ("<2>4", "qed", False, 2),
    ("<1>3", "leaf", False, 0),
    ("<1>4", "qed", True, 0),
]


def test_fixture_obligation_inventory():
    _, obs = elaborate_fixture()
    got = [(ob.label, ob.kind, ob.omitted, len(ob.facts())) for ob in obs]
    assert got == INVENTORY


def test_fixture_step_tree_counts():
    roots, obs = elaborate_fixture()
    assert len(roots) == 1
    root = roots[0]
    assert root.label == "theorem 1"
    # selecting <1>2 covers its whole subtree: every <2> and <3> obligation
    node = root.find("<1>2")
    assert node is not None
    assert len(list(node.all_obligations())) == 9
    assert len(list(root.all_obligations())) == len(obs) == 12


def test_every_obligation_sees_the_module_declarations():
    _, obs = elaborate_fixture()
    for ob in obs:
        kinds = {item.name: item.kind for item in ob.context
                 if isinstance(item, NewDecl)}
        assert {"flag", "turn", "pc"} <= set(kinds)
        assert all(kinds[v] == "VARIABLE" for v in ("flag", "turn", "pc"))


def test_suffices_rewrites_the_goal_for_later_steps():
    _, obs = elaborate_fixture()
    by_label = {(ob.label, ob.kind): ob for ob in obs}
    # after <2>1 (SUFFICES ASSUME Inv, Next PROVE Inv'), <2>2 proves TypeOK'
    ob22 = by_label[("<2>2", "leaf")]
    assert ob22.goal == T.Prime(T.Name("TypeOK"))
    srcs = [f.source for f in ob22.facts()]
    assert srcs.count("<2>1") == 2  # the two assumptions of the reduction
    # after <3>1, the qed at level 3 proves the projected invariant body
    ob35 = by_label[("<3>5", "qed")]
    assert isinstance(ob35.goal, T.Prime)
    assert isinstance(ob35.goal.item, T.Bang)


def test_pick_introduces_witness_and_side_condition():
    _, obs = elaborate_fixture()
    pick = [ob for ob in obs if ob.label == "<3>2"]
    assert [ob.kind for ob in pick] == ["pick", "pick-side"]
    side = pick[1]
    assert isinstance(side.goal, T.Exists)
    # later steps see the witness as a bounded constant plus its predicate
    ob33 = [ob for ob in obs if ob.label == "<3>3"][0]
    decls = {it.name: it for it in ob33.context if isinstance(it, NewDecl)}
    assert decls["i"].kind == "CONSTANT"
    assert decls["i"].domain == T.SetEnum((T.IntLit(0), T.IntLit(1)))
    assert any(f.formula == T.Apply("proc", (T.Name("i"),)) and f.usable
               for f in ob33.facts())


def test_trivial_theorem_elaborates_to_one_bare_obligation():
    roots, obs = proofman.elaborate_module(
        module("THEOREM TRUE\nOBVIOUS"))
    assert len(obs) == 1
    ob = obs[0]
    assert (ob.label, ob.kind, ob.context) == ("theorem 1", "leaf", ())
    assert proofman.print_obligation(ob) == "PROVE TRUE"


def test_case_assumption_is_citable_then_becomes_an_implication():
    m = module(
        "VARIABLES x\n"
        "THEOREM x = 0 \\/ x = 1 => x \\in {0, 1}\n"
        "  <1>1. CASE x = 0\n"
        "    BY <1>1\n"
        "  <1>2. CASE x = 1\n"
        "    BY <1>2\n"
        "  <1>3. QED\n"
        "    BY <1>1, <1>2\n")
    _, obs = proofman.elaborate_module(m)
    case0 = obs[0]
    assert any(f.formula == T.Eq(T.Name("x"), T.IntLit(0)) and
               f.source == "<1>1" for f in case0.facts())
    qed = [ob for ob in obs if ob.kind == "qed"][0]
    cited = [f.formula for f in qed.facts()]
    assert T.Implies(T.Eq(T.Name("x"), T.IntLit(0)), qed.goal) in cited
    assert T.Implies(T.Eq(T.Name("x"), T.IntLit(1)), qed.goal) in cited


def test_assert_step_records_closure_over_new_constants():
    m = module(
        "VARIABLES x\n"
        "THEOREM x \\in {0, 1} => x * x = x\n"
        "  <1>1. ASSUME NEW CONSTANT n \\in {0, 1}\n"
        "        PROVE n * n = n\n"
        "    OBVIOUS\n"
        "  <1>2. QED\n"
        "    BY <1>1\n")
    _, obs = proofman.elaborate_module(m)
    qed = obs[-1]
    quantified = [f.formula for f in qed.facts() if f.source == "<1>1"]
    assert len(quantified) == 1
    f = quantified[0]
    assert isinstance(f, T.Forall)
    assert f.domain == T.SetEnum((T.IntLit(0), T.IntLit(1)))


def test_unknown_step_reference_is_rejected():
    with pytest.raises(E.DanglingStepReference):
        module("THEOREM TRUE\n  <1>1. QED\n    BY <9>9\n")
    roots, _ = elaborate_fixture()
    with pytest.raises(E.UnknownStepReference) as exc:
        proofman._select(roots, step="<9>9")
    assert "no step labeled <9>9" in str(exc.value)
    with pytest.raises(E.UnknownStepReference):
        proofman._select(roots, theorem=2)


def test_def_citation_must_name_a_definition():
    import petrel.parser as P
    with pytest.raises(E.ScopeError):
        module("THEOREM TRUE\n  <1>1. QED\n    BY DEF NoSuchThing\n")
    # the elaborator re-checks the same rule for programmatic callers
    el = proofman._Elaborator(module("THEOREM TRUE\nOBVIOUS"))
    by = P.ByProof(facts=(), defs=("Ghost",), span=None)
    with pytest.raises(E.DefBeforeUse):
        el.resolve(by, list(el.base), "<1>1")


def test_step_lists_must_close_with_qed():
    # the parser rejects the concrete syntax; the elaborator guards the
    # same invariant for programmatic proof trees
    with pytest.raises(E.MissingQED):
        module("THEOREM TRUE\n  <1>1. TRUE\n    OBVIOUS\n")
    el = proofman._Elaborator(module("THEOREM TRUE\nOBVIOUS"))
    node = proofman.StepNode("theorem 1", "theorem", span=None)
    with pytest.raises(E.GoalMismatch):
        el.steps([], list(el.base), T.BoolLit(True), node)


def test_generalizing_a_domainless_constant_is_an_error():
    m = module(
        "THEOREM TRUE\n"
        "  <1>1. ASSUME NEW CONSTANT c PROVE TRUE\n"
        "    OBVIOUS\n"
        "  <1>2. QED\n    BY <1>1\n")
    with pytest.raises(E.ProofError):
        proofman.elaborate(m)


# --- display ---------------------------------------------------------------------

REDUCED_DISPLAY = """\
ASSUME NEW VARIABLE flag,
       NEW VARIABLE turn,
       NEW VARIABLE pc
PROVE  (/\\ flag = [i \\in {0, 1} |-> FALSE]
         /\\ turn = 0
         /\\ pc = [self \\in {0, 1} |-> "a0"])
        => TypeOK /\\ I"""


def test_reduced_init_step_display_is_frozen():
    src = FIXTURE.read_text().replace(
        "BY DEFS Init, Inv, TypeOK, I", "BY DEF Init, Inv", 1)
    _, obs = proofman.elaborate_module(parse_module(src))
    ob = [o for o in obs if o.label == "<1>1"][0]
    assert proofman.print_obligation(ob) == REDUCED_DISPLAY


def test_display_hides_definitions_not_cited():
    _, obs = elaborate_fixture()
    ob = [o for o in obs if o.label == "<3>5"][0]  # BY <3>3, <3>4 (no DEF)
    text = proofman.print_obligation(ob)
    assert "ASSUME" in text and "PROVE" in text
    # the goal stays in terms of the projection, not its expansion
    assert "I!" in text or "I(" in text or "(I" in text


def test_combine_statuses_is_pessimistic():
    P = proofman
    assert P.combine_statuses([]) == P.PROVED
    assert P.combine_statuses([P.PROVED, P.OMITTED]) == P.OMITTED
    assert P.combine_statuses([P.FAILED, P.CANCELED]) == P.FAILED
    assert P.combine_statuses([P.PROVED, P.PENDING]) == P.PENDING
    assert P.combine_statuses([P.OMITTED, P.PENDING]) == P.PENDING
