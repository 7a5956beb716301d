"""Model checker tests against the Peterson fixture.

The expected numbers come from a hand-coded walk of the algorithm
written directly in Python below, independent of the evaluator and of
the translated actions, so the checker and the oracle can only agree if
both are right.
"""
from itertools import product
from pathlib import Path

import pytest

from petrel import mcheck, terms as T
from petrel.errors import ExecutionError
from petrel.parser import parse_module, parse_expression

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "peterson.tla"

LABELS = ("a0", "a1", "a2", "a3a", "a3b", "cs", "a4")


def load():
    m = parse_module(FIXTURE.read_text())
    defs = {d.name: d for d in m.defs}
    return m, defs, defs["Init"].body, defs["Next"].body


# --- the hand-coded oracle -------------------------------------------------------


def upd(t, i, v):
    return t[:i] + (v,) + t[i + 1:]


def hand_successors(s):
    """One process takes one step; state is (pc pair, flag pair, turn)."""
    pc, flag, turn = s
    for i in (0, 1):
        j = 1 - i
        p = pc[i]
        if p == "a0":
            yield (upd(pc, i, "a1"), flag, turn)
        elif p == "a1":
            yield (upd(pc, i, "a2"), upd(flag, i, True), turn)
        elif p == "a2":
            yield (upd(pc, i, "a3a"), flag, j)
        elif p == "a3a":
            yield (upd(pc, i, "a3b" if flag[j] else "cs"), flag, turn)
        elif p == "a3b":
            yield (upd(pc, i, "a3a" if turn == j else "cs"), flag, turn)
        elif p == "cs":
            yield (upd(pc, i, "a4"), flag, turn)
        elif p == "a4":
            yield (upd(pc, i, "a0"), upd(flag, i, False), turn)


def hand_reachable():
    init = (("a0", "a0"), (False, False), 0)
    seen = {init}
    frontier = [init]
    while frontier:
        frontier = [s2 for s in frontier for s2 in hand_successors(s)
                    if not (s2 in seen or seen.add(s2))]
    return seen


def hand_inv(pc, flag, turn):
    for i in (0, 1):
        j = 1 - i
        if pc[i] in ("a2", "a3a", "a3b", "cs", "a4") and not flag[i]:
            return False
        if pc[i] in ("cs", "a4"):
            if pc[j] in ("cs", "a4"):
                return False
            if pc[j] in ("a3a", "a3b") and turn != i:
                return False
    return True


def all_candidates():
    return [(pc, flag, turn)
            for pc in product(LABELS, LABELS)
            for flag in product((False, True), (False, True))
            for turn in (0, 1)]


def test_oracle_is_frozen():
    # keep the oracle honest: these counts were computed once and frozen
    reach = hand_reachable()
    assert len(reach) == 58
    assert all(not (pc[0] == "cs" and pc[1] == "cs") for pc, _, _ in reach)
    cands = all_candidates()
    assert len(cands) == len(LABELS) ** 2 * 2 * 2 ** 2 == 392
    assert sum(1 for c in cands if hand_inv(*c)) == 146
    assert all(hand_inv(*s) for s in reach)


# --- reachability ----------------------------------------------------------------


def test_peterson_has_58_reachable_states():
    m, defs, init, nxt = load()
    r = mcheck.check_invariant(init, nxt, T.Name("MutualExclusion"),
                               m.variables, defs,
                               inv_name="MutualExclusion")
    assert isinstance(r, mcheck.CheckOK)
    assert r.states == len(hand_reachable()) == 58


def test_weakened_invariant_gives_shortest_trace():
    m, defs, init, nxt = load()
    v = mcheck.check_invariant(init, nxt, parse_expression('pc[0] # "cs"'),
                               m.variables, defs, inv_name="weak")
    assert isinstance(v, mcheck.Violation)
    assert v.invariant == "weak"
    assert [a for a, _ in v.trace] == [None, "a0(0)", "a1(0)", "a2(0)",
                                       "a3a(0)"]
    last = v.trace[-1][1]
    assert mcheck.format_state(last) == (
        'flag = [0 |-> TRUE, 1 |-> FALSE] /\\ '
        'pc = [0 |-> "cs", 1 |-> "a0"] /\\ turn = 1')
    assert v.states == 11  # found on the 11th state popped


def test_trace_states_follow_hand_semantics():
    # every step of the reported trace must be a hand-oracle transition
    m, defs, init, nxt = load()
    v = mcheck.check_invariant(init, nxt, parse_expression('pc[0] # "cs"'),
                               m.variables, defs)

    def tuple_of(s):
        pc = dict(s["pc"].graph)
        flag = dict(s["flag"].graph)
        i0, i1 = mcheck.VInt(0), mcheck.VInt(1)
        return ((pc[i0].value, pc[i1].value),
                (flag[i0].value, flag[i1].value),
                s["turn"].value)

    walk = [tuple_of(s) for _, s in v.trace]
    assert walk[0] == (("a0", "a0"), (False, False), 0)
    for before, after in zip(walk, walk[1:]):
        assert after in set(hand_successors(before))


# --- inductiveness ---------------------------------------------------------------


def test_inv_is_inductive():
    m, defs, _, nxt = load()
    r = mcheck.check_inductive(T.Name("Inv"), nxt, m.variables, defs)
    assert isinstance(r, mcheck.InductiveOK)
    assert r.candidates == 392
    assert r.checked == 146


def test_mutual_exclusion_alone_is_not_inductive():
    m, defs, _, nxt = load()
    inv = T.And((T.Name("TypeOK"), T.Name("MutualExclusion")))
    r = mcheck.check_inductive(inv, nxt, m.variables, defs)
    assert isinstance(r, mcheck.CTI)
    assert r.candidates == 392

    # the counterexample must be genuine: inv holds before, the step is
    # a real transition of the named action, and inv fails after
    from petrel.values import VBool
    inv_in_defs = mcheck._prepare(inv, defs)
    assert mcheck.eval_expr(inv_in_defs, state=r.state) == VBool(True)
    assert mcheck.eval_expr(inv_in_defs, state=r.successor) == VBool(False)
    bodies = dict(mcheck.decompose_actions(nxt, defs))
    succs = mcheck.action_successors(bodies[r.action], r.state, m.variables)
    assert any(mcheck.state_key(s) == mcheck.state_key(r.successor)
               for s in succs)


# --- execution errors ------------------------------------------------------------


def test_equality_across_kinds_is_an_error():
    with pytest.raises(ExecutionError) as exc:
        mcheck.eval_expr(parse_expression("0 = FALSE"))
    assert exc.value.kind == "incomparable-equality"


def test_checker_reports_incomparable_equality_with_trace():
    m, defs, init, nxt = load()
    r = mcheck.check_invariant(init, nxt, parse_expression("turn = FALSE"),
                               m.variables, defs)
    assert isinstance(r, mcheck.ExecutionErrorReport)
    assert r.kind == "incomparable-equality"
    assert len(r.trace) == 1  # fails on the initial state


def test_apply_outside_domain():
    m, defs, init, nxt = load()
    r = mcheck.check_invariant(init, nxt, parse_expression("flag[2]"),
                               m.variables, defs)
    assert isinstance(r, mcheck.ExecutionErrorReport)
    assert r.kind == "apply-outside-domain"
