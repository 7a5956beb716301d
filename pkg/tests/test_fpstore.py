"""Fingerprint stability matrix and the on-disk status store.

The matrix pins down which source edits may and may not move obligation
fingerprints: layout, scoped renamings, and unused additions must leave
every fingerprint alone, while touching a definition body, a goal, or a
citation list must invalidate exactly the obligations that depend on it.
"""
import os
import warnings
from pathlib import Path

import pytest

from petrel import fpstore, proofman
from petrel.errors import CorruptStore
from petrel.fpstore import StatusRecord, Store, fingerprint, load, minimize, store_path
from petrel.parser import parse_module
from petrel.proofman import DefItem, NewDecl

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "peterson.tla"
BASE = FIXTURE.read_text()


def fps(src):
    """(label, kind) -> fingerprint for every obligation of the module."""
    _, obs = proofman.elaborate_module(parse_module(src))
    return {(ob.label, ob.kind): fingerprint(ob) for ob in obs}


def replaced(*pairs):
    src = BASE
    for old, new in pairs:
        assert src.count(old) == 1, f"edit anchor not unique: {old!r}"
        src = src.replace(old, new)
    return src


BASELINE = fps(BASE)


# --- invariance axes -------------------------------------------------------------


def test_layout_and_comments_do_not_move_fingerprints():
    src = replaced(
        ("Inv == TypeOK /\\ I",
         "Inv  ==  TypeOK  /\\  I\n\n\\* the safety argument starts here"),
        ("THEOREM Spec =>", "THEOREM  Spec  =>"),
    )
    assert fps(src) == BASELINE


def test_renaming_a_step_scoped_constant_does_not_move_fingerprints():
    src = replaced(
        ("ASSUME NEW j \\in {0, 1}", "ASSUME NEW k \\in {0, 1}"),
        ("PROVE I!(j)'", "PROVE I!(k)'"),
        ("CASE i = j", "CASE i = k"),
        ("CASE i # j", "CASE i # k"),
    )
    assert fps(src) == BASELINE


def test_inserting_an_unused_definition_does_not_move_fingerprints():
    src = replaced(("THEOREM", "Junk == 42\n\nTHEOREM"))
    assert fps(src) == BASELINE


def test_renaming_a_bound_variable_does_not_move_fingerprints():
    src = replaced(
        ('pc = [self \\in {0, 1} |-> "a0"]',
         'pc = [each \\in {0, 1} |-> "a0"]'))
    assert fps(src) == BASELINE


# --- variance axes ---------------------------------------------------------------


def changed_labels(src):
    edited = fps(src)
    assert edited.keys() == BASELINE.keys()
    return {label for (label, kind) in edited
            if edited[(label, kind)] != BASELINE[(label, kind)]}


def test_editing_the_invariant_body_invalidates_exactly_its_dependents():
    src = replaced(("turn = i", "turn = Not(i)"))
    assert changed_labels(src) == {
        "<1>1", "<1>3", "<2>1", "<3>1", "<3>3", "<3>4", "<3>5"}


def test_editing_the_theorem_goal_invalidates_only_its_qed():
    src = replaced(("THEOREM Spec => []MutualExclusion",
                    "THEOREM Spec => [](MutualExclusion /\\ TRUE)"))
    assert changed_labels(src) == {"<1>4"}


def test_swapping_one_hidden_operator_for_another_is_invariant():
    # an uncited definition is opaque: only its arity enters the
    # fingerprint, so pointing the goal at a different hidden operator
    # of the same arity moves nothing
    src = replaced(("THEOREM Spec => []MutualExclusion",
                    "THEOREM Spec => []Inv"))
    assert changed_labels(src) == set()


def test_narrowing_a_citation_list_invalidates_only_that_step():
    src = replaced(("BY DEFS Init, Inv, TypeOK, I", "BY DEF Init, Inv"))
    assert changed_labels(src) == {"<1>1"}


# --- minimization ----------------------------------------------------------------


def test_minimize_keeps_only_reachable_context():
    _, obs = proofman.elaborate_module(parse_module(BASE))
    ob = [o for o in obs if o.label == "<1>1"][0]
    small = minimize(ob)
    defs = {i.defn.name for i in small.context if isinstance(i, DefItem)}
    decls = {i.name for i in small.context if isinstance(i, NewDecl)}
    assert defs == {"Init", "Inv", "TypeOK", "I", "Not"}
    assert decls == {"flag", "turn", "pc"}
    assert fingerprint(small) == fingerprint(ob)


# --- store -----------------------------------------------------------------------


def test_store_path_suffix():
    assert store_path("specs/m.tla") == "specs/m.tla.fp"


def test_missing_store_loads_empty(tmp_path):
    st = load(str(tmp_path / "none.fp"))
    assert st.records == {} and not st.dirty


def test_save_then_load_round_trips(tmp_path):
    path = str(tmp_path / "m.tla.fp")
    st = Store(path)
    recs = [
        StatusRecord("a" * 64, "proved", "ground", 12, 100),
        StatusRecord("b" * 64, "failed", "ground", 3, 200),
        StatusRecord("c" * 64, "canceled", "smtlib", 60000, 300),
    ]
    for r in recs:
        st.record(r)
    assert st.dirty
    st.save()
    assert not st.dirty
    back = load(path)
    assert back.records == {r.fingerprint: r for r in recs}
    assert back.lookup("a" * 64).status == "proved"
    assert back.lookup("f" * 64) is None
    # the temp file used for atomic replacement is gone
    assert os.listdir(tmp_path) == ["m.tla.fp"]


def test_record_fills_in_a_timestamp():
    st = Store("unused")
    st.record(StatusRecord("d" * 64, "proved", "ground", 1))
    assert st.records["d" * 64].ts > 0


def test_load_skips_unreadable_lines_with_a_warning(tmp_path):
    path = tmp_path / "m.tla.fp"
    good = StatusRecord("e" * 64, "proved", "ground", 5, 50)
    path.write_text(
        good.line()
        + "not a record at all\n"
        + "v0\t" + "f" * 64 + "\tproved\tground\t1\t1\n"   # bad version
        + "v1\tdeadbeef\tproved\tground\t1\t1\n"            # short print
        + "v1\t" + "f" * 64 + "\tmaybe\tground\t1\t1\n"     # bad status
        + "v1\t" + "f" * 64 + "\tproved\tground\tx\t1\n"    # bad number
        + "\n")
    with pytest.warns(CorruptStore):
        st = load(str(path))
    assert st.records == {good.fingerprint: good}


def test_clean_store_loads_without_warnings(tmp_path):
    path = tmp_path / "m.tla.fp"
    st = Store(str(path))
    st.record(StatusRecord("9" * 64, "proved", "ground", 1, 1))
    st.save()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert load(str(path)).records == st.records
