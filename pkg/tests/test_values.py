"""Value semantics: extensional equality, canonical bytes, rendering."""
import pytest
from hypothesis import given, strategies as st

from petrel.values import (
    VBool, VInt, VStr, VSet, VFunc, VTuple,
    value_eq, value_bytes, format_value,
)


def S(*xs):
    return VSet(xs)


def F(*pairs):
    return VFunc(pairs)


# --- equality --------------------------------------------------------------------


def test_top_level_kind_mismatch_is_undefined():
    assert value_eq(VInt(0), VBool(False)) is None
    assert value_eq(VInt(1), VStr("1")) is None
    assert value_eq(S(VInt(1)), VInt(1)) is None
    assert value_eq(F((VInt(0), VInt(0))), VTuple((VInt(0),))) is None


def test_kind_mismatch_inside_a_set_just_means_distinct():
    assert value_eq(S(VInt(0)), S(VBool(False))) is False
    assert value_eq(S(VInt(0), VBool(False)), S(VBool(False), VInt(0))) is True


def test_sets_are_extensional():
    assert value_eq(S(VInt(1), VInt(2)), S(VInt(2), VInt(1))) is True
    assert value_eq(S(VInt(1), VInt(1), VInt(2)), S(VInt(2), VInt(1))) is True
    assert value_eq(S(), S()) is True
    assert value_eq(S(VInt(1)), S(VInt(1), VInt(2))) is False


def test_functions_are_extensional():
    f = F((VInt(0), VStr("a")), (VInt(1), VStr("b")))
    g = F((VInt(1), VStr("b")), (VInt(0), VStr("a")))
    assert value_eq(f, g) is True
    assert value_eq(f, F((VInt(0), VStr("a")))) is False  # smaller domain
    assert value_eq(f, F((VInt(0), VStr("a")), (VInt(1), VStr("c")))) is False


def test_tuples_compare_elementwise():
    assert value_eq(VTuple((VInt(1), VInt(2))), VTuple((VInt(1), VInt(2)))) is True
    assert value_eq(VTuple((VInt(1),)), VTuple((VInt(1), VInt(2)))) is False
    # kind mismatch inside a tuple is inequality, not an error
    assert value_eq(VTuple((VInt(0),)), VTuple((VBool(False),))) is False


def test_apply():
    f = F((VInt(0), VStr("a")))
    assert f.apply(VInt(0)) == VStr("a")
    assert f.apply(VInt(7)) is None


# --- canonical bytes -------------------------------------------------------------


def test_equal_sets_encode_equally():
    assert value_bytes(S(VInt(1), VInt(2))) == value_bytes(S(VInt(2), VInt(1)))
    assert value_bytes(S(VInt(1), VInt(1))) == value_bytes(S(VInt(1)))


def test_equal_functions_encode_equally():
    f = F((VInt(0), VBool(True)), (VInt(1), VBool(False)))
    g = F((VInt(1), VBool(False)), (VInt(0), VBool(True)))
    assert value_bytes(f) == value_bytes(g)


def test_values_hash_consistently():
    d = {S(VInt(1), VInt(2)): "x"}
    assert d[S(VInt(2), VInt(1))] == "x"


# a small recursive value generator; same-kind pairs let us compare
# value_eq against the byte encoding
atoms = st.one_of(
    st.integers(-3, 3).map(VInt),
    st.booleans().map(VBool),
    st.sampled_from(["a", "b"]).map(VStr),
)
values = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.lists(inner, max_size=3).map(lambda xs: VSet(xs)),
        st.lists(st.tuples(st.integers(0, 2).map(VInt), inner),
                 max_size=3, unique_by=lambda kv: kv[0].value)
          .map(lambda ps: VFunc(ps)),
        st.lists(inner, max_size=3).map(lambda xs: VTuple(tuple(xs))),
    ),
    max_leaves=6,
)


@given(values, values)
def test_bytes_decide_equality(a, b):
    r = value_eq(a, b)
    if r is None:
        return  # incomparable at top level; encodings may still differ
    assert r == (value_bytes(a) == value_bytes(b))


@given(values)
def test_equality_is_reflexive(a):
    assert value_eq(a, a) is True


# --- rendering -------------------------------------------------------------------


def test_format_atoms():
    assert format_value(VBool(True)) == "TRUE"
    assert format_value(VInt(-2)) == "-2"
    assert format_value(VStr("cs")) == '"cs"'


def test_format_containers_deterministically():
    assert format_value(S(VInt(2), VInt(1))) == "{1, 2}"
    assert format_value(S(VInt(0), VBool(False), VStr("a"))) == '{FALSE, 0, "a"}'
    f = F((VInt(1), VBool(True)), (VInt(0), VBool(False)))
    assert format_value(f) == "[0 |-> FALSE, 1 |-> TRUE]"
    assert format_value(VTuple((VInt(1), VInt(2)))) == "<<1, 2>>"
