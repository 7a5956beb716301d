"""Runtime values for evaluation and model checking.

Kinds: boolean, integer, string, finite set, function (explicit domain and
graph), tuple.  Set and function equality is extensional.  Equality across
different kinds is not a boolean, it is an evaluation error; the comparison
helper returns None in that case and callers decide how to report it.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Value:
    pass


@dataclass(frozen=True)
class VBool(Value):
    value: bool


@dataclass(frozen=True)
class VInt(Value):
    value: int


@dataclass(frozen=True)
class VStr(Value):
    value: str


class VSet(Value):
    """Finite set; stores members deduplicated, iterates canonically."""

    __slots__ = ("members", "_sorted")

    def __init__(self, members):
        ms = []
        for m in members:
            if not any(value_eq(m, x) for x in ms):
                ms.append(m)
        object.__setattr__(self, "members", tuple(ms))
        object.__setattr__(self, "_sorted", None)

    def sorted_members(self) -> tuple:
        if self._sorted is None:
            object.__setattr__(
                self, "_sorted", tuple(sorted(self.members, key=value_bytes)))
        return self._sorted

    def __eq__(self, other):
        return isinstance(other, VSet) and value_eq(self, other)

    def __hash__(self):
        return hash(value_bytes(self))

    def __repr__(self):
        return f"VSet({list(self.members)!r})"


class VFunc(Value):
    """Function as an explicit graph: tuple of (arg, result) pairs."""

    __slots__ = ("graph",)

    def __init__(self, graph):
        object.__setattr__(self, "graph", tuple(graph))

    def domain(self) -> VSet:
        return VSet(k for k, _ in self.graph)

    def apply(self, arg: Value) -> Optional[Value]:
        for k, v in self.graph:
            if value_eq(arg, k):
                return v
        return None

    def __eq__(self, other):
        return isinstance(other, VFunc) and value_eq(self, other)

    def __hash__(self):
        return hash(value_bytes(self))

    def __repr__(self):
        return f"VFunc({list(self.graph)!r})"


@dataclass(frozen=True)
class VTuple(Value):
    items: tuple


TRUE = VBool(True)
FALSE = VBool(False)
BOOLEAN_SET_MEMBERS = (FALSE, TRUE)


def value_eq(a: Value, b: Value) -> Optional[bool]:
    """Extensional equality; None means the comparison is an error.

    Top-level kind mismatch (bool vs int, set vs int, ...) is an error.
    Inside set and function extensionality a kind mismatch just means the
    elements are distinct, so those comparisons are always defined.
    """
    if isinstance(a, VBool) and isinstance(b, VBool):
        return a.value == b.value
    if isinstance(a, VInt) and isinstance(b, VInt):
        return a.value == b.value
    if isinstance(a, VStr) and isinstance(b, VStr):
        return a.value == b.value
    if isinstance(a, VSet) and isinstance(b, VSet):
        return _subset(a, b) and _subset(b, a)
    if isinstance(a, VFunc) and isinstance(b, VFunc):
        if not value_eq(a.domain(), b.domain()):
            return False
        for k, v in a.graph:
            w = b.apply(k)
            if w is None or not _inner_eq(v, w):
                return False
        return True
    if isinstance(a, VTuple) and isinstance(b, VTuple):
        if len(a.items) != len(b.items):
            return False
        return all(_inner_eq(x, y) for x, y in zip(a.items, b.items))
    return None


def _inner_eq(a: Value, b: Value) -> bool:
    r = value_eq(a, b)
    return bool(r)


def _subset(a: VSet, b: VSet) -> bool:
    return all(any(_inner_eq(x, y) for y in b.members) for x in a.members)


# -- canonical bytes ---------------------------------------------------------
# Same TLV discipline as the term encoding: tag byte, u32 big-endian length,
# payload.  Set members are serialized in sorted-bytes order so equal sets
# get equal encodings.

_VT_BOOL = 0x01
_VT_INT = 0x02
_VT_STR = 0x03
_VT_SET = 0x04
_VT_FUNC = 0x05
_VT_TUPLE = 0x06


def _tlv(tag: int, payload: bytes) -> bytes:
    return struct.pack(">BI", tag, len(payload)) + payload


def value_bytes(v: Value) -> bytes:
    """Deterministic canonical encoding; equal values get equal bytes."""
    if isinstance(v, VBool):
        return _tlv(_VT_BOOL, b"\x01" if v.value else b"\x00")
    if isinstance(v, VInt):
        n = v.value
        width = max(1, (n.bit_length() + 8) // 8)
        return _tlv(_VT_INT, n.to_bytes(width, "big", signed=True))
    if isinstance(v, VStr):
        return _tlv(_VT_STR, v.value.encode("utf-8"))
    if isinstance(v, VSet):
        return _tlv(_VT_SET, b"".join(value_bytes(m) for m in v.sorted_members()))
    if isinstance(v, VFunc):
        pairs = sorted(((value_bytes(k), value_bytes(w)) for k, w in v.graph))
        return _tlv(_VT_FUNC, b"".join(k + w for k, w in pairs))
    if isinstance(v, VTuple):
        return _tlv(_VT_TUPLE, b"".join(value_bytes(x) for x in v.items))
    raise TypeError(f"not a Value: {v!r}")


def format_value(v: Value) -> str:
    """Render a value in concrete syntax for traces and messages."""
    if isinstance(v, VBool):
        return "TRUE" if v.value else "FALSE"
    if isinstance(v, VInt):
        return str(v.value)
    if isinstance(v, VStr):
        return f'"{v.value}"'
    if isinstance(v, VSet):
        return "{" + ", ".join(format_value(m) for m in v.sorted_members()) + "}"
    if isinstance(v, VFunc):
        pairs = sorted(v.graph, key=lambda kv: value_bytes(kv[0]))
        return "[" + ", ".join(f"{format_value(k)} |-> {format_value(w)}" for k, w in pairs) + "]"
    if isinstance(v, VTuple):
        return "<<" + ", ".join(format_value(x) for x in v.items) + ">>"
    raise TypeError(f"not a Value: {v!r}")
