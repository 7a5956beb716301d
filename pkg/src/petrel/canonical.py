"""Canonical term encoding.

A term or sequent is serialized to a deterministic tag-length-value byte
string: one tag byte, a big-endian u32 payload length, then the payload.
Bound variables are de Bruijn indices; free symbols are referenced by
position in a first-occurrence-ordered declaration list, so names never
appear in the encoding and alpha-equivalent sequents (including renamings
of context symbols) serialize byte-identically.

The tag table is documented in docs/formats.md and is a compatibility
surface: changing it invalidates every stored fingerprint.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional

from . import terms as T
from .values import Value, value_bytes

FORMAT_VERSION = b"\x01"

# node tags
TAG_BOOL = 0x10
TAG_INT = 0x11
TAG_STR = 0x12
TAG_BOOLEAN_SET = 0x13
TAG_DECL_REF = 0x14
TAG_BOUND_REF = 0x15
TAG_APPLY = 0x20
TAG_AND = 0x21
TAG_OR = 0x22
TAG_NOT = 0x23
TAG_IMPLIES = 0x24
TAG_EQ = 0x25
TAG_IN = 0x26
TAG_ARITH = 0x27
TAG_IF = 0x28
TAG_FNLIT = 0x29
TAG_FNSET = 0x2A
TAG_FNAPP = 0x2B
TAG_EXCEPT = 0x2C
TAG_TUPLE = 0x2D
TAG_SET_ENUM = 0x2E
TAG_FORALL = 0x2F
TAG_EXISTS = 0x30
TAG_PRIME = 0x31
TAG_UNCHANGED = 0x32
TAG_BOX_ACTION = 0x33
TAG_ALWAYS = 0x34
TAG_VALUE = 0x35  # embedded runtime value (partial-evaluation residuals)
TAG_BANG = 0x36

# declaration-entry tags
TAG_DECL_VARIABLE = 0x40
TAG_DECL_CONSTANT = 0x41
TAG_DECL_OPERATOR = 0x42

# sequent structure tags
TAG_SEQUENT = 0x50
TAG_DECL_LIST = 0x51
TAG_HYP_LIST = 0x52

_SIMPLE_TAGS = {
    T.And: TAG_AND, T.Or: TAG_OR, T.Not: TAG_NOT, T.Implies: TAG_IMPLIES,
    T.Eq: TAG_EQ, T.In: TAG_IN, T.If: TAG_IF, T.FnSet: TAG_FNSET,
    T.FnApp: TAG_FNAPP, T.Except: TAG_EXCEPT, T.Tup: TAG_TUPLE,
    T.SetEnum: TAG_SET_ENUM, T.Prime: TAG_PRIME, T.Unchanged: TAG_UNCHANGED,
    T.BoxAction: TAG_BOX_ACTION, T.Always: TAG_ALWAYS,
}


@dataclass(frozen=True)
class ValueNode(T.Expr):
    """Internal expression node wrapping an evaluated Value."""
    value: Value


@dataclass(frozen=True)
class Decl:
    """Declaration-list entry for a sequent's free symbol."""
    name: str
    kind: str  # 'variable' | 'constant' | 'operator'
    arity: int = 0
    domain: Optional[T.Expr] = None  # constants only


def _tlv(tag: int, payload: bytes) -> bytes:
    return struct.pack(">BI", tag, len(payload)) + payload


def _u32(n: int) -> bytes:
    return struct.pack(">I", n)


class _SymbolTable:
    """Assigns declaration indices in first-occurrence order."""

    def __init__(self, known):
        self.known = known  # name -> Decl
        self.order = []
        self.index = {}

    def ref(self, name: str) -> int:
        if name not in self.index:
            if name not in self.known:
                raise KeyError(f"free symbol {name} is not declared")
            self.index[name] = len(self.order)
            self.order.append(name)
        return self.index[name]


def _encode(e: T.Expr, tab: _SymbolTable) -> bytes:
    if isinstance(e, T.BoolLit):
        return _tlv(TAG_BOOL, b"\x01" if e.value else b"\x00")
    if isinstance(e, T.IntLit):
        n = e.value
        width = max(1, (n.bit_length() + 8) // 8)
        return _tlv(TAG_INT, n.to_bytes(width, "big", signed=True))
    if isinstance(e, T.StrLit):
        return _tlv(TAG_STR, e.value.encode("utf-8"))
    if isinstance(e, T.BooleanSet):
        return _tlv(TAG_BOOLEAN_SET, b"")
    if isinstance(e, T.Name):
        return _tlv(TAG_DECL_REF, _u32(tab.ref(e.name)))
    if isinstance(e, T.BoundRef):
        return _tlv(TAG_BOUND_REF, _u32(e.index))
    if isinstance(e, T.Apply):
        payload = _u32(tab.ref(e.op)) + b"".join(_encode(a, tab) for a in e.args)
        return _tlv(TAG_APPLY, payload)
    if isinstance(e, T.Bang):
        return _tlv(TAG_BANG, _u32(tab.ref(e.op)) + _encode(e.arg, tab))
    if isinstance(e, T.Arith):
        return _tlv(TAG_ARITH, e.op.encode() + _encode(e.lhs, tab) + _encode(e.rhs, tab))
    if isinstance(e, (T.FnLit, T.Forall, T.Exists)):
        tag = {T.FnLit: TAG_FNLIT, T.Forall: TAG_FORALL, T.Exists: TAG_EXISTS}[type(e)]
        # binder hint intentionally dropped: bodies are de Bruijn
        return _tlv(tag, _encode(e.domain, tab) + _encode(e.body, tab))
    if isinstance(e, ValueNode):
        return _tlv(TAG_VALUE, value_bytes(e.value))
    tag = _SIMPLE_TAGS.get(type(e))
    if tag is None:
        raise TypeError(f"cannot serialize {type(e).__name__}")
    return _tlv(tag, b"".join(_encode(c, tab) for c in T.children(e)))


def _encode_decl(d: Decl, tab: _SymbolTable) -> bytes:
    if d.kind == "variable":
        return _tlv(TAG_DECL_VARIABLE, b"")
    if d.kind == "constant":
        payload = _encode(d.domain, tab) if d.domain is not None else b""
        return _tlv(TAG_DECL_CONSTANT, payload)
    return _tlv(TAG_DECL_OPERATOR, _u32(d.arity))


def sequent_bytes(decls, hyps, goal: T.Expr) -> bytes:
    """Canonical encoding of a sequent (declarations, hypotheses |- goal).

    decls: iterable of Decl covering every free symbol of hyps and goal.
    The declaration list that is actually emitted holds only the symbols
    referenced by the hyps-then-goal traversal (plus constant domains),
    in first-occurrence order, so the encoding is invariant under context
    reordering, symbol renaming, and unused declarations.
    """
    known = {d.name: d for d in decls}
    tab = _SymbolTable(known)
    hyp_payload = b"".join(_encode(h, tab) for h in hyps)
    goal_payload = _encode(goal, tab)
    # pull in symbols that occur only inside constant domains (to fixpoint,
    # since a domain may mention further declared constants)
    done = set()
    while True:
        todo = [n for n in tab.order if n not in done]
        if not todo:
            break
        for name in todo:
            done.add(name)
            d = known[name]
            if d.kind == "constant" and d.domain is not None:
                _encode(d.domain, tab)
    decl_payload = b"".join(_encode_decl(known[n], tab) for n in list(tab.order))
    body = (_tlv(TAG_DECL_LIST, decl_payload)
            + _tlv(TAG_HYP_LIST, hyp_payload)
            + _tlv(TAG_SEQUENT, goal_payload))
    return FORMAT_VERSION + body


def term_bytes(e: T.Expr) -> bytes:
    """Canonical encoding of a bare term.

    Free names get positional declarations in first-occurrence order, so
    alpha-equivalent terms (bound or free renaming) encode identically.
    """
    decls = [Decl(n, "operator", _arity_of(e, n)) for n in T.free_names(e)]
    return sequent_bytes(decls, [], e)


def term_key(e: T.Expr) -> bytes:
    """Comparison key that keeps free names distinct (names encoded).

    Used for matching residuals inside a single obligation, where symbol
    identity matters but alpha-renaming of binders must not.
    """
    names = T.free_names(e)
    decls = [Decl(n, "operator", _arity_of(e, n)) for n in names]
    prefix = b"\x00".join(n.encode() for n in names)
    return prefix + b"\xff" + sequent_bytes(decls, [], e)


def _arity_of(e: T.Expr, name: str) -> int:
    for x in T.walk(e):
        if isinstance(x, T.Apply) and x.op == name:
            return len(x.args)
    return 0


# -- decoding (round-trip support) -------------------------------------------

class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def node(self):
        tag, ln = struct.unpack_from(">BI", self.data, self.pos)
        self.pos += 5
        payload = self.data[self.pos:self.pos + ln]
        self.pos += ln
        return tag, payload

    def eof(self) -> bool:
        return self.pos >= len(self.data)


def _decode(r: _Reader) -> T.Expr:
    tag, payload = r.node()
    sub = _Reader(payload)
    if tag == TAG_BOOL:
        return T.BoolLit(payload == b"\x01")
    if tag == TAG_INT:
        return T.IntLit(int.from_bytes(payload, "big", signed=True))
    if tag == TAG_STR:
        return T.StrLit(payload.decode("utf-8"))
    if tag == TAG_BOOLEAN_SET:
        return T.BooleanSet()
    if tag == TAG_DECL_REF:
        return T.Name(f"@{struct.unpack('>I', payload)[0]}")
    if tag == TAG_BOUND_REF:
        return T.BoundRef(struct.unpack(">I", payload)[0], "x")
    if tag == TAG_APPLY:
        idx = struct.unpack_from(">I", payload)[0]
        sub.pos = 4
        args = []
        while not sub.eof():
            args.append(_decode(sub))
        return T.Apply(f"@{idx}", tuple(args))
    if tag == TAG_BANG:
        idx = struct.unpack_from(">I", payload)[0]
        sub.pos = 4
        return T.Bang(f"@{idx}", _decode(sub))
    if tag == TAG_ARITH:
        op = payload[:1].decode()
        sub.pos = 1
        return T.Arith(op, _decode(sub), _decode(sub))
    if tag in (TAG_FNLIT, TAG_FORALL, TAG_EXISTS):
        cls = {TAG_FNLIT: T.FnLit, TAG_FORALL: T.Forall, TAG_EXISTS: T.Exists}[tag]
        return cls("x", _decode(sub), _decode(sub))
    kids = []
    while not sub.eof():
        kids.append(_decode(sub))
    for cls, t in _SIMPLE_TAGS.items():
        if t == tag:
            blank = _blank(cls, kids)
            return blank
    raise ValueError(f"unknown tag 0x{tag:02x}")


def _blank(cls, kids):
    if cls in (T.And, T.Or, T.Tup, T.SetEnum):
        return cls(tuple(kids))
    return cls(*kids)


def decode_term(data: bytes) -> T.Expr:
    """Decode a term_bytes() encoding back to a structurally isomorphic
    term (names become positional placeholders)."""
    if not data.startswith(FORMAT_VERSION):
        raise ValueError("unsupported encoding version")
    r = _Reader(data[1:])
    goal = None
    while not r.eof():
        tag, payload = r.node()
        if tag == TAG_SEQUENT:
            goal = _decode(_Reader(payload))
    if goal is None:
        raise ValueError("no goal section")
    return goal
