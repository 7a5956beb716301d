"""Expression AST and level discipline.

Bound variables are de Bruijn indices (BoundRef); binders keep the source
name only as a display hint.  That makes substitution capture-free and
alpha-equivalence a structural property of the canonical encoding.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Mapping, Optional

from .errors import DoublePrime, LevelError, PrimeOfTemporal, ScopeError

Span = Optional[tuple]  # (line, col), 1-based; None for synthesized nodes

# Levels.  A formula's level is the max over its leaves.
CONSTANT = 0
STATE = 1
ACTION = 2
TEMPORAL = 3

LEVEL_NAMES = {CONSTANT: "constant", STATE: "state", ACTION: "action", TEMPORAL: "temporal"}


@dataclass(frozen=True)
class Expr:
    span: Span = field(default=None, kw_only=True, compare=False, repr=False)


# -- leaves ------------------------------------------------------------------

@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class StrLit(Expr):
    value: str


@dataclass(frozen=True)
class BooleanSet(Expr):
    """The builtin two-element set written BOOLEAN."""


@dataclass(frozen=True)
class Name(Expr):
    """Free reference: state variable, definition, or NEW constant."""
    name: str


@dataclass(frozen=True)
class BoundRef(Expr):
    """de Bruijn reference to an enclosing binder; hint is display-only."""
    index: int
    hint: str


# -- operators ----------------------------------------------------------------

@dataclass(frozen=True)
class Apply(Expr):
    """Application of a defined operator, e.g. Not(self)."""
    op: str
    args: tuple


@dataclass(frozen=True)
class Bang(Expr):
    """Instantiation of a quantified definition body, e.g. I!(j).

    Parse-level artifact; elaboration resolves it away via resolve_bang.
    """
    op: str
    arg: Expr


@dataclass(frozen=True)
class And(Expr):
    items: tuple


@dataclass(frozen=True)
class Or(Expr):
    items: tuple


@dataclass(frozen=True)
class Not(Expr):
    item: Expr
    # how the source spelled it: '~', '#' (over =), or 'notin' (over \in)
    # display only, never part of equality
    sugar: str = field(default="~", kw_only=True, compare=False, repr=False)


@dataclass(frozen=True)
class Implies(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Eq(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class In(Expr):
    item: Expr
    domain: Expr


@dataclass(frozen=True)
class Arith(Expr):
    op: str  # '+', '-', '*'
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class FnLit(Expr):
    """[x \\in domain |-> body]; body sees the binder as BoundRef(0)."""
    hint: str
    domain: Expr
    body: Expr


@dataclass(frozen=True)
class FnSet(Expr):
    """[domain -> codomain], the set of all functions."""
    domain: Expr
    codomain: Expr


@dataclass(frozen=True)
class FnApp(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Except(Expr):
    """[fn EXCEPT ![key] = value] with a single update."""
    fn: Expr
    key: Expr
    value: Expr


@dataclass(frozen=True)
class Tup(Expr):
    items: tuple


@dataclass(frozen=True)
class SetEnum(Expr):
    items: tuple


@dataclass(frozen=True)
class Forall(Expr):
    hint: str
    domain: Expr
    body: Expr


@dataclass(frozen=True)
class Exists(Expr):
    hint: str
    domain: Expr
    body: Expr


@dataclass(frozen=True)
class Prime(Expr):
    item: Expr


@dataclass(frozen=True)
class Unchanged(Expr):
    item: Expr


@dataclass(frozen=True)
class BoxAction(Expr):
    """[action]_sub: action or stuttering on sub."""
    action: Expr
    sub: Expr


@dataclass(frozen=True)
class Always(Expr):
    item: Expr


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple
    body: Expr
    span: Span = field(default=None, compare=False, repr=False)


BINDERS = (FnLit, Forall, Exists)


def children(e: Expr) -> Iterator[Expr]:
    """Immediate sub-expressions in field order."""
    for f in fields(e):
        if f.name in ("span", "sugar"):
            continue
        v = getattr(e, f.name)
        if isinstance(v, Expr):
            yield v
        elif isinstance(v, tuple):
            for x in v:
                if isinstance(x, Expr):
                    yield x


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    yield e
    for c in children(e):
        yield from walk(c)


def free_names(e: Expr) -> list:
    """Free symbol names in first-occurrence (pre-order) order.

    Covers Name references, Apply operators, and Bang operators; binder
    hints and BoundRefs are not names.
    """
    seen = []
    have = set()

    def add(n):
        if n not in have:
            have.add(n)
            seen.append(n)

    def go(x):
        if isinstance(x, Name):
            add(x.name)
        elif isinstance(x, Apply):
            add(x.op)
            for a in x.args:
                go(a)
            return
        elif isinstance(x, Bang):
            add(x.op)
        for c in children(x):
            go(c)

    go(e)
    return seen


def level_of(e: Expr, env: Mapping[str, int], _primed: bool = False) -> int:
    """Compute the level of e given levels for every free name.

    Raises PrimeOfTemporal for [] under ', DoublePrime for nested primes,
    ScopeError for names missing from env.
    """
    if isinstance(e, (BoolLit, IntLit, StrLit, BooleanSet, BoundRef)):
        return CONSTANT
    if isinstance(e, Name):
        if e.name not in env:
            line, col = e.span or (0, 0)
            raise ScopeError(f"unknown name {e.name}", line, col)
        return env[e.name]
    if isinstance(e, Prime):
        if _primed:
            raise DoublePrime(f"nested prime at {e.span}")
        inner = level_of(e.item, env, _primed=True)
        if inner >= ACTION:
            raise DoublePrime(f"prime applied to action-level expression at {e.span}")
        return ACTION
    if isinstance(e, Unchanged):
        if _primed:
            raise DoublePrime(f"UNCHANGED under prime at {e.span}")
        level_of(e.item, env, _primed)
        return ACTION
    if isinstance(e, BoxAction):
        if _primed:
            raise DoublePrime(f"[...]_v under prime at {e.span}")
        lv = max(level_of(e.action, env, _primed), level_of(e.sub, env, _primed))
        if lv >= TEMPORAL:
            raise LevelError("temporal expression under [...]_v")
        return ACTION
    if isinstance(e, Always):
        if _primed:
            raise PrimeOfTemporal(f"[] under prime at {e.span}")
        level_of(e.item, env, _primed)
        return TEMPORAL
    if isinstance(e, Apply):
        lv = env.get(e.op)
        if lv is None:
            line, col = e.span or (0, 0)
            raise ScopeError(f"unknown operator {e.op}", line, col)
        for a in e.args:
            lv = max(lv, level_of(a, env, _primed))
        return lv
    if isinstance(e, Bang):
        lv = env.get(e.op)
        if lv is None:
            line, col = e.span or (0, 0)
            raise ScopeError(f"unknown operator {e.op}", line, col)
        return max(lv, level_of(e.arg, env, _primed))
    lv = CONSTANT
    for c in children(e):
        lv = max(lv, level_of(c, env, _primed))
    return lv


def contains_temporal(e: Expr) -> bool:
    return any(isinstance(x, Always) for x in walk(e))


def rebuild(e: Expr, new_children: list) -> Expr:
    """Copy e with its Expr-valued fields replaced in traversal order."""
    it = iter(new_children)
    kwargs = {}
    for f in fields(e):
        if f.name == "span":
            kwargs["span"] = e.span
            continue
        v = getattr(e, f.name)
        if f.name == "sugar":
            kwargs["sugar"] = v
            continue
        if isinstance(v, Expr):
            kwargs[f.name] = next(it)
        elif isinstance(v, tuple) and any(isinstance(x, Expr) for x in v):
            kwargs[f.name] = tuple(next(it) for _ in v)
        else:
            kwargs[f.name] = v
    return type(e)(**kwargs)


def transform(e: Expr, fn) -> Expr:
    """Bottom-up rewrite: fn(node-with-rewritten-children) -> node."""
    kids = [transform(c, fn) for c in children(e)]
    return fn(rebuild(e, kids))


# -- de Bruijn machinery -------------------------------------------------------

def shift(e: Expr, amount: int, cutoff: int = 0) -> Expr:
    """Add amount to every BoundRef index >= cutoff."""
    if isinstance(e, BoundRef):
        if e.index >= cutoff:
            return BoundRef(e.index + amount, e.hint, span=e.span)
        return e
    if isinstance(e, BINDERS):
        dom = shift(e.domain, amount, cutoff)
        body = shift(e.body, amount, cutoff + 1)
        return type(e)(e.hint, dom, body, span=e.span)
    return rebuild(e, [shift(c, amount, cutoff) for c in children(e)])


def subst_bound(e: Expr, value: Expr, index: int = 0) -> Expr:
    """Replace BoundRef(index) with value, unshifting deeper references."""
    if isinstance(e, BoundRef):
        if e.index == index:
            return shift(value, index)
        if e.index > index:
            return BoundRef(e.index - 1, e.hint, span=e.span)
        return e
    if isinstance(e, BINDERS):
        dom = subst_bound(e.domain, value, index)
        body = subst_bound(e.body, value, index + 1)
        return type(e)(e.hint, dom, body, span=e.span)
    return rebuild(e, [subst_bound(c, value, index) for c in children(e)])


def subst_names(e: Expr, mapping: Mapping[str, Expr], depth: int = 0) -> Expr:
    """Replace free Name references per mapping.

    Substituted expressions are closed with respect to binders of e (their
    BoundRefs, if any, refer to binders enclosing the substitution site),
    so they are shifted by the local binder depth.
    """
    if isinstance(e, Name) and e.name in mapping:
        return shift(mapping[e.name], depth)
    if isinstance(e, BINDERS):
        dom = subst_names(e.domain, mapping, depth)
        body = subst_names(e.body, mapping, depth + 1)
        return type(e)(e.hint, dom, body, span=e.span)
    return rebuild(e, [subst_names(c, mapping, depth) for c in children(e)])


def flatten_and(e: Expr) -> list:
    """Conjuncts of a (possibly nested) conjunction, in source order."""
    if isinstance(e, And):
        out = []
        for x in e.items:
            out.extend(flatten_and(x))
        return out
    return [e]


def flatten_or(e: Expr) -> list:
    if isinstance(e, Or):
        out = []
        for x in e.items:
            out.extend(flatten_or(x))
        return out
    return [e]
