"""Kernel term operations: prime distribution, definition expansion,
quantifier-body instantiation, free symbols, canonicalization."""
from __future__ import annotations

from typing import Mapping, Optional

from . import canonical
from . import terms as T
from .errors import (ArityMismatch, DoublePrime, NotAQuantifiedDefinition,
                     PrimeOfTemporal, UnknownDefinition)


def free_symbols(e: T.Expr) -> list:
    """Free symbol names in first-occurrence order."""
    return T.free_names(e)


def distribute_prime(e: T.Expr, levels: Optional[Mapping[str, int]] = None) -> T.Expr:
    """Push every prime down to the state-variable references under it.

    Constant-level leaves drop their prime; opaque names of state level or
    unknown level keep a prime directly on the reference.  Input must not
    contain nested primes or a prime over [] (checked).
    """
    levels = levels or {}

    def check(x, under):
        if isinstance(x, T.Always) and under:
            raise PrimeOfTemporal(f"[] under prime at {x.span}")
        if isinstance(x, T.Prime):
            if under:
                raise DoublePrime(f"nested prime at {x.span}")
            under = True
        if isinstance(x, (T.Unchanged, T.BoxAction)) and under:
            raise DoublePrime(f"action operator under prime at {x.span}")
        for c in T.children(x):
            check(c, under)

    check(e, False)

    def go(x, primed):
        if isinstance(x, T.Prime):
            return go(x.item, True)
        if not primed:
            return T.rebuild(x, [go(c, False) for c in T.children(x)])
        # primed position
        if isinstance(x, (T.BoolLit, T.IntLit, T.StrLit, T.BooleanSet, T.BoundRef)):
            return x
        if isinstance(x, T.Name):
            lv = levels.get(x.name, T.STATE)
            if lv == T.CONSTANT:
                return x
            return T.Prime(x, span=x.span)
        if isinstance(x, T.Apply):
            lv = levels.get(x.op)
            if lv is not None and lv == T.CONSTANT:
                # constant operators commute with priming
                return T.Apply(x.op, tuple(go(a, True) for a in x.args), span=x.span)
            return T.Prime(T.rebuild(x, [go(c, False) for c in T.children(x)]), span=x.span)
        if isinstance(x, T.BINDERS):
            return type(x)(x.hint, go(x.domain, True), go(x.body, True), span=x.span)
        return T.rebuild(x, [go(c, True) for c in T.children(x)])

    return go(e, False)


def expand_definitions(e: T.Expr, defs: Mapping[str, T.Definition],
                       names=None) -> T.Expr:
    """Replace applications of the listed defined operators by their bodies
    (call-by-name beta reduction), repeating until none remain.

    names defaults to all of defs.  Raises UnknownDefinition if a listed
    name has no definition, ArityMismatch on wrong argument counts.
    """
    if names is None:
        targets = set(defs)
    else:
        targets = set(names)
        for n in targets:
            if n not in defs:
                raise UnknownDefinition(n)

    def step(x):
        changed = False

        def fn(node):
            nonlocal changed
            if isinstance(node, T.Name) and node.name in targets:
                d = defs[node.name]
                if d.params:
                    raise ArityMismatch(
                        f"{node.name} expects {len(d.params)} arguments, got 0")
                changed = True
                return d.body
            if isinstance(node, T.Apply) and node.op in targets:
                d = defs[node.op]
                if len(d.params) != len(node.args):
                    raise ArityMismatch(
                        f"{node.op} expects {len(d.params)} arguments, "
                        f"got {len(node.args)}")
                changed = True
                return T.subst_names(d.body, dict(zip(d.params, node.args)))
            return node

        return T.transform(x, fn), changed

    # iterate to fixpoint; expansion bodies may mention other listed names
    for _ in range(1000):
        e, changed = step(e)
        if not changed:
            return e
    raise UnknownDefinition("definition expansion did not terminate (cycle?)")


def resolve_bang(d: T.Definition, arg: T.Expr) -> T.Expr:
    """Instantiate the body of a definition that is a single bounded
    quantifier: I!(j) becomes I's quantifier body with the bound variable
    replaced by j."""
    if d.params:
        raise NotAQuantifiedDefinition(
            f"{d.name} takes parameters; !-instantiation needs a plain definition")
    body = d.body
    if not isinstance(body, (T.Forall, T.Exists)):
        raise NotAQuantifiedDefinition(
            f"{d.name}'s body is not a single bounded quantifier")
    return T.subst_bound(body.body, arg)


def resolve_bangs(e: T.Expr, defs: Mapping[str, T.Definition]) -> T.Expr:
    """Resolve every Bang node in e."""

    def fn(node):
        if isinstance(node, T.Bang):
            d = defs.get(node.op)
            if d is None:
                raise UnknownDefinition(node.op)
            return resolve_bang(d, node.arg)
        return node

    return T.transform(e, fn)


def canonicalize(e: T.Expr) -> bytes:
    """Canonical bytes of a bare term; alpha-equivalent terms (bound or
    free renaming) yield identical bytes."""
    return canonical.term_bytes(e)


def alpha_equal(a: T.Expr, b: T.Expr) -> bool:
    return canonical.term_bytes(a) == canonical.term_bytes(b)
