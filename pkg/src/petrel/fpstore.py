"""Obligation fingerprints and the on-disk status store.

A fingerprint identifies an obligation by what it claims, not by where
it sits in the file: the obligation is minimized to the context items
it can actually depend on, cited definitions are expanded away, hidden
ones are reduced to arity-only declarations, and the result is hashed
through the canonical sequent encoding.
"""
from __future__ import annotations

import hashlib
import os
import tempfile
import time
import warnings
from dataclasses import dataclass, field

from . import canonical
from .errors import CorruptStore
from .kernel import expand_definitions, free_symbols, resolve_bangs
from .proofman import DefItem, FactItem, NewDecl, Obligation

FP_VERSION = b"petrel-fp-v1\x00"


def minimize(ob: Obligation) -> Obligation:
    """Drop context items the obligation cannot depend on.

    The kept-symbol set starts from the goal, the cited facts, and the
    bodies of the definitions being expanded, then grows to a fixpoint
    through usable facts and declaration domains.  Hidden definition
    bodies are never chased: a hidden operator is opaque, so what its
    body mentions cannot matter.
    """
    defs = ob.defs()
    relevant = set()

    def syms(e):
        # a !-projection depends on both the projected name and the
        # symbols of the body fragment it inlines
        out = set(free_symbols(e))
        out.update(free_symbols(resolve_bangs(e, defs)))
        return out

    add = relevant.update
    add(syms(ob.goal))
    for item in ob.context:
        if isinstance(item, FactItem) and not item.usable:
            add(syms(item.formula))
    for name in ob.expand:
        relevant.add(name)
        if name in defs:
            add(syms(defs[name].body))

    changed = True
    while changed:
        changed = False
        for item in ob.context:
            if isinstance(item, FactItem) and item.usable:
                s = syms(item.formula)
                if relevant.intersection(s) and not relevant.issuperset(s):
                    add(s)
                    changed = True
            elif isinstance(item, NewDecl) and item.domain is not None:
                if item.name in relevant:
                    s = syms(item.domain)
                    if not relevant.issuperset(s):
                        add(s)
                        changed = True

    kept = []
    for item in ob.context:
        if isinstance(item, NewDecl):
            if item.name in relevant:
                kept.append(item)
        elif isinstance(item, DefItem):
            if item.defn.name in relevant:
                kept.append(item)
        else:
            if not item.usable or relevant.intersection(
                    syms(item.formula)):
                kept.append(item)
    return Obligation(tuple(kept), ob.goal, ob.expand, ob.label,
                      ob.kind, ob.omitted, ob.span)


def _sequent(ob: Obligation):
    """Declarations, hypotheses, and goal of the minimized obligation with
    the expand set beta-reduced away."""
    ob = minimize(ob)
    defs = ob.defs()
    names = frozenset(n for n in ob.expand if n in defs)

    def ex(e):
        # a !-projection inlines part of the projected definition's body,
        # so the claim depends on that body whether or not it is cited
        e = resolve_bangs(e, defs)
        return expand_definitions(e, defs, names) if names else e

    decls = []
    for item in ob.context:
        if isinstance(item, NewDecl):
            kind = "variable" if item.kind == "VARIABLE" else "constant"
            dom = ex(item.domain) if item.domain is not None else None
            decls.append(canonical.Decl(item.name, kind, 0, dom))
        elif isinstance(item, DefItem) and item.defn.name not in names:
            decls.append(canonical.Decl(item.defn.name, "operator",
                                        len(item.defn.params)))
    hyps = [ex(i.formula) for i in ob.context if isinstance(i, FactItem)]
    return decls, hyps, ex(ob.goal)


def fingerprint(ob: Obligation) -> str:
    decls, hyps, goal = _sequent(ob)
    payload = canonical.sequent_bytes(decls, hyps, goal)
    return hashlib.sha256(FP_VERSION + payload).hexdigest()


def short(fp: str) -> str:
    return fp[:16]


# --- store -----------------------------------------------------------------------


@dataclass
class StatusRecord:
    fingerprint: str
    status: str
    backend: str
    ms: int
    ts: int = 0

    def line(self):
        return "v1\t%s\t%s\t%s\t%d\t%d\n" % (
            self.fingerprint, self.status, self.backend, self.ms, self.ts)


_STATUSES = {"proved", "failed", "canceled"}


@dataclass
class Store:
    path: str
    records: dict = field(default_factory=dict)
    dirty: bool = False

    def lookup(self, fp):
        return self.records.get(fp)

    def record(self, rec: StatusRecord):
        if not rec.ts:
            rec.ts = int(time.time())
        self.records[rec.fingerprint] = rec
        self.dirty = True

    def save(self):
        d = os.path.dirname(os.path.abspath(self.path)) or "."
        fd, tmp = tempfile.mkstemp(prefix=".fp-", dir=d)
        try:
            with os.fdopen(fd, "w") as fh:
                for fp in sorted(self.records):
                    fh.write(self.records[fp].line())
            os.replace(tmp, self.path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
        self.dirty = False


def store_path(source_path: str) -> str:
    return source_path + ".fp"


def load(path: str) -> Store:
    """Read a store file; unreadable lines are skipped with a warning."""
    store = Store(path)
    if not os.path.exists(path):
        return store
    bad = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 6 or parts[0] != "v1":
                bad += 1
                continue
            _, fp, status, backend, ms, ts = parts
            if len(fp) != 64 or status not in _STATUSES:
                bad += 1
                continue
            try:
                store.records[fp] = StatusRecord(fp, status, backend,
                                                 int(ms), int(ts))
            except ValueError:
                bad += 1
    if bad:
        warnings.warn(CorruptStore(
            f"{path}: skipped {bad} unreadable line(s)"))
    return store
