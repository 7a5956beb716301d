"""Proof manager.

Walks hierarchical proofs, maintains the natural-deduction context,
assembles one obligation per leaf (plus side obligations for picked
witnesses and cited formulas), dispatches obligations to back-ends
through the fingerprint store, and folds step statuses upward.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import parser as P
from . import terms as T
from .errors import (
    DefBeforeUse,
    GoalMismatch,
    ProofError,
    UnknownStepReference,
)
from .kernel import expand_definitions

# --- context items ---------------------------------------------------------------


@dataclass(frozen=True)
class NewDecl:
    """NEW CONSTANT/VARIABLE, optionally with a domain (constants only)."""
    kind: str                  # 'CONSTANT' or 'VARIABLE'
    name: str
    domain: object = None      # Expr or None


@dataclass(frozen=True)
class DefItem:
    defn: T.Definition


@dataclass(frozen=True)
class FactItem:
    formula: T.Expr
    source: str = ""           # step label that established the fact
    usable: bool = False       # passed to provers without being cited


@dataclass(frozen=True)
class Obligation:
    """A natural-deduction sequent bound for a back-end."""
    context: tuple             # NewDecl | DefItem | FactItem, in order
    goal: T.Expr
    expand: tuple = ()         # definition names cited with DEF
    label: str = ""            # owning step
    kind: str = "leaf"         # leaf|suffices|case|pick|pick-side|qed|citation
    omitted: bool = False
    span: object = None

    def defs(self):
        return {i.defn.name: i.defn for i in self.context
                if isinstance(i, DefItem)}

    def facts(self):
        return [i for i in self.context if isinstance(i, FactItem)]


# --- statuses --------------------------------------------------------------------

PENDING = "pending"
OMITTED = "omitted"
FAILED = "failed"
CANCELED = "canceled"
PROVED = "proved"

_RANK = {PENDING: 0, OMITTED: 1, FAILED: 2, CANCELED: 3, PROVED: 4}


def combine_statuses(statuses):
    """Parent status: the weakest child wins."""
    statuses = list(statuses)
    if not statuses:
        return PROVED
    return min(statuses, key=_RANK.__getitem__)


@dataclass
class StepNode:
    """One proof step (or theorem root) with its obligations and substeps."""
    label: str
    kind: str                   # theorem|assert|suffices|case|pick|qed
    obligations: list = field(default_factory=list)
    children: list = field(default_factory=list)
    span: object = None

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def all_obligations(self):
        for node in self.walk():
            yield from node.obligations

    def find(self, label):
        for node in self.walk():
            if node.label == label:
                return node
        return None


def is_temporal(goal: T.Expr) -> bool:
    return T.contains_temporal(goal)


# --- elaboration -----------------------------------------------------------------


def _bind_free(e, name, depth=0):
    """Capture free occurrences of name as a de Bruijn index at depth."""
    if isinstance(e, T.Name) and e.name == name:
        return T.BoundRef(depth, name)
    if isinstance(e, T.BINDERS):
        return type(e)(e.hint, _bind_free(e.domain, name, depth),
                       _bind_free(e.body, name, depth + 1))
    kids = [_bind_free(c, name, depth) for c in T.children(e)]
    return T.rebuild(e, kids)


class _Elaborator:
    def __init__(self, module):
        self.module = module
        self.defmap = {d.name: d for d in module.defs}
        base = []
        for c in module.constants:
            base.append(NewDecl("CONSTANT", c))
        for v in module.variables:
            base.append(NewDecl("VARIABLE", v))
        for d in module.defs:
            base.append(DefItem(d))
        self.base = base
        self.registry = {}       # step label -> tuple of FactItem
        self.obligations = []    # flat, in elaboration order

    # -- citation handling

    def resolve(self, by, ctx, label):
        """Resolve a BY clause: (selected context facts, extra fact items,
        citation side obligations)."""
        selected, extras, sides = [], [], []
        for f in by.facts:
            if isinstance(f, P.StepRef):
                if f.label not in self.registry:
                    raise UnknownStepReference(
                        f"step {f.label} has no recorded fact")
                selected.extend(self.registry[f.label])
            else:
                side = Obligation(self.assemble(ctx, (), ()), f,
                                  tuple(by.defs), label, "citation")
                sides.append(side)
                extras.append(FactItem(f, source=label))
        for name in by.defs:
            if name not in self.defmap:
                raise DefBeforeUse(f"DEF {name} names no visible definition")
        return selected, extras, sides

    def assemble(self, ctx, selected, extras):
        """Project the context onto an obligation: declarations and
        definitions survive; facts survive only if usable or cited."""
        chosen = set(map(id, selected))
        out = []
        for item in ctx:
            if isinstance(item, FactItem) and not item.usable \
                    and id(item) not in chosen:
                continue
            out.append(item)
        out.extend(extras)
        return tuple(out)

    # -- leaves

    def leaf(self, pf, ctx, goal, node, kind):
        if isinstance(pf, P.OmittedProof):
            ob = Obligation(self.assemble(ctx, (), ()), goal, (),
                            node.label, kind, omitted=True)
        elif isinstance(pf, P.ObviousProof):
            ob = Obligation(self.assemble(ctx, (), ()), goal, (),
                            node.label, kind)
        elif isinstance(pf, P.ByProof):
            selected, extras, sides = self.resolve(pf, ctx, node.label)
            for side in sides:
                node.obligations.append(side)
                self.obligations.append(side)
            ob = Obligation(self.assemble(ctx, selected, extras), goal,
                            tuple(pf.defs), node.label, kind)
        else:
            raise ProofError(f"not a leaf proof: {type(pf).__name__}")
        node.obligations.append(ob)
        self.obligations.append(ob)

    def proof(self, pf, ctx, goal, node, kind="leaf"):
        if pf is None:
            return
        if isinstance(pf, P.StepsProof):
            self.steps(pf.steps, ctx, goal, node)
        else:
            self.leaf(pf, ctx, goal, node, kind)

    # -- assumption lists

    def assume_items(self, assumes, prove_goal, label):
        """Context items introduced by an ASSUME list, plus the universally
        closed fact stating 'the assumptions entail the goal'."""
        items, news, hyps = [], [], []
        for a in assumes:
            if isinstance(a, P.NewItem):
                items.append(NewDecl(a.kind, a.name, a.domain))
                news.append(a)
            else:
                f = FactItem(a, source=label)
                items.append(f)
                hyps.append(a)
        closure = prove_goal
        for h in reversed(hyps):
            closure = T.Implies(h, closure)
        for a in reversed(news):
            if a.domain is None:
                raise ProofError(
                    f"NEW {a.name} needs a domain to be generalized over")
            closure = T.Forall(a.name, a.domain,
                               _bind_free(closure, a.name))
        return items, closure

    # -- step lists

    def steps(self, steps, ctx, goal, parent):
        if not steps or not isinstance(steps[-1], P.QedStep):
            raise GoalMismatch("a step list must end in QED")
        ctx = list(ctx)
        for st in steps:
            if isinstance(st, P.AssertStep):
                node = StepNode(st.label, "assert", span=st.span)
                parent.children.append(node)
                items, closure = self.assume_items(st.assumes, st.goal,
                                                   st.label)
                inner = [i for i in items if isinstance(i, FactItem)]
                self.registry[st.label] = tuple(inner)
                self.proof(st.proof, ctx + items, st.goal, node)
                fact = FactItem(closure, source=st.label)
                ctx.append(fact)
                self.registry[st.label] = (fact,)
            elif isinstance(st, P.SufficesStep):
                node = StepNode(st.label, "suffices", span=st.span)
                parent.children.append(node)
                items, closure = self.assume_items(st.assumes, st.goal,
                                                   st.label)
                # the replacement claim justifies the old goal; its own
                # proof may not use the newly assumed items
                cl = FactItem(closure, source=st.label, usable=True)
                self.proof(st.proof, ctx + [cl], goal, node,
                           kind="suffices")
                ctx.extend(items)
                goal = st.goal
                self.registry[st.label] = tuple(
                    i for i in items
                    if isinstance(i, FactItem) and not i.usable)
            elif isinstance(st, P.CaseStep):
                node = StepNode(st.label, "case", span=st.span)
                parent.children.append(node)
                c = FactItem(st.expr, source=st.label)
                self.registry[st.label] = (c,)
                self.proof(st.proof, ctx + [c], goal, node)
                after = FactItem(T.Implies(st.expr, goal), source=st.label)
                ctx.append(after)
                self.registry[st.label] = (after,)
            elif isinstance(st, P.PickStep):
                node = StepNode(st.label, "pick", span=st.span)
                parent.children.append(node)
                exists = T.Exists(st.hint, st.domain, st.predicate)
                self.leaf(st.proof, ctx, exists, node, "pick")
                witness = FactItem(exists, source=st.label, usable=True)
                side = Obligation(self.assemble(ctx + [witness], (), ()),
                                  exists, (), st.label, "pick-side")
                node.obligations.append(side)
                self.obligations.append(side)
                pred = T.subst_bound(st.predicate, T.Name(st.hint))
                fact = FactItem(pred, source=st.label, usable=True)
                ctx.extend([NewDecl("CONSTANT", st.hint, st.domain), fact])
                self.registry[st.label] = (fact,)
            elif isinstance(st, P.QedStep):
                node = StepNode(st.label, "qed", span=st.span)
                parent.children.append(node)
                self.proof(st.proof, ctx, goal, node, kind="qed")
            else:
                raise ProofError(f"unknown step: {type(st).__name__}")

    def theorem(self, thm, index):
        label = thm.name or f"theorem {index}"
        node = StepNode(label, "theorem")
        self.registry = {}
        if thm.proof is None:
            return node
        self.proof(thm.proof, list(self.base), thm.goal, node)
        return node


def elaborate_module(module):
    """Elaborate every theorem; returns (theorem StepNodes, flat obligations)."""
    el = _Elaborator(module)
    roots = [el.theorem(thm, i + 1) for i, thm in enumerate(module.theorems)]
    return roots, el.obligations


def elaborate(module):
    """All obligations of the module's theorems, in elaboration order."""
    return elaborate_module(module)[1]


# --- obligation display ----------------------------------------------------------


def print_obligation(ob: Obligation) -> str:
    """ASSUME/PROVE rendering: NEW declarations and facts, definitions
    hidden, the goal with the obligation's DEF set expanded."""
    from . import printer
    from .fpstore import minimize

    ob = minimize(ob)
    defs = ob.defs()
    names = frozenset(n for n in ob.expand if n in defs)

    def shown(e):
        return expand_definitions(e, defs, names) if names else e

    parts = []
    for item in ob.context:
        if isinstance(item, NewDecl):
            d = f"NEW {item.kind} {item.name}"
            if item.domain is not None:
                d += " \\in " + printer.inline(item.domain)
            parts.append(d)
        elif isinstance(item, FactItem):
            parts.append(printer.block(shown(item.formula), 8))
    goal = printer.block(shown(ob.goal), 8)
    if not parts:
        return f"PROVE {goal}"
    body = ",\n       ".join(parts)
    return f"ASSUME {body}\nPROVE  {goal}"


# --- checking --------------------------------------------------------------------


@dataclass
class ObligationResult:
    obligation: Obligation
    fingerprint: str            # full hex digest
    status: str
    backend: str
    ms: int
    cached: bool = False
    detail: str = ""


@dataclass
class RunReport:
    results: list               # ObligationResult, dispatch order
    roots: list                 # theorem StepNodes
    statuses: dict              # step label -> status
    dispatched: int = 0         # back-end calls actually made

    def counts(self):
        tally = {PENDING: 0, OMITTED: 0, FAILED: 0, CANCELED: 0, PROVED: 0}
        for r in self.results:
            tally[r.status] += 1
        return tally


def _select(roots, theorem=None, step=None):
    """The StepNodes whose obligations a run should consider."""
    if step is not None:
        for root in roots:
            node = root.find(step)
            if node is not None:
                return [node]
        raise UnknownStepReference(f"no step labeled {step}")
    if theorem is not None:
        if not 1 <= theorem <= len(roots):
            raise UnknownStepReference(f"no theorem number {theorem}")
        return [roots[theorem - 1]]
    return list(roots)


def _dispatch(ob, backend, enum_budget, deadline, smt_cmd):
    from . import backends

    if is_temporal(ob.goal):
        return backends.apply_temporal_rules(ob)
    if backend == "smtlib":
        return backends.prove_smt(ob, smt_cmd)
    return backends.prove_ground(ob, budget=enum_budget, deadline=deadline)


def check(module, store=None, theorem=None, step=None, force=False,
          timeout=10.0, backend="ground", enum_budget=10 ** 7,
          smt_cmd=None, trust_failures=False):
    """Prove the selected obligations, consulting the store first.

    Returns a RunReport; the store (when given) is updated in memory and
    must be saved by the caller.
    """
    from . import backends, fpstore

    roots, _ = elaborate_module(module)
    selected = _select(roots, theorem, step)
    results = []
    by_obligation = {}
    dispatched = 0

    seen = set()
    todo = []
    for node in selected:
        for ob in node.all_obligations():
            if id(ob) not in seen:
                seen.add(id(ob))
                todo.append(ob)

    for ob in todo:
        fp = fpstore.fingerprint(ob)
        if ob.omitted:
            res = ObligationResult(ob, fp, OMITTED, "none", 0)
        else:
            rec = None
            if store is not None and not force:
                rec = store.lookup(fp)
                if rec is not None and rec.status != PROVED and not (
                        trust_failures and rec.status == FAILED):
                    rec = None
            if rec is not None:
                res = ObligationResult(ob, fp, rec.status, rec.backend,
                                       rec.ms, cached=True)
            else:
                t0 = time.monotonic()
                deadline = t0 + timeout if timeout else None
                try:
                    verdict = _dispatch(ob, backend, enum_budget, deadline,
                                        smt_cmd)
                except backends.DeadlineExceeded:
                    verdict = None
                ms = int((time.monotonic() - t0) * 1000)
                dispatched += 1
                if verdict is None:
                    status, detail = CANCELED, "timeout"
                    used = backend
                elif isinstance(verdict, backends.Proved):
                    status, detail = PROVED, ""
                    used = verdict.backend
                else:
                    status, detail = FAILED, verdict.reason
                    extra = getattr(verdict, "detail", "")
                    if extra:
                        detail = f"{verdict.reason}: {extra}"
                    used = getattr(verdict, "backend", backend)
                res = ObligationResult(ob, fp, status, used, ms,
                                       detail=detail)
                if store is not None:
                    store.record(fpstore.StatusRecord(fp, status, used, ms))
        results.append(res)
        by_obligation[id(ob)] = res.status

    statuses = _aggregate(roots, by_obligation)
    return RunReport(results, roots, statuses, dispatched)


def status_only(module, store):
    """Recompute fingerprints and join against the store; prove nothing."""
    from . import fpstore

    roots, obligations = elaborate_module(module)
    results = []
    by_obligation = {}
    for ob in obligations:
        fp = fpstore.fingerprint(ob)
        if ob.omitted:
            res = ObligationResult(ob, fp, OMITTED, "none", 0)
        else:
            rec = store.lookup(fp) if store is not None else None
            if rec is None:
                res = ObligationResult(ob, fp, PENDING, "none", 0)
            else:
                res = ObligationResult(ob, fp, rec.status, rec.backend,
                                       rec.ms, cached=True)
        results.append(res)
        by_obligation[id(ob)] = res.status
    statuses = _aggregate(roots, by_obligation)
    return RunReport(results, roots, statuses, 0)


def _aggregate(roots, by_obligation):
    statuses = {}

    def of_node(node):
        own = [by_obligation.get(id(ob), PENDING) for ob in node.obligations]
        subs = [of_node(c) for c in node.children]
        status = combine_statuses(own + subs)
        statuses[node.label] = status
        return status

    for root in roots:
        of_node(root)
    return statuses
