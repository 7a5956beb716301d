"""Proof back-ends.

prove_ground decides an obligation by normalizing it to tasks and
enumerating the finitely many valuations of its membership-bounded
symbols, with syntactic discharge for the parts evaluation cannot
touch.  apply_temporal_rules handles the one temporal shape the ground
prover must not: an invariance claim backed by initiation, consecution,
and implication facts.  export_smtlib emits an obligation for an
external solver instead of deciding it here.
"""
from __future__ import annotations

import itertools
import os
import shlex
import subprocess
import time
from dataclasses import dataclass

from . import kernel, mcheck
from . import terms as T
from .canonical import ValueNode, term_key
from .errors import ExecutionError, PetrelError
from .values import (Value, VBool, VInt, VSet, VStr, VTuple, format_value)


@dataclass(frozen=True)
class Proved:
    backend: str = "ground"


@dataclass(frozen=True)
class Failed:
    reason: str
    detail: str = ""
    backend: str = "ground"


@dataclass(frozen=True)
class Unsupported:
    reason: str
    backend: str = "ground"


class DeadlineExceeded(Exception):
    pass


_OR_SPLIT_LIMIT = 1024
_DEADLINE_STRIDE = 256


def _def_levels(defs, base):
    """Levels for defined operators, so priming can commute into
    constant-level applications.  Unresolvable bodies are left out."""
    env = dict(base)
    out = {}
    for name, d in defs.items():
        penv = dict(env)
        for p in d.params:
            penv[p] = T.CONSTANT
        try:
            lv = T.level_of(d.body, penv)
        except PetrelError:
            continue
        env[name] = lv
        out[name] = lv
    return out


def _if_to_or(e, boolean=True):
    """Rewrite boolean-position IF into guarded disjunction so branch
    structure is visible to task splitting; term-position IF is the
    evaluator's business."""
    if isinstance(e, T.If) and boolean:
        c = _if_to_or(e.cond, True)
        t = _if_to_or(e.then, True)
        o = _if_to_or(e.orelse, True)
        return T.Or((T.And((c, t)), T.And((T.Not(c), o))), span=e.span)
    if isinstance(e, (T.And, T.Or)):
        return type(e)(tuple(_if_to_or(x, True) for x in e.items),
                       span=e.span)
    if isinstance(e, T.Not):
        return T.Not(_if_to_or(e.item, True), span=e.span)
    if isinstance(e, T.Implies):
        return T.Implies(_if_to_or(e.lhs, True), _if_to_or(e.rhs, True),
                         span=e.span)
    if isinstance(e, (T.Forall, T.Exists)):
        return type(e)(e.hint, e.domain, _if_to_or(e.body, True),
                       span=e.span)
    return e


_QUANT_GROUND_LIMIT = 16


def _ground_quants(e):
    """Replace quantifiers over small constant domains with explicit
    conjunctions/disjunctions (an equivalence, not an approximation), so
    task splitting can see through them."""
    e = T.rebuild(e, [_ground_quants(c) for c in T.children(e)])
    if isinstance(e, (T.Forall, T.Exists)):
        vals = _const_eval(e.domain)
        if isinstance(vals, VSet):
            members = vals.sorted_members()
            if len(members) <= _QUANT_GROUND_LIMIT:
                insts = tuple(
                    _ground_quants(T.subst_bound(e.body, _value_term(v)))
                    for v in members)
                if not insts:
                    return T.BoolLit(isinstance(e, T.Forall))
                if len(insts) == 1:
                    return insts[0]
                node = T.And if isinstance(e, T.Forall) else T.Or
                return node(insts, span=e.span)
    return e


def _prep(e, defs, expand, levels):
    """Shared normalization: projections resolved, cited definitions
    expanded, action brackets rewritten, primes pushed to variables."""
    e = kernel.resolve_bangs(e, defs)
    if expand:
        e = kernel.expand_definitions(e, defs, expand)
    e = mcheck._normalize_actions(e)
    e = kernel.distribute_prime(e, levels)
    return _ground_quants(_if_to_or(e))


def _size(e):
    return sum(1 for _ in T.walk(e))


def _value_term(v):
    if isinstance(v, VInt):
        return T.IntLit(v.value)
    if isinstance(v, VBool):
        return T.BoolLit(v.value)
    if isinstance(v, VStr):
        return T.StrLit(v.value)
    if isinstance(v, VTuple):
        return T.Tup(tuple(_value_term(x) for x in v.items))
    if isinstance(v, VSet):
        return T.SetEnum(tuple(_value_term(x) for x in v.sorted_members()))
    return ValueNode(v)


# --- ground prover ---------------------------------------------------------------


class _Budget:
    def __init__(self, limit, deadline):
        self.left = limit
        self.deadline = deadline
        self.tick = 0

    def charge(self, n=1):
        self.left -= n
        self.tick += n
        if self.tick >= _DEADLINE_STRIDE:
            self.tick = 0
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise DeadlineExceeded()
        return self.left >= 0


class _Task:
    __slots__ = ("hyps", "goal")

    def __init__(self, hyps, goal):
        self.hyps = hyps
        self.goal = goal


def _peel(hyps, goal):
    while isinstance(goal, T.Implies):
        hyps = hyps + T.flatten_and(goal.lhs)
        goal = goal.rhs
    return hyps, goal


def _normalize(hyps, goal):
    """Antecedent moves, conjunction splitting, disjunction splitting to
    a fixpoint (within a budget of tasks)."""
    hyps, goal = _peel(hyps, goal)
    if isinstance(goal, T.And):
        out = []
        for g in T.flatten_and(goal):
            out.extend(_normalize(hyps, g))
        return out

    flat = []
    for h in hyps:
        flat.extend(T.flatten_and(h))

    tasks = []
    stack = [flat]
    over = False
    while stack:
        cur = stack.pop()
        if over:
            tasks.append(_Task(cur, goal))
            continue
        for idx, h in enumerate(cur):
            if isinstance(h, T.Or):
                for d in T.flatten_or(h):
                    stack.append(cur[:idx] + T.flatten_and(d)
                                 + cur[idx + 1:])
                if len(stack) + len(tasks) > _OR_SPLIT_LIMIT:
                    over = True
                break
        else:
            tasks.append(_Task(cur, goal))
    return tasks


_LITERALS = (T.IntLit, T.StrLit, T.BoolLit)


def _discharged(task):
    """Purely syntactic closure: goal among the hypotheses (after
    modus-ponens saturation), contradicting hypotheses, or a false one."""
    keys = set()
    hyps = list(task.hyps)
    pinned = {}
    for h in hyps:
        if isinstance(h, T.BoolLit) and not h.value:
            return True
        keys.add(term_key(h))
        if isinstance(h, T.Eq):
            for a, b in ((h.lhs, h.rhs), (h.rhs, h.lhs)):
                if isinstance(b, _LITERALS):
                    k = term_key(a)
                    prev = pinned.get(k)
                    if prev is not None and prev[0] is type(b) \
                            and prev[1] != term_key(b):
                        return True
                    pinned[k] = (type(b), term_key(b))

    changed = True
    while changed:
        changed = False
        for h in hyps:
            if not isinstance(h, T.Implies):
                continue
            if all(term_key(p) in keys for p in T.flatten_and(h.lhs)):
                for p in T.flatten_and(h.rhs):
                    k = term_key(p)
                    if k not in keys:
                        keys.add(k)
                        hyps.append(p)
                        changed = True

    goal = task.goal
    if isinstance(goal, T.BoolLit) and goal.value:
        return True
    if term_key(goal) in keys:
        return True
    for h in hyps:
        if isinstance(h, T.Not) and term_key(h.item) in keys:
            return True
    if isinstance(goal, T.Or) and any(
            term_key(p) in keys for p in T.flatten_or(goal)):
        return True
    return False


def _occurs(e, name, want_primed, primed=False):
    if isinstance(e, T.Name):
        return primed == want_primed and e.name == name
    if isinstance(e, T.Prime):
        return _occurs(e.item, name, want_primed, True)
    return any(_occurs(c, name, want_primed, primed) for c in T.children(e))


def _pin_pattern(h, varnames):
    """(slot, name, rhs) when h equates a variable (possibly primed) with
    an expression that does not mention that same slot: x' = x' is a
    constraint to check, not a definition to substitute."""
    for lhs, rhs in ((h.lhs, h.rhs), (h.rhs, h.lhs)):
        if isinstance(lhs, T.Prime) and isinstance(lhs.item, T.Name) \
                and lhs.item.name in varnames:
            if not _occurs(rhs, lhs.item.name, True):
                return "primed", lhs.item.name, rhs
        elif isinstance(lhs, T.Name) and lhs.name in varnames:
            if not _occurs(rhs, lhs.name, False):
                return "state", lhs.name, rhs
    return None


def _bound_pattern(h, varnames):
    if isinstance(h.item, T.Prime) and isinstance(h.item.item, T.Name) \
            and h.item.item.name in varnames:
        return "primed", h.item.item.name, h.domain
    if isinstance(h.item, T.Name) and h.item.name in varnames:
        return "state", h.item.name, h.domain
    return None


def _const_eval(e):
    try:
        return mcheck.eval_expr(e)
    except (PetrelError, ExecutionError):
        return None


def _const_eval_cached(e, dcache):
    k = term_key(e)
    if k in dcache:
        return dcache[k]
    v = _const_eval(e)
    dcache[k] = v
    return v


def _freeze_domains(e, dcache):
    """Pre-evaluate constant membership domains once, so enumeration does
    not rebuild function-set values at every valuation."""
    e = T.rebuild(e, [_freeze_domains(c, dcache) for c in T.children(e)])
    if isinstance(e, T.In) and not isinstance(e.domain, ValueNode):
        v = _const_eval_cached(e.domain, dcache)
        if v is not None:
            return T.In(e.item, ValueNode(v), span=e.span)
    return e


class _Evals:
    """Cache of partial evaluations keyed by expression identity and the
    semantic content of the valuation (hypotheses repeat across tasks)."""

    def __init__(self):
        self.cache = {}

    def run(self, e, ssig, psig, state, primed, varset):
        sig = (id(e), ssig, psig)
        hit = self.cache.get(sig)
        if hit is not None and hit[0] is e:
            return hit[1]
        r = mcheck.eval_partial(e, state, primed, {}, varset)
        self.cache[sig] = (e, r)
        return r


def _fmt_valuation(fixed, state, primed):
    parts = []
    for name in sorted(fixed):
        parts.append(f"{name} = {format_value(fixed[name])}")
    for name in sorted(state):
        parts.append(f"{name} = {format_value(state[name])}")
    for name in sorted(primed):
        parts.append(f"{name}' = {format_value(primed[name])}")
    return " /\\ ".join(parts)


def _classify_residual(res):
    kinds = {k for k, _ in res.blockers}
    if "err" in kinds:
        detail = ", ".join(sorted(n for k, n in res.blockers if k == "err"))
        return Failed("evaluation-error", detail)
    if "opaque" in kinds:
        names = sorted(n for k, n in res.blockers if k == "opaque")
        return Failed("unexpanded-opaque-atom", ", ".join(names))
    names = sorted(n for k, n in res.blockers if k == "var")
    return Unsupported("unbounded-variable: " + ", ".join(names))


def _goal_matches(expr, residual_keys):
    if isinstance(expr, T.And):
        return all(term_key(p) in residual_keys for p in T.flatten_and(expr))
    if isinstance(expr, T.Or):
        return term_key(expr) in residual_keys or any(
            term_key(p) in residual_keys for p in T.flatten_or(expr))
    return term_key(expr) in residual_keys


def _valuation_sig(d):
    return frozenset(d.items())


def _run_task(task, varnames, varset, meter, fixed, evals):
    """None when the task holds; a Failed/Unsupported verdict otherwise."""
    if _discharged(task):
        return None

    pins = []
    bounds = []
    bounded = set()
    pinned = set()
    bound_hyp = {}
    skip = set()

    for h in task.hyps:
        if isinstance(h, T.Eq):
            pat = _pin_pattern(h, varnames)
            # only the first equation may pin a slot; further equations
            # on the same slot stay behind as ordinary checks
            if pat is not None and (pat[0], pat[1]) not in pinned:
                pins.append(pat)
                pinned.add((pat[0], pat[1]))
                skip.add(id(h))
                continue
        if isinstance(h, T.In):
            pat = _bound_pattern(h, varnames)
            if pat is not None:
                slot, name, dome = pat
                if (slot, name) not in bounded:
                    vals = _const_eval(dome)
                    if isinstance(vals, VSet):
                        bounds.append((slot, name, vals.sorted_members()))
                        bounded.add((slot, name))
                        bound_hyp[(slot, name)] = id(h)
                        skip.add(id(h))

    # a pinned slot is not enumerated, so a membership bound on it no
    # longer constrains anything by construction: put the In hypothesis
    # back among the checks
    pin_slots = {(slot, name) for slot, name, _ in pins}
    for key in pin_slots:
        if key in bound_hyp:
            skip.discard(bound_hyp[key])
    bounds = [b for b in bounds if (b[0], b[1]) not in pin_slots]

    width = 1
    for _, _, vals in bounds:
        width *= len(vals)
    if width > max(meter.left, 0):
        return Unsupported("enumeration-budget")

    checks = sorted((h for h in task.hyps if id(h) not in skip), key=_size)
    undecided = None

    for combo in itertools.product(*[vals for _, _, vals in bounds]):
        if not meter.charge():
            return Unsupported("enumeration-budget")
        state, primed = {}, {}
        slots = {"state": state, "primed": primed}
        for (slot, name, _), val in zip(bounds, combo):
            slots[slot][name] = val

        todo = list(pins)
        while todo:
            progressed = False
            for pin in list(todo):
                slot, name, rhs = pin
                if name in slots[slot]:
                    todo.remove(pin)
                    progressed = True
                    continue
                v = mcheck.eval_partial(rhs, state, primed, {}, varset)
                if isinstance(v, Value):
                    slots[slot][name] = v
                    todo.remove(pin)
                    progressed = True
            if not progressed:
                break
        extra = []
        for slot, name, rhs in todo:
            sym = T.Name(name)
            extra.append(T.Eq(T.Prime(sym) if slot == "primed" else sym,
                              rhs))

        ssig = _valuation_sig(state)
        psig = _valuation_sig(primed)

        g = evals.run(task.goal, ssig, psig, state, primed, varset)
        if isinstance(g, VBool) and g.value:
            continue

        admissible = True
        error = None
        residuals = {}
        for h in itertools.chain(checks, extra):
            v = evals.run(h, ssig, psig, state, primed, varset)
            if isinstance(v, mcheck.Res):
                if any(k == "err" for k, _ in v.blockers):
                    error = error or v
                    continue
                residuals[term_key(v.expr)] = v.expr
                for p in T.flatten_and(v.expr):
                    residuals.setdefault(term_key(p), p)
                continue
            if isinstance(v, VBool) and not v.value:
                admissible = False
                break
        if not admissible:
            continue
        if error is not None:
            detail = ", ".join(sorted(n for k, n in error.blockers
                                      if k == "err"))
            return Failed("evaluation-error", detail)

        # modus ponens over residual implications, so a conjunct goal can
        # still be matched after its antecedent was peeled into a separate
        # hypothesis
        changed = True
        while changed:
            changed = False
            for e in list(residuals.values()):
                if not isinstance(e, T.Implies):
                    continue
                if all(term_key(p) in residuals
                       for p in T.flatten_and(e.lhs)):
                    for p in T.flatten_and(e.rhs):
                        k = term_key(p)
                        if k not in residuals:
                            residuals[k] = p
                            changed = True
        residual_keys = set(residuals)

        # hypotheses whose residuals contradict each other exclude the
        # valuation outright
        contradictory = False
        for e in residuals.values():
            if isinstance(e, T.Not) and term_key(e.item) in residual_keys:
                contradictory = True
                break
        if contradictory:
            continue

        if isinstance(g, VBool):
            if residuals:
                # some hypothesis neither held nor failed here, so this is
                # not a genuine counterexample; it still blocks Proved
                if undecided is None:
                    undecided = Unsupported(
                        "undecided-valuation: "
                        + _fmt_valuation(fixed, state, primed))
                continue
            return Failed("counter-valuation",
                          _fmt_valuation(fixed, state, primed))
        if not isinstance(g, mcheck.Res):
            return Failed("evaluation-error", "goal is not a boolean")
        if not _goal_matches(g.expr, residual_keys):
            return _classify_residual(g)
    return undecided


def prove_ground(ob, budget=10 ** 7, deadline=None):
    """Decide an obligation by normalization, syntactic discharge, and
    bounded enumeration of its membership-bounded symbols."""
    from .proofman import NewDecl

    defs = ob.defs()
    expand = frozenset(n for n in ob.expand if n in defs)
    levels = {}
    varnames, constnames = set(), set()
    const_domains = {}
    for item in ob.context:
        if isinstance(item, NewDecl):
            if item.kind == "VARIABLE":
                levels[item.name] = T.STATE
                varnames.add(item.name)
            else:
                levels[item.name] = T.CONSTANT
                constnames.add(item.name)
                if item.domain is not None:
                    const_domains[item.name] = item.domain
    levels.update(_def_levels(defs, levels))

    try:
        goal = _prep(ob.goal, defs, expand, levels)
        hyps = [_prep(f.formula, defs, expand, levels)
                for f in ob.facts()]
    except (PetrelError, ExecutionError) as exc:
        return Failed("evaluation-error", str(exc))

    hyps, goal = _peel(hyps, goal)
    flat = []
    for h in hyps:
        flat.extend(T.flatten_and(h))

    # pin down NEW constants up front: substituting their finitely many
    # values as terms lets guard contradictions prune whole tasks
    cbounds = []
    seen = set()
    for name, dom in const_domains.items():
        vals = _const_eval(dom)
        if isinstance(vals, VSet):
            cbounds.append((name, vals.sorted_members()))
            seen.add(name)
    for h in flat:
        if isinstance(h, T.In) and isinstance(h.item, T.Name) \
                and h.item.name in constnames and h.item.name not in seen:
            vals = _const_eval(h.domain)
            if isinstance(vals, VSet):
                cbounds.append((h.item.name, vals.sorted_members()))
                seen.add(h.item.name)

    varset = varnames | constnames
    meter = _Budget(budget, deadline)
    memo = set()
    dcache = {}
    evals = _Evals()

    for combo in itertools.product(*[vals for _, vals in cbounds]):
        if not meter.charge():
            return Unsupported("enumeration-budget")
        fixed = {name: val for (name, _), val in zip(cbounds, combo)}
        mapping = {name: _value_term(val) for name, val in fixed.items()}
        if mapping:
            chyps = [T.subst_names(h, mapping) for h in flat]
            cgoal = T.subst_names(goal, mapping)
        else:
            chyps, cgoal = flat, goal
        chyps = [_freeze_domains(h, dcache) for h in chyps]
        cgoal = _freeze_domains(cgoal, dcache)
        for task in _normalize(chyps, cgoal):
            key = (frozenset(term_key(h) for h in task.hyps),
                   term_key(task.goal))
            if key in memo:
                continue
            bad = _run_task(task, varnames, varset, meter, fixed, evals)
            if bad is not None:
                return bad
            memo.add(key)
    return Proved("ground")


# --- temporal rules --------------------------------------------------------------


def apply_temporal_rules(ob):
    """Prove Init /\\ [][N]_v => []P from an invariant's initiation,
    consecution, and implication facts; decline anything else."""
    defs = ob.defs()

    def unfold(e):
        seen = set()
        while isinstance(e, T.Name) and e.name in defs \
                and not defs[e.name].params and e.name not in seen:
            seen.add(e.name)
            e = defs[e.name].body
        return e

    goal = unfold(ob.goal)
    if not isinstance(goal, T.Implies):
        return Unsupported("temporal reasoning unsupported", "temporal")
    rhs = unfold(goal.rhs)
    if not isinstance(rhs, T.Always):
        return Unsupported("temporal reasoning unsupported", "temporal")
    prop = rhs.item

    parts = T.flatten_and(unfold(goal.lhs))
    boxes = []
    inits = []
    for p in parts:
        u = unfold(p)
        if isinstance(u, T.Always) and isinstance(u.item, T.BoxAction):
            boxes.append(u.item)
        else:
            inits.append(p)
    if len(boxes) != 1 or not inits:
        return Unsupported("temporal reasoning unsupported", "temporal")
    box = boxes[0]
    init = inits[0] if len(inits) == 1 else T.And(tuple(inits))

    facts = [f.formula for f in ob.facts()]
    keys = {term_key(f) for f in facts}

    def have(e):
        return term_key(e) in keys

    init_key = term_key(init)
    for f in facts:
        if not isinstance(f, T.Implies) or term_key(f.lhs) != init_key:
            continue
        inv = f.rhs
        consec = T.Implies(T.And((inv, box)), T.Prime(inv))
        consec_swap = T.Implies(T.And((box, inv)), T.Prime(inv))
        if not (have(consec) or have(consec_swap)):
            continue
        if have(T.Implies(inv, prop)):
            return Proved("temporal")
    return Unsupported("temporal reasoning unsupported", "temporal")


# --- SMT-LIB export --------------------------------------------------------------


class _OutsideFragment(Exception):
    pass


class _Smt:
    def __init__(self):
        self.lines = []
        self.decls = {}
        self.strings = {}
        self.fresh = 0
        self.need_int = False

    def declare(self, name, sig):
        if name in self.decls:
            if self.decls[name] != sig:
                raise _OutsideFragment(f"{name} used at two types")
            return
        self.decls[name] = sig
        args, ret = sig
        if args:
            self.lines.append(
                "(declare-fun %s (%s) %s)" % (name, " ".join(args), ret))
        else:
            self.lines.append("(declare-const %s %s)" % (name, ret))

    def string_const(self, s):
        if s not in self.strings:
            self.strings[s] = "str%d" % len(self.strings)
            self.declare(self.strings[s], ((), "U"))
        return self.strings[s]

    def gensym(self, stem):
        self.fresh += 1
        return "%s%d" % (stem, self.fresh)


def _smt_name(n):
    out = []
    for ch in n:
        out.append(ch if ch.isalnum() or ch == "_" else "_")
    return "v_" + "".join(out)


def _smt_int(e, ctx):
    """Int-sorted fast path; None when e is not plainly integral."""
    if isinstance(e, T.IntLit):
        return "(- %d)" % -e.value if e.value < 0 else str(e.value)
    if isinstance(e, T.Arith):
        a, b = _smt_int(e.lhs, ctx), _smt_int(e.rhs, ctx)
        if a is None or b is None:
            return None
        return "(%s %s %s)" % (e.op, a, b)
    return None


def _smt_term(e, ctx, bound):
    i = _smt_int(e, ctx)
    if i is not None:
        ctx.need_int = True
        return "(u_int %s)" % i
    if isinstance(e, T.BoolLit):
        return "u_true" if e.value else "u_false"
    if isinstance(e, T.StrLit):
        return ctx.string_const(e.value)
    if isinstance(e, T.BoundRef):
        if e.index >= len(bound):
            raise _OutsideFragment("unbound reference")
        return bound[-1 - e.index]
    if isinstance(e, T.Name):
        n = _smt_name(e.name)
        ctx.declare(n, ((), "U"))
        return n
    if isinstance(e, T.Prime) and isinstance(e.item, T.Name):
        n = _smt_name(e.item.name) + "_next"
        ctx.declare(n, ((), "U"))
        return n
    if isinstance(e, T.Apply):
        n = _smt_name(e.op)
        ctx.declare(n, (("U",) * len(e.args), "U"))
        args = " ".join(_smt_term(a, ctx, bound) for a in e.args)
        return "(%s %s)" % (n, args)
    if isinstance(e, T.FnApp):
        return "(ap %s %s)" % (_smt_term(e.fn, ctx, bound),
                               _smt_term(e.arg, ctx, bound))
    if isinstance(e, T.Arith):
        ctx.need_int = True
        return "(u_int (%s (int_of %s) (int_of %s)))" % (
            e.op, _smt_term(e.lhs, ctx, bound), _smt_term(e.rhs, ctx, bound))
    if isinstance(e, T.SetEnum):
        name = ctx.gensym("set")
        ctx.declare(name, ((), "U"))
        members = [_smt_term(x, ctx, bound) for x in e.items]
        body = " ".join("(= y %s)" % m for m in members) or "false"
        if len(members) > 1:
            body = "(or %s)" % body
        ctx.lines.append(
            "(assert (forall ((y U)) (= (mem y %s) %s)))" % (name, body))
        return name
    raise _OutsideFragment(type(e).__name__)


def _smt_formula(e, ctx, bound):
    if isinstance(e, T.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, T.And):
        return "(and %s)" % " ".join(_smt_formula(x, ctx, bound)
                                     for x in e.items)
    if isinstance(e, T.Or):
        return "(or %s)" % " ".join(_smt_formula(x, ctx, bound)
                                    for x in e.items)
    if isinstance(e, T.Not):
        return "(not %s)" % _smt_formula(e.item, ctx, bound)
    if isinstance(e, T.Implies):
        return "(=> %s %s)" % (_smt_formula(e.lhs, ctx, bound),
                               _smt_formula(e.rhs, ctx, bound))
    if isinstance(e, T.Eq):
        li, ri = _smt_int(e.lhs, ctx), _smt_int(e.rhs, ctx)
        if li is not None and ri is not None:
            ctx.need_int = True
            return "(= %s %s)" % (li, ri)
        return "(= %s %s)" % (_smt_term(e.lhs, ctx, bound),
                              _smt_term(e.rhs, ctx, bound))
    if isinstance(e, T.In):
        return "(mem %s %s)" % (_smt_term(e.item, ctx, bound),
                                _smt_term(e.domain, ctx, bound))
    if isinstance(e, (T.Forall, T.Exists)):
        x = ctx.gensym("q")
        dom = _smt_term(e.domain, ctx, bound)
        body = _smt_formula(e.body, ctx, bound + [x])
        if isinstance(e, T.Forall):
            return "(forall ((%s U)) (=> (mem %s %s) %s))" % (x, x, dom, body)
        return "(exists ((%s U)) (and (mem %s %s) %s))" % (x, x, dom, body)
    if isinstance(e, T.Name):
        n = _smt_name(e.name) + "_p"
        ctx.declare(n, ((), "Bool"))
        return n
    if isinstance(e, T.Prime) and isinstance(e.item, T.Name):
        n = _smt_name(e.item.name) + "_next_p"
        ctx.declare(n, ((), "Bool"))
        return n
    if isinstance(e, T.Apply):
        n = _smt_name(e.op) + "_p"
        ctx.declare(n, (("U",) * len(e.args), "Bool"))
        args = " ".join(_smt_term(a, ctx, bound) for a in e.args)
        return "(%s %s)" % (n, args)
    raise _OutsideFragment(type(e).__name__)


def export_smtlib(ob):
    """Render an obligation as an SMT-LIB 2 script whose unsatisfiability
    establishes the obligation.  Raises ValueError outside the fragment."""
    from .proofman import NewDecl

    defs = ob.defs()
    expand = frozenset(n for n in ob.expand if n in defs)
    levels = {}
    for item in ob.context:
        if isinstance(item, NewDecl):
            levels[item.name] = (T.STATE if item.kind == "VARIABLE"
                                 else T.CONSTANT)
    levels.update(_def_levels(defs, levels))

    try:
        goal = _prep(ob.goal, defs, expand, levels)
        hyps = [_prep(f.formula, defs, expand, levels) for f in ob.facts()]
        for item in ob.context:
            if isinstance(item, NewDecl) and item.domain is not None:
                hyps.append(T.In(T.Name(item.name), item.domain))
        ctx = _Smt()
        asserts = ["(assert %s)" % _smt_formula(h, ctx, []) for h in hyps]
        asserts.append("(assert (not %s))" % _smt_formula(goal, ctx, []))
    except (_OutsideFragment, PetrelError, ExecutionError) as exc:
        raise ValueError(f"outside the SMT fragment: {exc}") from exc

    head = [
        "(set-logic ALL)",
        "(declare-sort U 0)",
        "(declare-const u_true U)",
        "(declare-const u_false U)",
        "(assert (distinct u_true u_false))",
        "(declare-fun mem (U U) Bool)",
        "(declare-fun ap (U U) U)",
    ]
    if ctx.need_int:
        head += [
            "(declare-fun u_int (Int) U)",
            "(declare-fun int_of (U) Int)",
            "(assert (forall ((a Int)) (= (int_of (u_int a)) a)))",
        ]
    body = list(ctx.lines)
    strs = sorted(ctx.strings.values())
    if len(strs) > 1:
        # distinctness must follow the declarations it mentions
        body.append("(assert (distinct %s))" % " ".join(strs))
    return "\n".join(head + body + asserts + ["(check-sat)"]) + "\n"


def prove_smt(ob, cmd=None):
    """Export the obligation and, when a solver command is configured,
    run it; unsat proves the obligation."""
    cmd = cmd or os.environ.get("PETREL_SMT_CMD")
    try:
        script = export_smtlib(ob)
    except ValueError as exc:
        return Unsupported(str(exc), "smtlib")
    if not cmd:
        return Unsupported("no solver configured", "smtlib")
    try:
        proc = subprocess.run(shlex.split(cmd), input=script,
                              capture_output=True, text=True, timeout=60)
    except (OSError, subprocess.TimeoutExpired) as exc:
        return Unsupported(f"solver did not run: {exc}", "smtlib")
    answer = ""
    for line in proc.stdout.splitlines():
        line = line.strip()
        if line in ("sat", "unsat", "unknown"):
            answer = line
    if answer == "unsat":
        return Proved("smtlib")
    if answer == "sat":
        return Failed("counter-model", "", "smtlib")
    return Unsupported(f"solver answered {answer or 'nothing'}", "smtlib")
