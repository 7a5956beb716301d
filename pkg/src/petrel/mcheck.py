"""Evaluation and explicit-state model checking.

One evaluator serves two masters: strict mode raises ExecutionError at the
first problem (model checking), partial mode returns residual expressions
recording what blocked evaluation (the ground prover).  Conjunction,
disjunction, implication and IF evaluate left-to-right and short-circuit,
so an error in an unreached operand is not an error.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from . import kernel
from . import terms as T
from .canonical import ValueNode
from .errors import (ExecutionError, NotActionNormalForm, StateLimitExceeded,
                     UnboundedDomain, UnconstrainedVariable)
from .values import (BOOLEAN_SET_MEMBERS, FALSE, TRUE, Value, VBool, VFunc,
                     VInt, VSet, VStr, VTuple, format_value, value_bytes,
                     value_eq)

State = dict  # variable name -> Value

DEFAULT_STATE_LIMIT = 1_000_000
FNSET_LIMIT = 1_000_000


@dataclass(frozen=True)
class Res:
    """Partial-evaluation residual: what is left and why it is stuck.

    Blockers are ('var', name) for an unvalued variable or constant,
    ('opaque', name) for an unexpanded definition, ('err', kind) for an
    evaluation error the residual position would raise.
    """
    expr: T.Expr
    blockers: frozenset


class _Env:
    __slots__ = ("state", "primed", "consts", "varset", "partial", "bound")

    def __init__(self, state, primed, consts, varset, partial):
        self.state = state
        self.primed = primed
        self.consts = consts or {}
        self.varset = varset or set()
        self.partial = partial
        self.bound = []

    def fail(self, kind: str, message: str, span):
        if self.partial:
            return None  # caller builds the residual
        raise ExecutionError(kind, message, span=span)


def _residual(e: T.Expr, parts, blockers) -> Res:
    exprs = []
    blocked = set(blockers)
    for p in parts:
        if isinstance(p, Res):
            exprs.append(p.expr)
            blocked |= p.blockers
        elif isinstance(p, Value):
            exprs.append(ValueNode(p))
        else:
            exprs.append(p)
    return Res(T.rebuild(e, exprs), frozenset(blocked))


def _is_res(x) -> bool:
    return isinstance(x, Res)


def eval_expr(e: T.Expr, state: Optional[Mapping] = None,
              primed: Optional[Mapping] = None,
              consts: Optional[Mapping] = None) -> Value:
    """Strict evaluation; raises ExecutionError or UnboundedDomain."""
    env = _Env(dict(state or {}), dict(primed) if primed is not None else None,
               dict(consts or {}), set(), partial=False)
    return _ev(e, env)


def eval_partial(e: T.Expr, state: Mapping, primed: Mapping,
                 consts: Mapping, varset: set):
    """Partial evaluation; returns a Value or a Res."""
    env = _Env(dict(state), dict(primed), dict(consts), set(varset), partial=True)
    return _ev(e, env)


def _bool(v, env, span):
    if isinstance(v, VBool):
        return v.value
    r = env.fail("non-boolean-condition",
                 f"expected a boolean, got {format_value(v)}", span)
    return r  # None in partial mode


def _ev(e: T.Expr, env: _Env):
    if isinstance(e, ValueNode):
        return e.value
    if isinstance(e, T.BoolLit):
        return VBool(e.value)
    if isinstance(e, T.IntLit):
        return VInt(e.value)
    if isinstance(e, T.StrLit):
        return VStr(e.value)
    if isinstance(e, T.BooleanSet):
        return VSet(BOOLEAN_SET_MEMBERS)
    if isinstance(e, T.BoundRef):
        return env.bound[-1 - e.index]
    if isinstance(e, T.Name):
        if env.state is not None and e.name in env.state:
            return env.state[e.name]
        if e.name in env.consts:
            return env.consts[e.name]
        if env.partial:
            kind = "var" if e.name in env.varset else "opaque"
            return Res(e, frozenset([(kind, e.name)]))
        raise ExecutionError("unbound-name", f"no value for {e.name}", span=e.span)
    if isinstance(e, T.Prime):
        return _ev_prime(e, env)
    if isinstance(e, T.Unchanged):
        return _ev_unchanged(e, env)
    if isinstance(e, T.BoxAction):
        return _ev(T.Or((e.action, T.Unchanged(e.sub, span=e.span)), span=e.span), env)
    if isinstance(e, T.Always):
        if env.partial:
            return Res(e, frozenset([("err", "temporal-in-evaluation")]))
        raise ExecutionError("temporal-in-evaluation",
                             "[] cannot be evaluated over states", span=e.span)
    if isinstance(e, T.And):
        residuals = []
        for item in e.items:
            v = _ev(item, env)
            if _is_res(v):
                residuals.append(v)
                continue
            b = _bool(v, env, item.span)
            if b is None:
                residuals.append(Res(item, frozenset([("err", "non-boolean-condition")])))
            elif not b:
                return FALSE
        if not residuals:
            return TRUE
        if len(residuals) == 1:
            return residuals[0]
        return Res(T.And(tuple(r.expr for r in residuals)),
                   frozenset().union(*[r.blockers for r in residuals]))
    if isinstance(e, T.Or):
        residuals = []
        for item in e.items:
            v = _ev(item, env)
            if _is_res(v):
                residuals.append(v)
                continue
            b = _bool(v, env, item.span)
            if b is None:
                residuals.append(Res(item, frozenset([("err", "non-boolean-condition")])))
            elif b:
                return TRUE
        if not residuals:
            return FALSE
        if len(residuals) == 1:
            return residuals[0]
        return Res(T.Or(tuple(r.expr for r in residuals)),
                   frozenset().union(*[r.blockers for r in residuals]))
    if isinstance(e, T.Not):
        v = _ev(e.item, env)
        if _is_res(v):
            return _residual(e, [v], v.blockers)
        b = _bool(v, env, e.span)
        if b is None:
            return _residual(e, [Res(e.item, frozenset())],
                             frozenset([("err", "non-boolean-condition")]))
        return VBool(not b)
    if isinstance(e, T.Implies):
        a = _ev(e.lhs, env)
        if not _is_res(a):
            b = _bool(a, env, e.lhs.span)
            if b is None:
                a = Res(e.lhs, frozenset([("err", "non-boolean-condition")]))
            elif not b:
                return TRUE
            else:
                v = _ev(e.rhs, env)
                if _is_res(v):
                    return v
                vb = _bool(v, env, e.rhs.span)
                if vb is None:
                    return Res(e.rhs, frozenset([("err", "non-boolean-condition")]))
                return VBool(vb)
        # antecedent is residual: the consequent may still settle it
        v = _ev(e.rhs, env)
        if not _is_res(v) and isinstance(v, VBool):
            if v.value:
                return TRUE
            return Res(T.Not(a.expr), a.blockers)
        parts = [a, v if _is_res(v) else ValueNode(v)]
        return _residual(e, parts, frozenset())
    if isinstance(e, T.Eq):
        a = _ev(e.lhs, env)
        b = _ev(e.rhs, env)
        if _is_res(a) or _is_res(b):
            return _residual(e, [a, b], frozenset())
        r = value_eq(a, b)
        if r is None:
            f = env.fail("incomparable-equality",
                         f"cannot compare {format_value(a)} with {format_value(b)}",
                         e.span)
            return Res(e, frozenset([("err", "incomparable-equality")])) if f is None else f
        return VBool(r)
    if isinstance(e, T.In):
        a = _ev(e.item, env)
        dom = _ev(e.domain, env)
        if _is_res(a) or _is_res(dom):
            return _residual(e, [a, dom], frozenset())
        if not isinstance(dom, VSet):
            f = env.fail("not-a-set", f"\\in over {format_value(dom)}", e.span)
            return Res(e, frozenset([("err", "not-a-set")])) if f is None else f
        saw_incomparable = False
        for m in dom.sorted_members():
            r = value_eq(a, m)
            if r is None:
                saw_incomparable = True
            elif r:
                return TRUE
        if saw_incomparable:
            f = env.fail("incomparable-equality",
                         f"membership of {format_value(a)} is not decidable here",
                         e.span)
            return Res(e, frozenset([("err", "incomparable-equality")])) if f is None else f
        return FALSE
    if isinstance(e, T.Arith):
        a = _ev(e.lhs, env)
        b = _ev(e.rhs, env)
        if _is_res(a) or _is_res(b):
            return _residual(e, [a, b], frozenset())
        if not (isinstance(a, VInt) and isinstance(b, VInt)):
            f = env.fail("arithmetic-on-non-integer",
                         f"{e.op} on {format_value(a)} and {format_value(b)}", e.span)
            return Res(e, frozenset([("err", "arithmetic-on-non-integer")])) if f is None else f
        if e.op == "+":
            return VInt(a.value + b.value)
        if e.op == "-":
            return VInt(a.value - b.value)
        return VInt(a.value * b.value)
    if isinstance(e, T.If):
        c = _ev(e.cond, env)
        if not _is_res(c):
            b = _bool(c, env, e.cond.span)
            if b is None:
                return _residual(e, [Res(e.cond, frozenset()), Res(e.then, frozenset()),
                                     Res(e.orelse, frozenset())],
                                 frozenset([("err", "non-boolean-condition")]))
            return _ev(e.then if b else e.orelse, env)
        t = _ev(e.then, env)
        o = _ev(e.orelse, env)
        if not _is_res(t) and not _is_res(o) and value_eq(t, o) is True:
            return t
        return _residual(e, [c, t if _is_res(t) else ValueNode(t),
                             o if _is_res(o) else ValueNode(o)], frozenset())
    if isinstance(e, (T.Forall, T.Exists)):
        return _ev_quant(e, env)
    if isinstance(e, T.FnLit):
        dom = _ev(e.domain, env)
        if _is_res(dom):
            return Res(e, dom.blockers)
        if not isinstance(dom, VSet):
            f = env.fail("not-a-set", "function domain is not a set", e.span)
            return Res(e, frozenset([("err", "not-a-set")])) if f is None else f
        graph = []
        for m in dom.sorted_members():
            env.bound.append(m)
            try:
                v = _ev(e.body, env)
            finally:
                env.bound.pop()
            if _is_res(v):
                return Res(e, v.blockers)
            graph.append((m, v))
        return VFunc(graph)
    if isinstance(e, T.FnSet):
        dom = _ev(e.domain, env)
        cod = _ev(e.codomain, env)
        if _is_res(dom) or _is_res(cod):
            return _residual(e, [dom, cod], frozenset())
        if not (isinstance(dom, VSet) and isinstance(cod, VSet)):
            f = env.fail("not-a-set", "[S -> T] needs two sets", e.span)
            return Res(e, frozenset([("err", "not-a-set")])) if f is None else f
        n, k = len(dom.members), len(cod.members)
        if k ** n > FNSET_LIMIT:
            if env.partial:
                return Res(e, frozenset([("err", "unbounded-domain")]))
            raise UnboundedDomain(f"[S -> T] has {k}**{n} members")
        keys = dom.sorted_members()
        cods = cod.sorted_members()
        funcs = []

        def build(i, acc):
            if i == len(keys):
                funcs.append(VFunc(list(acc)))
                return
            for c in cods:
                build(i + 1, acc + [(keys[i], c)])

        build(0, [])
        return VSet(funcs)
    if isinstance(e, T.FnApp):
        f = _ev(e.fn, env)
        a = _ev(e.arg, env)
        if _is_res(f) or _is_res(a):
            return _residual(e, [f, a], frozenset())
        if isinstance(f, VFunc):
            v = f.apply(a)
            if v is None:
                r = env.fail("apply-outside-domain",
                             f"{format_value(a)} is outside the domain", e.span)
                return Res(e, frozenset([("err", "apply-outside-domain")])) if r is None else r
            return v
        if isinstance(f, VTuple):
            if isinstance(a, VInt) and 1 <= a.value <= len(f.items):
                return f.items[a.value - 1]
            r = env.fail("apply-outside-domain", "tuple index out of range", e.span)
            return Res(e, frozenset([("err", "apply-outside-domain")])) if r is None else r
        r = env.fail("not-a-function",
                     f"cannot apply {format_value(f)}", e.span)
        return Res(e, frozenset([("err", "not-a-function")])) if r is None else r
    if isinstance(e, T.Except):
        f = _ev(e.fn, env)
        k = _ev(e.key, env)
        v = _ev(e.value, env)
        if _is_res(f) or _is_res(k) or _is_res(v):
            return _residual(e, [f, k, v], frozenset())
        if not isinstance(f, VFunc):
            r = env.fail("not-a-function", "EXCEPT on a non-function", e.span)
            return Res(e, frozenset([("err", "not-a-function")])) if r is None else r
        if f.apply(k) is None:
            r = env.fail("apply-outside-domain",
                         f"EXCEPT key {format_value(k)} outside the domain", e.span)
            return Res(e, frozenset([("err", "apply-outside-domain")])) if r is None else r
        return VFunc([(kk, v if value_eq(kk, k) else vv) for kk, vv in f.graph])
    if isinstance(e, T.Tup):
        parts = [_ev(x, env) for x in e.items]
        if any(_is_res(p) for p in parts):
            return _residual(e, parts, frozenset())
        return VTuple(tuple(parts))
    if isinstance(e, T.SetEnum):
        parts = [_ev(x, env) for x in e.items]
        if any(_is_res(p) for p in parts):
            return _residual(e, parts, frozenset())
        return VSet(parts)
    if isinstance(e, T.Apply):
        parts = [_ev(a, env) for a in e.args]
        if env.partial:
            return _residual(e, parts, frozenset([("opaque", e.op)]))
        raise ExecutionError("opaque-operator",
                             f"{e.op} was not expanded before evaluation", span=e.span)
    if isinstance(e, T.Bang):
        raise ExecutionError("opaque-operator",
                             f"{e.op}!(..) was not resolved before evaluation", span=e.span)
    raise ExecutionError("unsupported", f"cannot evaluate {type(e).__name__}", span=e.span)


def _ev_prime(e: T.Prime, env: _Env):
    if env.primed is None:
        if env.partial:
            return Res(e, frozenset([("err", "prime-in-state-context")]))
        raise ExecutionError("prime-in-state-context",
                             "primed expression in a state-level position", span=e.span)
    inner = _Env(env.primed, None, env.consts, env.varset, env.partial)
    inner.bound = env.bound
    v = _ev(e.item, inner)
    if _is_res(v):
        blockers = frozenset(
            ("var", n + "'") if k == "var" else (k, n) for k, n in v.blockers)
        return Res(T.Prime(v.expr, span=e.span), blockers)
    return v


def _ev_unchanged(e: T.Unchanged, env: _Env):
    now = _ev(e.item, env)
    nxt = _ev_prime(T.Prime(e.item, span=e.span), env)
    if _is_res(now) or _is_res(nxt):
        parts = []
        blockers = set()
        for p in (now, nxt):
            if _is_res(p):
                blockers |= p.blockers
        return Res(e, frozenset(blockers) or frozenset([("err", "prime-in-state-context")]))
    r = value_eq(nxt, now)
    if r is None:
        f = env.fail("incomparable-equality", "UNCHANGED on incomparable values", e.span)
        return Res(e, frozenset([("err", "incomparable-equality")])) if f is None else f
    return VBool(r)


def _ev_quant(e, env: _Env):
    is_forall = isinstance(e, T.Forall)
    dom = _ev(e.domain, env)
    if _is_res(dom):
        return Res(e, dom.blockers)
    if not isinstance(dom, VSet):
        if env.partial:
            return Res(e, frozenset([("err", "unbounded-domain")]))
        raise UnboundedDomain(f"quantifier domain is {format_value(dom)}")
    residuals = []
    for m in dom.sorted_members():
        env.bound.append(m)
        try:
            v = _ev(e.body, env)
        finally:
            env.bound.pop()
        if _is_res(v):
            residuals.append(v)
            continue
        if not isinstance(v, VBool):
            f = env.fail("non-boolean-condition", "quantifier body is not boolean",
                         e.body.span)
            if f is None:
                residuals.append(Res(e.body, frozenset([("err", "non-boolean-condition")])))
                continue
        if is_forall and not v.value:
            return FALSE
        if not is_forall and v.value:
            return TRUE
    if not residuals:
        return TRUE if is_forall else FALSE
    blockers = frozenset().union(*[r.blockers for r in residuals])
    if len(residuals) == 1:
        return Res(residuals[0].expr, blockers)
    cls = T.And if is_forall else T.Or
    return Res(cls(tuple(r.expr for r in residuals)), blockers)


# -- states -------------------------------------------------------------------

def state_key(s: State) -> bytes:
    return b"".join(n.encode() + b"\x00" + value_bytes(s[n]) for n in sorted(s))


def format_state(s: State) -> str:
    return " /\\ ".join(f"{n} = {format_value(s[n])}" for n in sorted(s))


def _prepare(e: T.Expr, defs: Mapping[str, T.Definition]) -> T.Expr:
    """Expand all definitions and push primes onto variables."""
    x = kernel.resolve_bangs(e, defs)
    x = kernel.expand_definitions(x, defs)
    levels = {}
    x = _normalize_actions(x)
    return kernel.distribute_prime(x, levels)


def _normalize_actions(e: T.Expr) -> T.Expr:
    """Rewrite [N]_v to N \\/ UNCHANGED v and UNCHANGED tuples to equalities."""

    def fn(node):
        if isinstance(node, T.BoxAction):
            return T.Or((node.action, _unchanged_eqs(node.sub)), span=node.span)
        if isinstance(node, T.Unchanged):
            return _unchanged_eqs(node.item)
        return node

    return T.transform(e, fn)


def _unchanged_eqs(item: T.Expr) -> T.Expr:
    if isinstance(item, T.Tup):
        return T.And(tuple(_unchanged_eqs(x) for x in item.items), span=item.span)
    return T.Eq(T.Prime(item, span=item.span), item, span=item.span)


def initial_states(init: T.Expr, variables, defs=None, consts=None):
    """Enumerate the states satisfying init.

    Conjuncts are processed left to right: v = e pins, v \\in S branches,
    anything else filters.  Returns (states, candidates) where candidates
    counts the assignments generated before filtering.
    """
    expanded = _prepare(init, defs or {})
    conjs = T.flatten_and(expanded)
    variables = list(variables)
    partials = [{}]
    candidates = 0
    counted = [False]

    def is_full(p):
        return all(v in p for v in variables)

    for conj in conjs:
        nxt = []
        for p in partials:
            if isinstance(conj, T.Eq) and isinstance(conj.lhs, T.Name) \
                    and conj.lhs.name in variables and conj.lhs.name not in p:
                v = eval_expr(conj.rhs, state=p, consts=consts)
                p2 = dict(p)
                p2[conj.lhs.name] = v
                nxt.append(p2)
            elif isinstance(conj, T.In) and isinstance(conj.item, T.Name) \
                    and conj.item.name in variables and conj.item.name not in p:
                dom = eval_expr(conj.domain, state=p, consts=consts)
                if not isinstance(dom, VSet):
                    raise UnboundedDomain(
                        f"{conj.item.name} ranges over {format_value(dom)}")
                for m in dom.sorted_members():
                    p2 = dict(p)
                    p2[conj.item.name] = m
                    nxt.append(p2)
            else:
                r = eval_expr(conj, state=p, consts=consts)
                if not isinstance(r, VBool):
                    raise ExecutionError("non-boolean-condition",
                                         "state predicate conjunct is not boolean",
                                         span=conj.span)
                if r.value:
                    nxt.append(p)
        partials = nxt
        if partials and is_full(partials[0]) and not counted[0]:
            counted[0] = True
            candidates = len(partials)
    missing = [v for v in variables if any(v not in p for p in partials)]
    if partials and missing:
        raise UnconstrainedVariable(
            f"variables never pinned or bounded: {', '.join(missing)}")
    if not counted[0]:
        candidates = len(partials)
    return partials, candidates


def decompose_actions(next_expr: T.Expr, defs: Mapping[str, T.Definition]):
    """Split a next-state relation into named atomic actions.

    Disjunctions split; bounded existentials over ground sets split per
    value; an application of a defined operator that decomposes to a single
    action names it, e.g. a0(1).
    """

    def render_arg(a):
        if isinstance(a, ValueNode):
            return format_value(a.value)
        if isinstance(a, T.IntLit):
            return str(a.value)
        if isinstance(a, T.StrLit):
            return f'"{a.value}"'
        if isinstance(a, T.BoolLit):
            return "TRUE" if a.value else "FALSE"
        return "?"

    def go(e):
        if isinstance(e, T.Or):
            out = []
            for x in e.items:
                out.extend(go(x))
            return out
        if isinstance(e, T.Exists):
            dom_expr = kernel.expand_definitions(
                kernel.resolve_bangs(e.domain, defs), defs)
            dom = eval_expr(dom_expr, state={})
            if not isinstance(dom, VSet):
                raise UnboundedDomain("\\E domain in the next-state relation")
            out = []
            for m in dom.sorted_members():
                out.extend(go(T.subst_bound(e.body, ValueNode(m))))
            return out
        if isinstance(e, T.Name) and e.name in defs and not defs[e.name].params:
            sub = go(defs[e.name].body)
            if len(sub) == 1:
                return [(e.name, sub[0][1])]
            return sub
        if isinstance(e, T.Apply) and e.op in defs:
            d = defs[e.op]
            if len(d.params) != len(e.args):
                raise NotActionNormalForm(f"{e.op} applied with wrong arity")
            body = T.subst_names(d.body, dict(zip(d.params, e.args)))
            sub = go(body)
            if len(sub) == 1:
                name = f"{e.op}({', '.join(render_arg(a) for a in e.args)})"
                return [(name, sub[0][1])]
            return sub
        return [(None, _prepare(e, defs))]

    out = []
    for i, (name, body) in enumerate(go(next_expr)):
        out.append((name or f"action{i}", body))
    return out


def action_successors(body: T.Expr, state: State, variables, consts=None):
    """Successor states of one expanded, prime-distributed action body.

    The action must be in normal form: per primed variable exactly one
    pinning conjunct (v' = e, v' = [v EXCEPT ..], or an UNCHANGED-derived
    equality); IF conditions and guards decide deterministically.
    """
    work = list(T.flatten_and(body))
    primed: State = {}
    filters = []
    progress = True
    while work and progress:
        progress = False
        deferred = []
        for conj in work:
            if isinstance(conj, T.Eq) and isinstance(conj.lhs, T.Prime) \
                    and isinstance(conj.lhs.item, T.Name):
                v = conj.lhs.item.name
                try:
                    val = eval_expr(conj.rhs, state=state, primed=primed, consts=consts)
                except ExecutionError as err:
                    if err.kind == "unbound-name":
                        deferred.append(conj)
                        continue
                    raise
                if v in primed:
                    if not value_eq(primed[v], val):
                        return []
                else:
                    primed[v] = val
                    progress = True
                continue
            if isinstance(conj, T.If):
                try:
                    c = eval_expr(conj.cond, state=state, primed=primed, consts=consts)
                except ExecutionError as err:
                    if err.kind == "unbound-name":
                        deferred.append(conj)
                        continue
                    raise
                if not isinstance(c, VBool):
                    raise ExecutionError("non-boolean-condition",
                                         "IF condition is not boolean", span=conj.span)
                work_extra = T.flatten_and(conj.then if c.value else conj.orelse)
                deferred.extend(work_extra)
                progress = True
                continue
            if any(isinstance(x, T.Prime) for x in T.walk(conj)):
                filters.append(conj)
                continue
            r = eval_expr(conj, state=state, consts=consts)
            if not isinstance(r, VBool):
                raise ExecutionError("non-boolean-condition",
                                     "action guard is not boolean", span=conj.span)
            if not r.value:
                return []
            progress = True
        work = deferred
    if work:
        raise NotActionNormalForm(
            "action conjuncts could not be ordered into assignments")
    missing = [v for v in variables if v not in primed]
    if missing:
        raise NotActionNormalForm(
            f"action does not determine: {', '.join(sorted(missing))}")
    for f in filters:
        r = eval_expr(f, state=state, primed=primed, consts=consts)
        if not isinstance(r, VBool):
            raise ExecutionError("non-boolean-condition",
                                 "action conjunct is not boolean", span=f.span)
        if not r.value:
            return []
    return [dict(primed)]


def successors(next_expr: T.Expr, state: State, variables,
               defs: Mapping[str, T.Definition], actions=None):
    """All (action name, successor state) pairs from state."""
    if actions is None:
        actions = decompose_actions(next_expr, defs)
    out = []
    for name, body in actions:
        for s2 in action_successors(body, state, variables):
            out.append((name, s2))
    return out


# -- results ------------------------------------------------------------------

@dataclass
class CheckOK:
    states: int


@dataclass
class Violation:
    invariant: str
    trace: list  # [(action_name | None, state)], first action is None
    states: int


@dataclass
class ExecutionErrorReport:
    kind: str
    message: str
    trace: list


@dataclass
class InductiveOK:
    candidates: int
    checked: int


@dataclass
class CTI:
    """Counterexample to induction: inv-state, action, non-inv successor."""
    candidates: int
    state: State
    action: str
    successor: State


def check_invariant(init: T.Expr, next_expr: T.Expr, inv: T.Expr, variables,
                    defs: Mapping[str, T.Definition], inv_name: str = "invariant",
                    limit: int = DEFAULT_STATE_LIMIT):
    """Breadth-first reachability check; the returned violation trace is
    shortest and deterministic (FIFO queue, fixed action order)."""
    inv_prepared = _prepare(inv, defs)
    actions = decompose_actions(next_expr, defs)

    def trace_to(key, parents, states_by_key):
        chain = []
        while key is not None:
            parent, action = parents[key]
            chain.append((action, states_by_key[key]))
            key = parent
        chain.reverse()
        return chain

    try:
        roots, _ = initial_states(init, variables, defs)
    except ExecutionError as err:
        return ExecutionErrorReport(err.kind, err.message, [])
    queue = []
    parents = {}
    states_by_key = {}
    for s in roots:
        k = state_key(s)
        if k not in parents:
            parents[k] = (None, None)
            states_by_key[k] = s
            queue.append(k)
    seen = 0
    qi = 0
    while qi < len(queue):
        k = queue[qi]
        qi += 1
        s = states_by_key[k]
        seen += 1
        if seen > limit:
            raise StateLimitExceeded(f"more than {limit} reachable states")
        try:
            holds = eval_expr(inv_prepared, state=s)
        except (ExecutionError, UnboundedDomain) as err:
            kind = getattr(err, "kind", "unbounded-domain")
            msg = getattr(err, "message", str(err))
            return ExecutionErrorReport(kind, msg, trace_to(k, parents, states_by_key))
        if not (isinstance(holds, VBool) and holds.value):
            return Violation(inv_name, trace_to(k, parents, states_by_key), seen)
        for name, body in actions:
            try:
                nexts = action_successors(body, s, variables)
            except (ExecutionError, UnboundedDomain) as err:
                kind = getattr(err, "kind", "unbounded-domain")
                msg = getattr(err, "message", str(err))
                return ExecutionErrorReport(kind, msg, trace_to(k, parents, states_by_key))
            for s2 in nexts:
                k2 = state_key(s2)
                if k2 not in parents:
                    parents[k2] = (k, name)
                    states_by_key[k2] = s2
                    queue.append(k2)
    return CheckOK(len(states_by_key))


def check_inductive(inv: T.Expr, next_expr: T.Expr, variables,
                    defs: Mapping[str, T.Definition]):
    """Is inv preserved by every step (including stuttering) from every
    inv-state?  Enumerates inv's membership-bounded candidate states."""
    inv_prepared = _prepare(inv, defs)
    states, candidates = initial_states(inv, variables, defs)
    actions = decompose_actions(next_expr, defs)
    for s in states:
        for name, body in actions:
            for s2 in action_successors(body, s, variables):
                holds = eval_expr(inv_prepared, state=s2)
                if not (isinstance(holds, VBool) and holds.value):
                    return CTI(candidates, s, name, s2)
    return InductiveOK(candidates, len(states))
