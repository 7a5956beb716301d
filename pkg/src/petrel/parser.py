"""Recursive-descent parser for modules, expressions, and proofs.

Layout matters in exactly one place: a /\\ or \\/ appearing where an
expression is expected starts a bullet list, and the list keeps
collecting items while each new bullet sits at the same column.  A token
on a later line at or left of the bullet column ends the current item.
Everything else is ordinary precedence parsing:

    '  [..]  f(..)   tightest
    ~  []
    *
    +  -
    =  #  \\in  \\notin    (non-associative)
    /\\
    \\/
    =>                 loosest, right-associative

Quantifier and IF..THEN..ELSE bodies extend as far to the right as the
layout allows.

Names are resolved in a second pass: bound variables were already turned
into BoundRef by the parse, so the pass only has to confirm that every
remaining Name, operator application, DEF citation, and step reference
is visible at its use site.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import terms as T
from .errors import (
    SyntaxError as PSyntaxError,
    ScopeError,
    OrderError,
    DuplicateName,
    MissingQED,
    DanglingStepReference,
)
from .lexer import tokenize


# ---------------------------------------------------------------------------
# module / proof structure


@dataclass(frozen=True)
class StepRef:
    """A citation of a proof step, e.g. <2>1, inside a BY list."""
    label: str


@dataclass(frozen=True)
class NewItem:
    """ASSUME NEW [CONSTANT|VARIABLE] name [\\in domain]."""
    kind: str                  # 'CONSTANT' or 'VARIABLE'
    name: str
    domain: object = None      # Expr or None
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class ByProof:
    facts: tuple = ()          # StepRef | Expr
    defs: tuple = ()           # definition names to expand
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class ObviousProof:
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class OmittedProof:
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class StepsProof:
    steps: tuple = ()
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class AssertStep:
    """Plain assertion, or have-style ASSUME .. PROVE .. when assumes
    is nonempty."""
    label: str
    assumes: tuple             # NewItem | Expr
    goal: object               # Expr
    proof: object
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class SufficesStep:
    label: str
    assumes: tuple
    goal: object
    proof: object
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class CaseStep:
    label: str
    expr: object
    proof: object
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class PickStep:
    label: str
    hint: str                  # surface name of the picked constant
    domain: object
    predicate: object          # Expr with BoundRef(0) for the pick
    proof: object
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class QedStep:
    label: str
    proof: object
    span: object = field(default=None, compare=False)


@dataclass(frozen=True)
class Theorem:
    name: str                  # "" when anonymous
    goal: object
    proof: object              # proof node or None
    span: object = field(default=None, compare=False)


@dataclass
class Module:
    name: str
    variables: tuple = ()
    constants: tuple = ()
    defs: tuple = ()           # T.Definition in source order
    theorems: tuple = ()
    pluscal_src: str = None    # raw --algorithm block, None if absent

    def def_map(self):
        return {d.name: d for d in self.defs}


_LEAF_PROOF_STARTS = ("BY", "OBVIOUS", "OMITTED", "PROOF")


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0
        self.binders = []      # innermost last
        self.guards = []       # (line, col) of active bullet items

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead=0):
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, *kinds):
        return self.peek().kind in kinds

    def expect(self, kind, what=""):
        t = self.peek()
        if t.kind != kind:
            want = what or kind
            raise PSyntaxError(f"expected {want}, found {t.text or t.kind!r}",
                               t.line, t.col)
        return self.next()

    def blocked(self):
        """True when the next token ends the current bullet item."""
        if not self.guards:
            return False
        t = self.peek()
        if t.kind == "EOF":
            return True
        gl, gc = self.guards[-1]
        return t.line > gl and t.col <= gc

    # -- expressions -------------------------------------------------------

    def parse_expr(self):
        if self.at("AND", "OR") and not self.blocked():
            return self.bullet_list()
        return self.implies_expr()

    def bullet_list(self):
        tok0 = self.peek()
        kind = tok0.kind
        col0 = tok0.col
        items = []
        while self.at(kind) and self.peek().col == col0:
            btok = self.next()
            self.guards.append((btok.line, col0))
            try:
                items.append(self.parse_expr())
            finally:
                self.guards.pop()
        if len(items) == 1:
            return items[0]
        node = T.And if kind == "AND" else T.Or
        return node(tuple(items), span=tok0.span)

    def implies_expr(self):
        lhs = self.or_expr()
        if self.at("IMPLIES") and not self.blocked():
            tok = self.next()
            rhs = self.parse_expr()   # right-assoc, bullets allowed on rhs
            return T.Implies(lhs, rhs, span=tok.span)
        return lhs

    def or_expr(self):
        first = self.and_expr()
        items = [first]
        while self.at("OR") and not self.blocked():
            self.next()
            items.append(self.and_expr())
        if len(items) == 1:
            return first
        return T.Or(tuple(items), span=items[0].span)

    def and_expr(self):
        first = self.cmp_expr()
        items = [first]
        while self.at("AND") and not self.blocked():
            self.next()
            items.append(self.cmp_expr())
        if len(items) == 1:
            return first
        return T.And(tuple(items), span=items[0].span)

    def cmp_expr(self):
        lhs = self.sum_expr()
        if self.blocked():
            return lhs
        k = self.peek().kind
        if k == "EQ":
            tok = self.next()
            return T.Eq(lhs, self.sum_expr(), span=tok.span)
        if k == "NEQ":
            tok = self.next()
            return T.Not(T.Eq(lhs, self.sum_expr(), span=tok.span),
                         sugar="#", span=tok.span)
        if k == "IN":
            tok = self.next()
            return T.In(lhs, self.sum_expr(), span=tok.span)
        if k == "NOTIN":
            tok = self.next()
            return T.Not(T.In(lhs, self.sum_expr(), span=tok.span),
                         sugar="notin", span=tok.span)
        return lhs

    def sum_expr(self):
        lhs = self.mul_expr()
        while self.at("PLUS", "MINUS") and not self.blocked():
            tok = self.next()
            op = "+" if tok.kind == "PLUS" else "-"
            lhs = T.Arith(op, lhs, self.mul_expr(), span=tok.span)
        return lhs

    def mul_expr(self):
        lhs = self.unary_expr()
        while self.at("STAR") and not self.blocked():
            tok = self.next()
            lhs = T.Arith("*", lhs, self.unary_expr(), span=tok.span)
        return lhs

    def unary_expr(self):
        t = self.peek()
        if t.kind == "TILDE":
            self.next()
            return T.Not(self.unary_expr(), span=t.span)
        if t.kind == "BOX":
            self.next()
            return T.Always(self.unary_expr(), span=t.span)
        return self.postfix_expr()

    def postfix_expr(self):
        e = self.atom()
        while not self.blocked():
            t = self.peek()
            if t.kind == "PRIME":
                self.next()
                e = T.Prime(e, span=t.span)
            elif t.kind == "LBRACK":
                self.next()
                idx = self.parse_expr()
                self.expect("RBRACK")
                e = T.FnApp(e, idx, span=t.span)
            else:
                break
        return e

    def lookup(self, name):
        for depth, hint in enumerate(reversed(self.binders)):
            if hint == name:
                return depth
        return None

    def atom(self):
        t = self.peek()
        if self.blocked():
            raise PSyntaxError("expression expected", t.line, t.col)
        k = t.kind
        if k == "NUMBER":
            self.next()
            return T.IntLit(int(t.text), span=t.span)
        if k == "STRING":
            self.next()
            return T.StrLit(t.text, span=t.span)
        if k == "TRUE":
            self.next()
            return T.BoolLit(True, span=t.span)
        if k == "FALSE":
            self.next()
            return T.BoolLit(False, span=t.span)
        if k == "BOOLEAN":
            self.next()
            return T.BooleanSet(span=t.span)
        if k == "IDENT":
            self.next()
            depth = self.lookup(t.text)
            if depth is not None:
                return T.BoundRef(depth, t.text, span=t.span)
            if self.at("LPAREN"):
                self.next()
                args = [self.parse_expr()]
                while self.at("COMMA"):
                    self.next()
                    args.append(self.parse_expr())
                self.expect("RPAREN")
                return T.Apply(t.text, tuple(args), span=t.span)
            if self.at("BANG"):
                self.next()
                self.expect("LPAREN")
                arg = self.parse_expr()
                self.expect("RPAREN")
                return T.Bang(t.text, arg, span=t.span)
            return T.Name(t.text, span=t.span)
        if k == "LPAREN":
            self.next()
            e = self.parse_expr()
            self.expect("RPAREN")
            return e
        if k == "LBRACE":
            self.next()
            items = []
            if not self.at("RBRACE"):
                items.append(self.parse_expr())
                while self.at("COMMA"):
                    self.next()
                    items.append(self.parse_expr())
            self.expect("RBRACE")
            return T.SetEnum(tuple(items), span=t.span)
        if k == "LANGLE":
            self.next()
            items = []
            if not self.at("RANGLE"):
                items.append(self.parse_expr())
                while self.at("COMMA"):
                    self.next()
                    items.append(self.parse_expr())
            self.expect("RANGLE")
            return T.Tup(tuple(items), span=t.span)
        if k == "LBRACK":
            return self.bracket_form()
        if k == "IF":
            self.next()
            cond = self.parse_expr()
            self.expect("THEN")
            then = self.parse_expr()
            self.expect("ELSE")
            orelse = self.parse_expr()
            return T.If(cond, then, orelse, span=t.span)
        if k in ("FORALL", "EXISTS"):
            self.next()
            hint = self.expect("IDENT", "bound variable").text
            self.expect("IN", "\\in")
            dom = self.parse_expr()
            self.expect("COLON")
            self.binders.append(hint)
            try:
                body = self.parse_expr()
            finally:
                self.binders.pop()
            node = T.Forall if k == "FORALL" else T.Exists
            return node(hint, dom, body, span=t.span)
        if k == "UNCHANGED":
            self.next()
            if self.at("LANGLE"):
                arg = self.atom()
            elif self.at("LPAREN"):
                self.next()
                arg = self.parse_expr()
                self.expect("RPAREN")
            else:
                nt = self.expect("IDENT", "variable name after UNCHANGED")
                depth = self.lookup(nt.text)
                arg = (T.BoundRef(depth, nt.text, span=nt.span)
                       if depth is not None else T.Name(nt.text, span=nt.span))
            return T.Unchanged(arg, span=t.span)
        raise PSyntaxError(f"expression expected, found {t.text or k!r}",
                           t.line, t.col)

    def bracket_form(self):
        t = self.expect("LBRACK")
        # function literal [x \in S |-> e] needs a lookahead: "x \in S"
        # is itself a valid expression, so try the literal shape first and
        # fall back on the general parse.
        if self.at("IDENT") and self.peek(1).kind == "IN":
            save = self.pos
            hint = self.next().text
            self.next()   # IN
            dom = self.parse_expr()
            if self.at("MAPSTO"):
                self.next()
                self.binders.append(hint)
                try:
                    body = self.parse_expr()
                finally:
                    self.binders.pop()
                self.expect("RBRACK")
                return T.FnLit(hint, dom, body, span=t.span)
            self.pos = save
        e = self.parse_expr()
        k = self.peek().kind
        if k == "ARROW":
            self.next()
            cod = self.parse_expr()
            self.expect("RBRACK")
            return T.FnSet(e, cod, span=t.span)
        if k == "EXCEPT":
            self.next()
            self.expect("BANG")
            self.expect("LBRACK")
            key = self.parse_expr()
            self.expect("RBRACK")
            self.expect("EQ")
            value = self.parse_expr()
            self.expect("RBRACK")
            return T.Except(e, key, value, span=t.span)
        if k == "RBRACK_US":
            self.next()
            if self.at("LANGLE"):
                sub = self.atom()
            else:
                nt = self.expect("IDENT", "subscript after ]_")
                sub = T.Name(nt.text, span=nt.span)
            return T.BoxAction(e, sub, span=t.span)
        tok = self.peek()
        raise PSyntaxError("expected |->, ->, EXCEPT, or ]_ in [ form",
                           tok.line, tok.col)

    # -- proofs ------------------------------------------------------------

    def parse_proof(self):
        t = self.peek()
        if t.kind == "PROOF":
            self.next()
            return self.parse_proof()
        if t.kind == "BY":
            self.next()
            facts = []
            if not self.at("DEF", "DEFS"):
                facts.append(self.parse_fact())
                while self.at("COMMA"):
                    self.next()
                    facts.append(self.parse_fact())
            names = []
            if self.at("DEF", "DEFS"):
                self.next()
                names.append(self.expect("IDENT", "definition name").text)
                while self.at("COMMA"):
                    self.next()
                    names.append(self.expect("IDENT", "definition name").text)
            return ByProof(tuple(facts), tuple(names), span=t.span)
        if t.kind == "OBVIOUS":
            self.next()
            return ObviousProof(span=t.span)
        if t.kind == "OMITTED":
            self.next()
            return OmittedProof(span=t.span)
        if t.kind == "STEP":
            return self.parse_steps()
        raise PSyntaxError("proof expected", t.line, t.col)

    def parse_fact(self):
        t = self.peek()
        if t.kind == "STEP":
            self.next()
            return StepRef(f"<{t.level}>{t.name}")
        return self.parse_expr()

    def parse_steps(self):
        first = self.peek()
        level = first.level
        steps = []
        labels = set()
        while self.at("STEP") and self.peek().level == level:
            step = self.parse_step(level)
            if step.label in labels:
                line, col = step.span or (None, None)
                raise DuplicateName(f"duplicate step label {step.label}",
                                    line, col)
            labels.add(step.label)
            steps.append(step)
        if not steps or not isinstance(steps[-1], QedStep):
            raise MissingQED(
                f"step list at level {level} does not end with QED",
                first.line, first.col)
        return StepsProof(tuple(steps), span=first.span)

    def parse_step(self, level):
        stok = self.expect("STEP")
        label = f"<{stok.level}>{stok.name}"
        t = self.peek()
        if t.kind == "QED":
            self.next()
            return QedStep(label, self.step_proof(level), span=stok.span)
        if t.kind == "SUFFICES":
            self.next()
            if self.at("ASSUME"):
                assumes, goal = self.parse_assume_prove()
            else:
                assumes, goal = (), self.parse_expr()
            return SufficesStep(label, assumes, goal,
                                self.step_proof(level), span=stok.span)
        if t.kind == "CASE":
            self.next()
            expr = self.parse_expr()
            return CaseStep(label, expr, self.step_proof(level),
                            span=stok.span)
        if t.kind == "PICK":
            self.next()
            hint = self.expect("IDENT", "picked variable").text
            self.expect("IN", "\\in")
            dom = self.parse_expr()
            self.expect("COLON")
            self.binders.append(hint)
            try:
                pred = self.parse_expr()
            finally:
                self.binders.pop()
            return PickStep(label, hint, dom, pred, self.step_proof(level),
                            span=stok.span)
        if t.kind == "ASSUME":
            assumes, goal = self.parse_assume_prove()
            return AssertStep(label, assumes, goal, self.step_proof(level),
                              span=stok.span)
        goal = self.parse_expr()
        return AssertStep(label, (), goal, self.step_proof(level),
                          span=stok.span)

    def parse_assume_prove(self):
        self.expect("ASSUME")
        items = [self.parse_assume_item()]
        while self.at("COMMA"):
            self.next()
            items.append(self.parse_assume_item())
        self.expect("PROVE")
        goal = self.parse_expr()
        return tuple(items), goal

    def parse_assume_item(self):
        t = self.peek()
        if t.kind == "NEW":
            self.next()
            kind = "CONSTANT"
            if self.at("CONSTANT", "VARIABLE"):
                kind = self.next().kind
            name = self.expect("IDENT", "name after NEW").text
            dom = None
            if self.at("IN"):
                self.next()
                dom = self.sum_expr()
            return NewItem(kind, name, dom, span=t.span)
        return self.parse_expr()

    def step_proof(self, level):
        t = self.peek()
        if t.kind in _LEAF_PROOF_STARTS:
            return self.parse_proof()
        if t.kind == "STEP" and t.level > level:
            return self.parse_steps()
        raise PSyntaxError(
            "every step needs a proof (BY, OBVIOUS, OMITTED, or substeps)",
            t.line, t.col)

    # -- module ------------------------------------------------------------

    def parse_module(self):
        self.expect("DASHES", "---- at module start")
        self.expect("MODULE")
        name = self.expect("IDENT", "module name").text
        self.expect("DASHES", "---- after module name")
        variables = []
        constants = []
        defs = []
        theorems = []
        seen = set()
        while not self.at("EQLINE"):
            t = self.peek()
            if t.kind in ("VARIABLE", "VARIABLES"):
                self.next()
                while True:
                    v = self.expect("IDENT", "variable name")
                    if v.text in seen:
                        raise DuplicateName(
                            f"duplicate declaration of {v.text}",
                            v.line, v.col)
                    seen.add(v.text)
                    variables.append(v.text)
                    if self.at("COMMA"):
                        self.next()
                    else:
                        break
            elif t.kind in ("CONSTANT", "CONSTANTS"):
                self.next()
                while True:
                    c = self.expect("IDENT", "constant name")
                    if c.text in seen:
                        raise DuplicateName(
                            f"duplicate declaration of {c.text}",
                            c.line, c.col)
                    seen.add(c.text)
                    constants.append(c.text)
                    if self.at("COMMA"):
                        self.next()
                    else:
                        break
            elif t.kind == "THEOREM":
                self.next()
                tname = ""
                if self.at("IDENT") and self.peek(1).kind == "DEFEQ":
                    tname = self.next().text
                    self.next()
                goal = self.parse_expr()
                proof = None
                if self.at("STEP", *_LEAF_PROOF_STARTS):
                    proof = self.parse_proof()
                theorems.append(Theorem(tname, goal, proof, span=t.span))
            elif t.kind == "IDENT":
                self.next()
                params = []
                if self.at("LPAREN"):
                    self.next()
                    params.append(self.expect("IDENT", "parameter").text)
                    while self.at("COMMA"):
                        self.next()
                        params.append(self.expect("IDENT", "parameter").text)
                    self.expect("RPAREN")
                self.expect("DEFEQ", "== in definition")
                body = self.parse_expr()
                if t.text in seen:
                    raise DuplicateName(f"duplicate definition of {t.text}",
                                        t.line, t.col)
                seen.add(t.text)
                defs.append(T.Definition(t.text, tuple(params), body,
                                         span=t.span))
            else:
                raise PSyntaxError(
                    f"unexpected {t.text or t.kind!r} at module level",
                    t.line, t.col)
        return Module(name, tuple(variables), tuple(constants),
                      tuple(defs), tuple(theorems))


# ---------------------------------------------------------------------------
# name resolution / well-formedness


class _Resolver:
    def __init__(self, module):
        self.module = module
        self.def_pos = {d.name: i for i, d in enumerate(module.defs)}

    def run(self):
        m = self.module
        scope = set(m.variables) | set(m.constants)
        for i, d in enumerate(m.defs):
            self.check_expr(d.body, scope | set(d.params), i)
            scope.add(d.name)
        for th in m.theorems:
            self.check_expr(th.goal, scope, None)
            if th.proof is not None:
                self.check_proof(th.proof, set(scope), {})
            if th.name:
                scope.add(th.name)

    def unknown(self, name, pos, span):
        line, col = span if isinstance(span, tuple) else (None, None)
        later = self.def_pos.get(name)
        if later is not None and pos is not None and later >= pos:
            raise OrderError(f"{name} is used before its definition",
                             line, col)
        raise ScopeError(f"unknown name {name}", line, col)

    def check_expr(self, e, scope, pos):
        if isinstance(e, T.Name):
            if e.name not in scope:
                self.unknown(e.name, pos, e.span)
            return
        if isinstance(e, (T.Apply, T.Bang)):
            if e.op not in scope:
                self.unknown(e.op, pos, e.span)
        for c in T.children(e):
            self.check_expr(c, scope, pos)

    def check_def_list(self, names, scope, span):
        for n in names:
            if n not in scope:
                self.unknown(n, None, span)

    def check_by(self, by, scope, visible):
        for f in by.facts:
            if isinstance(f, StepRef):
                if f.label not in visible:
                    line, col = (by.span or (None, None))
                    raise DanglingStepReference(
                        f"reference to unknown step {f.label}", line, col)
            else:
                self.check_expr(f, scope, None)
        self.check_def_list(by.defs, scope, by.span)

    def check_proof(self, proof, scope, visible):
        if isinstance(proof, ByProof):
            self.check_by(proof, scope, visible)
            return
        if isinstance(proof, (ObviousProof, OmittedProof)):
            return
        if isinstance(proof, StepsProof):
            scope = set(scope)
            visible = dict(visible)
            for step in proof.steps:
                self.check_step(step, scope, visible)
            return
        raise TypeError(f"not a proof node: {proof!r}")

    def check_step(self, step, scope, visible):
        # scope and visible are mutated: later siblings see this step.
        if isinstance(step, QedStep):
            self.check_proof(step.proof, set(scope), dict(visible))
            return
        if isinstance(step, CaseStep):
            self.check_expr(step.expr, scope, None)
            visible[step.label] = step
            self.check_proof(step.proof, set(scope), dict(visible))
            return
        if isinstance(step, PickStep):
            self.check_expr(step.domain, scope, None)
            self.check_expr(step.predicate, scope, None)
            visible[step.label] = step
            self.check_proof(step.proof, set(scope), dict(visible))
            scope.add(step.hint)
            return
        if isinstance(step, SufficesStep):
            inner = set(scope)
            for item in step.assumes:
                if isinstance(item, NewItem):
                    if item.domain is not None:
                        self.check_expr(item.domain, inner, None)
                    inner.add(item.name)
                else:
                    self.check_expr(item, inner, None)
            self.check_expr(step.goal, inner, None)
            visible[step.label] = step
            self.check_proof(step.proof, set(inner), dict(visible))
            scope.update(inner - scope)
            return
        if isinstance(step, AssertStep):
            # NEW names scope over the goal and the step's own proof only.
            inner = set(scope)
            for item in step.assumes:
                if isinstance(item, NewItem):
                    if item.domain is not None:
                        self.check_expr(item.domain, inner, None)
                    inner.add(item.name)
                else:
                    self.check_expr(item, inner, None)
            self.check_expr(step.goal, inner, None)
            visible[step.label] = step
            self.check_proof(step.proof, set(inner), dict(visible))
            return
        raise TypeError(f"not a step node: {step!r}")


_ALG_MARK = "--algorithm"


def extract_pluscal(text):
    """Return the raw --algorithm .. block from a (* .. *) comment, or None."""
    at = text.find(_ALG_MARK)
    if at < 0:
        return None
    open_at = text.rfind("(*", 0, at)
    if open_at < 0:
        return None
    depth = 1
    i = open_at + 2
    n = len(text)
    while i < n and depth:
        if text.startswith("(*", i):
            depth += 1
            i += 2
        elif text.startswith("*)", i):
            depth -= 1
            i += 2
        else:
            i += 1
    if depth:
        raise PSyntaxError("unterminated (* comment around --algorithm")
    if i - 2 <= at:
        # the comment before the marker closed earlier; not a real block
        return None
    return text[at:i - 2]


def parse_module(text):
    mod = _Parser(tokenize(text)).parse_module()
    mod.pluscal_src = extract_pluscal(text)
    _Resolver(mod).run()
    return mod


def parse_expression(text):
    """Parse a single expression; names are not resolved."""
    p = _Parser(tokenize(text))
    e = p.parse_expr()
    t = p.peek()
    if t.kind != "EOF":
        raise PSyntaxError(f"trailing input {t.text or t.kind!r}",
                           t.line, t.col)
    return e
