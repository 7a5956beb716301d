"""Algorithm-to-specification translator.

Parses the braced algorithm dialect that lives inside a (* ... *) comment
and compiles it to definitions over an explicit control variable pc: one
action definition per label, plus vars, Init, a per-process disjunction,
Next, and Spec.  An atomic action is everything from one label to the
next, so the subset enforces the labeling rules that keep that mapping
well defined.
"""
from dataclasses import dataclass, field
from typing import Optional

from . import terms as T
from .errors import (
    AssignmentAfterBranch,
    DuplicateName,
    MultipleAssignSameVar,
    PlusCalError,
    ScopeError,
    SyntaxError as PSyntaxError,
    UnknownGotoTarget,
    UnlabeledStatement,
)
from .lexer import tokenize
from .parser import _Parser

DONE = "Done"


# --- algorithm syntax tree ----------------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: str
    index: Optional[T.Expr]    # x[index] := value when not None
    value: T.Expr
    span: tuple = field(default=None, compare=False)


@dataclass(frozen=True)
class Skip:
    span: tuple = field(default=None, compare=False)


@dataclass(frozen=True)
class Goto:
    target: str
    span: tuple = field(default=None, compare=False)


@dataclass(frozen=True)
class IfGoto:
    cond: T.Expr
    then_target: str
    else_target: str
    span: tuple = field(default=None, compare=False)


@dataclass(frozen=True)
class While:
    cond: T.Expr
    body: tuple                # labeled segments
    span: tuple = field(default=None, compare=False)


@dataclass(frozen=True)
class Segment:
    """One label and the statements executed atomically under it."""
    label: str
    stmts: tuple               # simple statements, or a single While
    span: tuple = field(default=None, compare=False)


@dataclass(frozen=True)
class Algorithm:
    name: str
    variables: tuple           # (name, init expr) in declaration order
    process_name: str
    domain: T.Expr
    body: tuple                # labeled segments
    span: tuple = field(default=None, compare=False)


# --- parsing -------------------------------------------------------------------


class _AlgParser:
    """Statement-level parser; expressions are delegated to _Parser."""

    def __init__(self, toks):
        self.p = _Parser(toks)
        self.labels = {}       # label -> span, for duplicate checks

    # helpers over the shared token stream
    def peek(self, ahead=0):
        return self.p.peek(ahead)

    def next(self):
        return self.p.next()

    def at_word(self, *words, ahead=0):
        t = self.peek(ahead)
        return t.kind == "IDENT" and t.text in words

    def expect_word(self, word):
        t = self.peek()
        if not (t.kind == "IDENT" and t.text == word):
            raise PSyntaxError(f"expected {word}, found {t.text or t.kind!r}",
                               t.line, t.col)
        return self.next()

    def expect(self, kind, what=""):
        return self.p.expect(kind, what)

    def at_assign_op(self):
        c = self.peek()
        e = self.peek(1)
        return (c.kind == "COLON" and e.kind == "EQ"
                and e.line == c.line and e.col == c.col + 1)

    def expect_assign_op(self):
        if not self.at_assign_op():
            t = self.peek()
            raise PSyntaxError(f"expected :=, found {t.text or t.kind!r}",
                               t.line, t.col)
        self.next()
        self.next()

    def at_label(self):
        # IDENT ':' that is not the ':=' operator
        if self.peek().kind != "IDENT" or self.peek(1).kind != "COLON":
            return False
        c = self.peek(1)
        e = self.peek(2)
        return not (e.kind == "EQ" and e.line == c.line and e.col == c.col + 1)

    def stmt_semi(self):
        # terminators are plain ';'; optional right before a closing brace
        if self.p.at("SEMI"):
            self.next()
        elif not self.p.at("RBRACE"):
            t = self.peek()
            raise PSyntaxError(f"expected ;, found {t.text or t.kind!r}",
                               t.line, t.col)

    # -- grammar -------------------------------------------------------------

    def parse(self):
        t0 = self.expect_word("algorithm")
        name = self.expect("IDENT", "algorithm name").text
        self.expect("LBRACE")
        variables = []
        if self.at_word("variables", "variable"):
            self.next()
            while True:
                vt = self.expect("IDENT", "variable name")
                if any(vt.text == n for n, _ in variables):
                    raise DuplicateName(f"duplicate variable {vt.text}",
                                        vt.line, vt.col)
                self.expect("EQ", "= initial-value")
                variables.append((vt.text, self.p.parse_expr()))
                if self.p.at("COMMA"):
                    self.next()
                    continue
                break
            self.expect("SEMI")
        self.expect_word("process")
        self.expect("LPAREN")
        pname = self.expect("IDENT", "process name").text
        self.expect("IN")
        domain = self.p.parse_expr()
        self.expect("RPAREN")
        self.expect("LBRACE")
        body = self.segments()
        self.expect("RBRACE")
        self.expect("RBRACE")
        t = self.peek()
        if t.kind != "EOF":
            raise PSyntaxError(f"trailing input {t.text or t.kind!r}",
                               t.line, t.col)
        return Algorithm(name, tuple(variables), pname, domain, body,
                         span=t0.span)

    def segments(self):
        """Labeled statements up to the enclosing closing brace."""
        segs = []
        while not self.p.at("RBRACE", "EOF"):
            if not self.at_label():
                t = self.peek()
                raise UnlabeledStatement(
                    "statement must be labeled", t.line, t.col)
            lt = self.next()
            if lt.text == DONE:
                raise DuplicateName(f"the label {DONE} is reserved",
                                    lt.line, lt.col)
            if lt.text in self.labels:
                raise DuplicateName(f"duplicate label {lt.text}",
                                    lt.line, lt.col)
            self.labels[lt.text] = lt.span
            self.next()  # ':'
            segs.append(self.segment(lt))
        return tuple(segs)

    def segment(self, lt):
        if self.at_word("while"):
            self.next()
            self.expect("LPAREN")
            cond = self.p.parse_expr()
            self.expect("RPAREN")
            self.expect("LBRACE")
            body = self.segments()
            self.expect("RBRACE")
            if not body:
                raise PlusCalError("while body must contain a labeled "
                                   "statement", lt.line, lt.col)
            if self.p.at("SEMI"):
                self.next()
            w = While(cond, body, span=lt.span)
            return Segment(lt.text, (w,), span=lt.span)
        stmts = []
        branched = None
        while not (self.at_label() or self.p.at("RBRACE", "EOF")
                   or self.at_word("while")):
            s = self.simple_stmt()
            if branched is not None:
                if isinstance(s, Assign):
                    raise AssignmentAfterBranch(
                        "assignment after a control transfer must start a "
                        "new labeled statement", *s.span)
                raise UnlabeledStatement(
                    "statement after a control transfer must be labeled",
                    *s.span)
            if isinstance(s, (Goto, IfGoto)):
                branched = s
            stmts.append(s)
        if self.at_word("while"):
            t = self.peek()
            raise UnlabeledStatement("while must be labeled", t.line, t.col)
        return Segment(lt.text, tuple(stmts), span=lt.span)

    def simple_stmt(self):
        t = self.peek()
        if self.at_word("skip"):
            self.next()
            self.stmt_semi()
            return Skip(span=t.span)
        if self.at_word("goto"):
            self.next()
            target = self.expect("IDENT", "goto target").text
            self.stmt_semi()
            return Goto(target, span=t.span)
        if self.at_word("if"):
            self.next()
            self.expect("LPAREN")
            cond = self.p.parse_expr()
            self.expect("RPAREN")
            then_t = self.branch_goto()
            self.expect_word("else")
            else_t = self.branch_goto()
            if self.p.at("SEMI"):
                self.next()
            return IfGoto(cond, then_t, else_t, span=t.span)
        if t.kind == "IDENT":
            self.next()
            index = None
            if self.p.at("LBRACK"):
                self.next()
                index = self.p.parse_expr()
                self.expect("RBRACK")
            self.expect_assign_op()
            value = self.p.parse_expr()
            self.stmt_semi()
            return Assign(t.text, index, value, span=t.span)
        raise PSyntaxError(f"expected a statement, found "
                           f"{t.text or t.kind!r}", t.line, t.col)

    def branch_goto(self):
        """An if branch holds exactly one goto in this dialect."""
        self.expect("LBRACE")
        g = self.peek()
        if not self.at_word("goto"):
            raise PlusCalError("an if branch must be a single goto",
                               g.line, g.col)
        self.next()
        target = self.expect("IDENT", "goto target").text
        if self.p.at("SEMI"):
            self.next()
        self.expect("RBRACE")
        return target


def parse_algorithm(src, line=1, col=1):
    """Parse the raw block starting at its -- marker.

    line and col locate the marker inside the enclosing file so that
    reported positions stay file-accurate.
    """
    if src.startswith("--"):
        src = "  " + src[2:]
    pad = "\n" * (line - 1) + " " * (col - 1)
    alg = _AlgParser(tokenize(pad + src)).parse()
    _check(alg)
    return alg


def locate_algorithm(text):
    """(block, line, col) of the --algorithm comment in module text."""
    from .parser import extract_pluscal
    src = extract_pluscal(text)
    if src is None:
        return None, 0, 0
    at = text.find("--algorithm")
    line = text.count("\n", 0, at) + 1
    col = at - text.rfind("\n", 0, at)
    return src, line, col


# --- static checks -------------------------------------------------------------


def _walk_segments(body):
    for seg in body:
        yield seg
        if seg.stmts and isinstance(seg.stmts[0], While):
            yield from _walk_segments(seg.stmts[0].body)


def _check(alg):
    labels = set()
    for seg in _walk_segments(alg.body):
        labels.add(seg.label)
    declared = {n for n, _ in alg.variables}
    for seg in _walk_segments(alg.body):
        assigned = set()
        for s in seg.stmts:
            if isinstance(s, Goto):
                _check_target(s.target, labels, s.span)
            elif isinstance(s, IfGoto):
                _check_target(s.then_target, labels, s.span)
                _check_target(s.else_target, labels, s.span)
            elif isinstance(s, Assign):
                if s.target not in declared:
                    raise ScopeError(f"assignment to undeclared variable "
                                     f"{s.target}", *s.span)
                if s.target in assigned:
                    raise MultipleAssignSameVar(
                        f"{s.target} is assigned twice in one step", *s.span)
                assigned.add(s.target)
            elif isinstance(s, While):
                pass


def _check_target(target, labels, span):
    if target != DONE and target not in labels:
        raise UnknownGotoTarget(f"goto target {target} is not a label",
                                *span)


# --- translation ----------------------------------------------------------------


def _pc_to(label):
    return T.Eq(T.Prime(T.Name("pc")),
                T.Except(T.Name("pc"), T.Name("self"), T.StrLit(label)))


def _action(alg, label, assigns, pc_part):
    conj = [T.Eq(T.FnApp(T.Name("pc"), T.Name("self")), T.StrLit(label))]
    assigned = {"pc"}
    for s in assigns:
        assigned.add(s.target)
        if s.index is None:
            conj.append(T.Eq(T.Prime(T.Name(s.target)), s.value))
        else:
            conj.append(T.Eq(T.Prime(T.Name(s.target)),
                             T.Except(T.Name(s.target), s.index, s.value)))
    conj.append(pc_part)
    rest = [n for n, _ in alg.variables if n not in assigned]
    if len(rest) == 1:
        conj.append(T.Eq(T.Prime(T.Name(rest[0])), T.Name(rest[0])))
    elif rest:
        conj.append(T.Unchanged(T.Tup(tuple(T.Name(n) for n in rest))))
    return T.Definition(label, ("self",), T.And(tuple(conj)))


def _translate_body(alg, body, exit_label, out):
    """Emit one action per segment; fall-through of the last goes to
    exit_label (the loop header for a while body, Done at the top)."""
    for i, seg in enumerate(body):
        fall = body[i + 1].label if i + 1 < len(body) else exit_label
        if seg.stmts and isinstance(seg.stmts[0], While):
            w = seg.stmts[0]
            first = w.body[0].label
            if w.cond == T.BoolLit(True):
                pc_part = _pc_to(first)
            else:
                pc_part = T.If(w.cond, _pc_to(first), _pc_to(fall))
            out.append(_action(alg, seg.label, (), pc_part))
            _translate_body(alg, w.body, seg.label, out)
            continue
        assigns = [s for s in seg.stmts if isinstance(s, Assign)]
        last = seg.stmts[-1] if seg.stmts else None
        if isinstance(last, Goto):
            pc_part = _pc_to(last.target)
        elif isinstance(last, IfGoto):
            pc_part = T.If(last.cond, _pc_to(last.then_target),
                           _pc_to(last.else_target))
        else:
            pc_part = _pc_to(fall)
        out.append(_action(alg, seg.label, assigns, pc_part))


def translate(alg):
    """(variable names, definitions) for the spliced translation block."""
    variables = tuple(n for n, _ in alg.variables) + ("pc",)
    first = alg.body[0].label
    actions = []
    _translate_body(alg, alg.body, DONE, actions)

    vars_def = T.Definition(
        "vars", (), T.Tup(tuple(T.Name(n) for n in variables)))
    init_items = [T.Eq(T.Name(n), e) for n, e in alg.variables]
    init_items.append(T.Eq(T.Name("pc"),
                           T.FnLit("self", alg.domain, T.StrLit(first))))
    init_body = (T.And(tuple(init_items)) if len(init_items) > 1
                 else init_items[0])
    init_def = T.Definition("Init", (), init_body)

    calls = tuple(T.Apply(a.name, (T.Name("self"),)) for a in actions)
    proc_body = T.Or(calls) if len(calls) > 1 else calls[0]
    proc_def = T.Definition(alg.process_name, ("self",), proc_body)
    next_def = T.Definition(
        "Next", (), T.Exists("self", alg.domain,
                             T.Apply(alg.process_name,
                                     (T.BoundRef(0, "self"),))))
    spec_def = T.Definition(
        "Spec", (), T.And((T.Name("Init"),
                           T.Always(T.BoxAction(T.Name("Next"),
                                                T.Name("vars"))))))
    defs = [vars_def, init_def] + actions + [proc_def, next_def, spec_def]
    return variables, defs


def summary(alg, defs):
    n = sum(1 for _ in _walk_segments(alg.body))
    return f"translated: {n} actions, {len(defs)} definitions"


# --- textual splicing ------------------------------------------------------------

BEGIN_MARK = "\\* BEGIN TRANSLATION"
END_MARK = "\\* END TRANSLATION"


def render_block(variables, defs):
    from .printer import format_definition
    lines = ["VARIABLES " + ", ".join(variables)]
    for d in defs:
        lines.append("")
        lines.append(format_definition(d))
    return "\n".join(lines)


def splice(text, block):
    """Replace the text between the translation markers."""
    begin = text.find(BEGIN_MARK)
    end = text.find(END_MARK)
    if begin < 0 or end < 0 or end < begin:
        raise PlusCalError("module needs \\* BEGIN TRANSLATION and "
                           "\\* END TRANSLATION marker comments")
    head = text[:begin + len(BEGIN_MARK)]
    tail = text[end:]
    return f"{head}\n{block}\n{tail}"
