"""Render terms, definitions, modules, and proofs back to source text.

Two layers: inline() is strictly single-line with precedence-driven
parentheses; block() may break /\\ and \\/ lists into aligned bullet
columns and IF into a THEN/ELSE ladder, which reparse to the same tree
thanks to the parser's column rule.  Reprinting normalizes whitespace
and the DEF/DEFS spellings but never changes the token structure.
"""
from __future__ import annotations

from . import terms as T
from .values import format_value
from .canonical import ValueNode

_IMPLIES, _OR, _AND, _CMP, _ADD, _MUL, _UNARY, _POSTFIX = range(1, 9)


def _wrap(s, need, prec):
    return f"({s})" if prec > need else s


def inline(e, prec=0):
    if isinstance(e, ValueNode):
        return format_value(e.value)
    if isinstance(e, T.BoolLit):
        return "TRUE" if e.value else "FALSE"
    if isinstance(e, T.IntLit):
        return str(e.value)
    if isinstance(e, T.StrLit):
        return f'"{e.value}"'
    if isinstance(e, T.BooleanSet):
        return "BOOLEAN"
    if isinstance(e, T.Name):
        return e.name
    if isinstance(e, T.BoundRef):
        return e.hint
    if isinstance(e, T.Apply):
        return f"{e.op}({', '.join(inline(a) for a in e.args)})"
    if isinstance(e, T.Bang):
        return f"{e.op}!({inline(e.arg)})"
    if isinstance(e, T.And):
        if len(e.items) == 1:
            return inline(e.items[0], prec)
        s = " /\\ ".join(inline(i, _AND + 1) for i in e.items)
        return _wrap(s, _AND, prec)
    if isinstance(e, T.Or):
        if len(e.items) == 1:
            return inline(e.items[0], prec)
        s = " \\/ ".join(inline(i, _OR + 1) for i in e.items)
        return _wrap(s, _OR, prec)
    if isinstance(e, T.Not):
        if e.sugar == "#" and isinstance(e.item, T.Eq):
            s = f"{inline(e.item.lhs, _ADD)} # {inline(e.item.rhs, _ADD)}"
            return _wrap(s, _CMP, prec)
        if e.sugar == "notin" and isinstance(e.item, T.In):
            s = (f"{inline(e.item.item, _ADD)} \\notin "
                 f"{inline(e.item.domain, _ADD)}")
            return _wrap(s, _CMP, prec)
        return _wrap(f"~{inline(e.item, _UNARY)}", _UNARY, prec)
    if isinstance(e, T.Implies):
        s = f"{inline(e.lhs, _IMPLIES + 1)} => {inline(e.rhs, _IMPLIES)}"
        return _wrap(s, _IMPLIES, prec)
    if isinstance(e, T.Eq):
        s = f"{inline(e.lhs, _ADD)} = {inline(e.rhs, _ADD)}"
        return _wrap(s, _CMP, prec)
    if isinstance(e, T.In):
        s = f"{inline(e.item, _ADD)} \\in {inline(e.domain, _ADD)}"
        return _wrap(s, _CMP, prec)
    if isinstance(e, T.Arith):
        if e.op == "*":
            s = f"{inline(e.lhs, _MUL)} * {inline(e.rhs, _MUL + 1)}"
            return _wrap(s, _MUL, prec)
        s = f"{inline(e.lhs, _ADD)} {e.op} {inline(e.rhs, _ADD + 1)}"
        return _wrap(s, _ADD, prec)
    if isinstance(e, T.If):
        s = (f"IF {inline(e.cond)} THEN {inline(e.then)} "
             f"ELSE {inline(e.orelse)}")
        return _wrap(s, _IMPLIES, prec)
    if isinstance(e, (T.Forall, T.Exists)):
        q = "\\A" if isinstance(e, T.Forall) else "\\E"
        s = f"{q} {e.hint} \\in {inline(e.domain)}: {inline(e.body)}"
        return _wrap(s, _IMPLIES, prec)
    if isinstance(e, T.FnLit):
        return f"[{e.hint} \\in {inline(e.domain)} |-> {inline(e.body)}]"
    if isinstance(e, T.FnSet):
        return f"[{inline(e.domain)} -> {inline(e.codomain)}]"
    if isinstance(e, T.FnApp):
        return f"{inline(e.fn, _POSTFIX)}[{inline(e.arg)}]"
    if isinstance(e, T.Except):
        return (f"[{inline(e.fn, _POSTFIX)} EXCEPT "
                f"![{inline(e.key)}] = {inline(e.value)}]")
    if isinstance(e, T.Tup):
        return f"<<{', '.join(inline(i) for i in e.items)}>>"
    if isinstance(e, T.SetEnum):
        return f"{{{', '.join(inline(i) for i in e.items)}}}"
    if isinstance(e, T.Prime):
        return f"{inline(e.item, _POSTFIX)}'"
    if isinstance(e, T.Unchanged):
        return _wrap(f"UNCHANGED {inline(e.item, _POSTFIX)}", _UNARY, prec)
    if isinstance(e, T.BoxAction):
        return f"[{inline(e.action)}]_{inline(e.sub, _POSTFIX)}"
    if isinstance(e, T.Always):
        return _wrap(f"[]{inline(e.item, _UNARY)}", _UNARY, prec)
    raise TypeError(f"cannot print {e!r}")


def _pad(col):
    return " " * col


def block(e, col=0, prec=0):
    """Like inline() but multiline for /\\, \\/, IF, =>, and quantifiers.

    A multiline bullet list acts like the loosest construct regardless of
    /\\ and \\/ precedence, so anything tighter than => wraps it in
    parentheses; short expressions stay on one line.
    """
    s = inline(e, prec)
    if col + len(s) <= 78:
        return s
    if isinstance(e, (T.And, T.Or)) and len(e.items) >= 2:
        if prec > _IMPLIES:
            return f"({block(e, col + 1, 0)})"
        bullet = "/\\ " if isinstance(e, T.And) else "\\/ "
        sep = "\n" + _pad(col)
        return sep.join(bullet + block(i, col + 3) for i in e.items)
    if isinstance(e, T.If):
        s = (f"IF {inline(e.cond)}\n"
             f"{_pad(col + 2)}THEN {block(e.then, col + 7)}\n"
             f"{_pad(col + 2)}ELSE {block(e.orelse, col + 7)}")
        return f"({s})" if prec > _IMPLIES else s
    if isinstance(e, T.Implies):
        lhs = block(e.lhs, col, _IMPLIES + 1)
        if "\n" in lhs:
            return (f"{lhs}\n{_pad(col)}=> "
                    + block(e.rhs, col + 3, _IMPLIES))
        at = col + len(lhs) + 4
        return f"{lhs} => {block(e.rhs, at, _IMPLIES)}"
    if isinstance(e, (T.Forall, T.Exists)):
        q = "\\A" if isinstance(e, T.Forall) else "\\E"
        head = f"{q} {e.hint} \\in {inline(e.domain)}: "
        body = block(e.body, col + len(head))
        s = head + body
        return f"({s})" if prec > _IMPLIES else s
    return inline(e, prec)


def format_definition(d):
    params = f"({', '.join(d.params)})" if d.params else ""
    head = f"{d.name}{params} == "
    return head + block(d.body, len(head))


# --- proofs -----------------------------------------------------------------


def _fact_str(f):
    from .parser import StepRef
    if isinstance(f, StepRef):
        return f.label
    return inline(f)


def format_new_item(item, show_constant=False):
    kind = ""
    if item.kind == "VARIABLE":
        kind = "VARIABLE "
    elif show_constant:
        kind = "CONSTANT "
    dom = f" \\in {inline(item.domain)}" if item.domain is not None else ""
    return f"NEW {kind}{item.name}{dom}"


def _assume_str(item):
    from .parser import NewItem
    if isinstance(item, NewItem):
        return format_new_item(item)
    return inline(item)


def format_proof(p, col):
    from . import parser as P
    pad = _pad(col)
    if isinstance(p, P.ByProof):
        parts = ["BY"]
        if p.facts:
            parts.append(" " + ", ".join(_fact_str(f) for f in p.facts))
        if p.defs:
            parts.append(" DEF " + ", ".join(p.defs))
        return pad + "".join(parts)
    if isinstance(p, P.ObviousProof):
        return pad + "OBVIOUS"
    if isinstance(p, P.OmittedProof):
        return pad + "OMITTED"
    if isinstance(p, P.StepsProof):
        return "\n".join(format_step(s, col) for s in p.steps)
    raise TypeError(f"cannot print proof {p!r}")


def format_step(s, col):
    from . import parser as P
    pad = _pad(col)
    head = f"{s.label}. "
    at = col + len(head)
    if isinstance(s, P.QedStep):
        body = "QED"
    elif isinstance(s, P.CaseStep):
        body = f"CASE {inline(s.expr)}"
    elif isinstance(s, P.PickStep):
        body = (f"PICK {s.hint} \\in {inline(s.domain)}: "
                f"{inline(s.predicate)}")
    elif isinstance(s, P.SufficesStep):
        if s.assumes:
            items = ",\n".join(_pad(at + 15) + _assume_str(i)
                               for i in s.assumes).lstrip()
            body = (f"SUFFICES ASSUME {items}\n"
                    f"{_pad(at + 9)}PROVE {block(s.goal, at + 15)}")
        else:
            body = f"SUFFICES {block(s.goal, at + 9)}"
    elif isinstance(s, P.AssertStep):
        if s.assumes:
            items = ",\n".join(_pad(at + 7) + _assume_str(i)
                               for i in s.assumes).lstrip()
            body = (f"ASSUME {items}\n"
                    f"{_pad(at)}PROVE {block(s.goal, at + 6)}")
        else:
            body = block(s.goal, at)
    else:
        raise TypeError(f"cannot print step {s!r}")
    return pad + head + body + "\n" + format_proof(s.proof, col + 2)


def format_theorem(th):
    head = "THEOREM "
    if th.name:
        head += f"{th.name} == "
    out = head + block(th.goal, len(head))
    if th.proof is not None:
        out += "\n" + format_proof(th.proof, 0)
    return out


def format_module(m):
    lines = [f"---- MODULE {m.name} ----"]
    if m.constants:
        lines.append("CONSTANTS " + ", ".join(m.constants))
    if m.variables:
        lines.append("VARIABLES " + ", ".join(m.variables))
    for d in m.defs:
        lines.append("")
        lines.append(format_definition(d))
    for th in m.theorems:
        lines.append("")
        lines.append(format_theorem(th))
    lines.append("")
    lines.append("====")
    return "\n".join(lines) + "\n"
