"""Tokenizer for module files and proof text.

ASCII-only surface syntax.  Line and column (1-based) are kept on every
token; column layout matters to the parser only for /\\ and \\/ bullet
lists.  Comments: \\* to end of line, (* ... *) nested blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import SyntaxError as PSyntaxError

KEYWORDS = {
    "MODULE", "VARIABLE", "VARIABLES", "CONSTANT", "CONSTANTS",
    "THEOREM", "ASSUME", "PROVE", "SUFFICES", "CASE", "PICK", "QED",
    "BY", "DEF", "DEFS", "OBVIOUS", "OMITTED", "PROOF", "NEW",
    "TRUE", "FALSE", "BOOLEAN", "IF", "THEN", "ELSE",
    "EXCEPT", "UNCHANGED",
}

# token kinds that are their own spelling
_PUNCT = (
    "DEFEQ",      # ==
    "EQ",         # =
    "NEQ",        # #
    "TILDE",      # ~
    "AND",        # /\
    "OR",         # \/
    "IMPLIES",    # =>
    "LANGLE",     # <<
    "RANGLE",     # >>
    "LPAREN", "RPAREN", "LBRACE", "RBRACE", "LBRACK", "RBRACK",
    "RBRACK_US",  # ]_
    "BOX",        # []
    "COMMA", "COLON", "SEMI", "BANG", "PRIME",
    "MAPSTO",     # |->
    "ARROW",      # ->
    "IN",         # \in
    "NOTIN",      # \notin
    "FORALL",     # \A
    "EXISTS",     # \E
    "PLUS", "MINUS", "STAR",
    "DASHES",     # ---- (4 or more)
    "EQLINE",     # ==== (4 or more)
)


@dataclass(frozen=True)
class Token:
    kind: str           # punct kind, keyword, IDENT, NUMBER, STRING, STEP, EOF
    text: str
    line: int
    col: int
    # STEP extras: level and name parsed out of <n>name[.]
    level: int = 0
    name: str = ""

    @property
    def span(self):
        return (self.line, self.col)


def tokenize(text: str) -> list:
    toks = []
    i = 0
    n = len(text)
    line = 1
    linestart = 0

    def col(pos):
        return pos - linestart + 1

    def err(msg, pos):
        raise PSyntaxError(msg, line, col(pos))

    def push(kind, s, pos, **kw):
        toks.append(Token(kind, s, line, col(pos), **kw))

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            linestart = i
            continue
        if c in " \t\r":
            i += 1
            continue
        if c == "\\" and text.startswith("\\*", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("(*", i):
            depth = 1
            start = i
            i += 2
            while i < n and depth:
                if text.startswith("(*", i):
                    depth += 1
                    i += 2
                elif text.startswith("*)", i):
                    depth -= 1
                    i += 2
                elif text[i] == "\n":
                    line += 1
                    i += 1
                    linestart = i
                else:
                    i += 1
            if depth:
                err("unterminated (* comment", start)
            continue
        if c == "-":
            j = i
            while j < n and text[j] == "-":
                j += 1
            run = j - i
            if run >= 4:
                push("DASHES", text[i:j], i)
                i = j
                continue
            if text.startswith("->", i):
                push("ARROW", "->", i)
                i += 2
                continue
            push("MINUS", "-", i)
            i += 1
            continue
        if c == "=":
            j = i
            while j < n and text[j] == "=":
                j += 1
            run = j - i
            if run >= 4:
                push("EQLINE", text[i:j], i)
                i = j
                continue
            if run == 2:
                push("DEFEQ", "==", i)
                i = j
                continue
            if text.startswith("=>", i):
                push("IMPLIES", "=>", i)
                i += 2
                continue
            push("EQ", "=", i)
            i += 1
            continue
        if c == "<":
            if text.startswith("<<", i):
                push("LANGLE", "<<", i)
                i += 2
                continue
            # step label <n>name with optional trailing dot
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j > i + 1 and j < n and text[j] == ">":
                level = int(text[i + 1:j])
                k = j + 1
                while k < n and (text[k].isalnum() or text[k] == "_"):
                    k += 1
                name = text[j + 1:k]
                end = k
                if end < n and text[end] == ".":
                    end += 1
                push("STEP", text[i:end], i, level=level, name=name)
                i = end
                continue
            err("unexpected '<'", i)
        if c == ">":
            if text.startswith(">>", i):
                push("RANGLE", ">>", i)
                i += 2
                continue
            err("unexpected '>'", i)
        if c == "\\":
            for spell, kind in (("\\in", "IN"), ("\\notin", "NOTIN"),
                                ("\\A", "FORALL"), ("\\E", "EXISTS"),
                                ("\\/", "OR")):
                if text.startswith(spell, i):
                    nxt = i + len(spell)
                    # \in must not swallow the prefix of \inOther-style names
                    if spell in ("\\in", "\\notin") and nxt < n \
                            and (text[nxt].isalnum() or text[nxt] == "_"):
                        continue
                    push(kind, spell, i)
                    i = nxt
                    break
            else:
                err("unknown backslash sequence", i)
            continue
        if c == "/":
            if text.startswith("/\\", i):
                push("AND", "/\\", i)
                i += 2
                continue
            err("unexpected '/'", i)
        if c == "|":
            if text.startswith("|->", i):
                push("MAPSTO", "|->", i)
                i += 3
                continue
            err("unexpected '|'", i)
        if c == "]":
            if text.startswith("]_", i):
                push("RBRACK_US", "]_", i)
                i += 2
                continue
            push("RBRACK", "]", i)
            i += 1
            continue
        if c == "[":
            if text.startswith("[]", i) and not text.startswith("[]_", i):
                push("BOX", "[]", i)
                i += 2
                continue
            push("LBRACK", "[", i)
            i += 1
            continue
        simple = {"(": "LPAREN", ")": "RPAREN", "{": "LBRACE", "}": "RBRACE",
                  ",": "COMMA", ":": "COLON", ";": "SEMI", "!": "BANG",
                  "'": "PRIME", "~": "TILDE", "#": "NEQ", "+": "PLUS",
                  "*": "STAR"}
        if c in simple:
            push(simple[c], c, i)
            i += 1
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                err("unterminated string", i)
            push("STRING", text[i + 1:j], i)
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            push("NUMBER", text[i:j], i)
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            push(word if word in KEYWORDS else "IDENT", word, i)
            i = j
            continue
        err(f"unexpected character {c!r}", i)
    toks.append(Token("EOF", "", line, col(i)))
    return toks
