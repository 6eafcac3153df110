"""Minimal S-expression reader and printer for SMT-LIB text.

Atoms are kept as their source text (``|quoted|`` symbols and ``"strings"``
included), lists become Python lists.
"""

from __future__ import annotations

from .errors import SExprSyntaxError

_DELIMS = set("()|\";") | set(" \t\r\n")


def tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
        elif c in "()":
            yield c
            i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SExprSyntaxError("unterminated quoted symbol")
            yield text[i : j + 1]
            i = j + 1
        elif c == '"':
            j = i + 1
            while True:
                j = text.find('"', j)
                if j < 0:
                    raise SExprSyntaxError("unterminated string literal")
                # SMT-LIB escapes a quote by doubling it
                if j + 1 < n and text[j + 1] == '"':
                    j += 2
                    continue
                break
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in _DELIMS:
                j += 1
            yield text[i:j]
            i = j


def parse_all(text: str) -> list:
    """Parse every top-level S-expression in `text`."""
    stack: list[list] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SExprSyntaxError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SExprSyntaxError("missing ')' at end of input")
    return stack[0]


def parse_one(text: str):
    exprs = parse_all(text)
    if len(exprs) != 1:
        raise SExprSyntaxError(f"expected one expression, found {len(exprs)}")
    return exprs[0]


def dumps(expr) -> str:
    """Single-line rendering; `parse_one(dumps(e)) == e` for any reader output."""
    if isinstance(expr, list):
        return "(" + " ".join(dumps(e) for e in expr) + ")"
    return str(expr)
