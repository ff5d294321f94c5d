"""S-expression reader/writer.

Every textual artifact in the package (formulas, sequents, theories,
structures, models, lattices, run reports) is written in one UTF-8
s-expression dialect: atoms are bare tokens, lists are parenthesized,
`;` starts a comment running to end of line. Atoms never need quoting
because all serialized names are token-safe (checked on write).
"""

from __future__ import annotations

_DELIMS = set("(); \t\r\n")


class SexpError(ValueError):
    pass


def tokenize(text):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, i
            i += 1
        else:
            j = i
            while j < n and text[j] not in _DELIMS:
                j += 1
            yield text[i:j], i
            i = j


def loads(text):
    """Parse one s-expression (atom -> str, list -> list)."""
    items = list(iter_loads(text))
    if not items:
        raise SexpError("empty input")
    if len(items) > 1:
        raise SexpError("trailing data after expression")
    return items[0]


def iter_loads(text):
    """Parse a sequence of toplevel s-expressions."""
    stack = []
    for tok, pos in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise SexpError("unbalanced ')' at %d" % pos)
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                yield done
        else:
            if stack:
                stack[-1].append(tok)
            else:
                yield tok
    if stack:
        raise SexpError("unbalanced '('")


def _check_atom(a):
    if not isinstance(a, str):
        raise SexpError("atom must be str, got %r" % (a,))
    if a == "" or any(ch in _DELIMS for ch in a):
        raise SexpError("atom %r not token-safe" % a)
    return a


def dumps(node):
    """Render an s-expression on one line."""
    if isinstance(node, (list, tuple)):
        return "(" + " ".join(dumps(x) for x in node) + ")"
    return _check_atom(node)


def dumps_pretty(node, indent=0, width=100):
    """Render with line breaks when a node does not fit in `width` columns."""
    flat = dumps(node)
    if len(flat) + indent <= width or not isinstance(node, (list, tuple)) or len(node) <= 1:
        return flat
    head = dumps(node[0]) if not isinstance(node[0], (list, tuple)) else dumps_pretty(node[0], indent + 1, width)
    pad = " " * (indent + 2)
    parts = [dumps_pretty(x, indent + 2, width) for x in node[1:]]
    return "(" + head + "\n" + "\n".join(pad + p for p in parts) + ")"
