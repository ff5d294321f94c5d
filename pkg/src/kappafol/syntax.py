"""Many-sorted formulas, sequents and theories, with one textual form.

Conventions fixed here and relied on everywhere else:

- the empty conjunction is truth, the empty disjunction is falsity;
- bound variables are renamed on construction to reserved names
  ``?<level>_<i>`` (level = binder nesting height counted from the
  inside), so alpha-equivalence is plain structural equality;
- contexts are ordered tuples of variables; the canonical context of a
  formula lists its free variables sorted by name;
- quantifier blocks are nonempty tuples of distinct variables.

Reserved names never collide with user input: the parser rejects free
variables starting with ``?``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import sexp


class ParseError(ValueError):
    pass


class SortError(ValueError):
    pass


class FragmentError(ValueError):
    pass


RESERVED_PREFIX = "?"

FRAGMENTS = ("regular", "coherent", "geometric-bounded", "first-order", "first-order+EM")


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __repr__(self):
        return "%s:%s" % (self.name, self.sort)


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple
    sort: str

    def __repr__(self):
        return print_term(self)


def term_vars(t, acc=None):
    """Free variables of a term, in first-occurrence order (name -> Var)."""
    if acc is None:
        acc = {}
    if isinstance(t, Var):
        acc.setdefault(t.name, t)
    else:
        for a in t.args:
            term_vars(a, acc)
    return acc


def subst_term(t, sub):
    if isinstance(t, Var):
        return sub.get(t.name, t)
    return App(t.fn, tuple(subst_term(a, sub) for a in t.args), t.sort)


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple = ()

    def __repr__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Eq:
    lhs: object
    rhs: object

    def __repr__(self):
        return print_formula(self)


@dataclass(frozen=True)
class And:
    parts: tuple

    def __repr__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __repr__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Imp:
    lhs: object
    rhs: object

    def __repr__(self):
        return print_formula(self)


def _normalize_block(block, body):
    block = tuple(block)
    if not block:
        raise ValueError("empty quantifier block")
    names = [v.name for v in block]
    if len(set(names)) != len(names):
        raise ValueError("repeated variable in quantifier block: %s" % names)
    level = binder_level(body) + 1
    fresh = tuple(Var("%s%d_%d" % (RESERVED_PREFIX, level, i), v.sort) for i, v in enumerate(block))
    if fresh == block:
        return block, body
    ren = {old.name: new for old, new in zip(block, fresh)}
    return fresh, _subst(body, ren)


@dataclass(frozen=True)
class Exists:
    block: tuple
    body: object

    def __post_init__(self):
        block, body = _normalize_block(self.block, self.body)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "body", body)

    def __repr__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Forall:
    block: tuple
    body: object

    def __post_init__(self):
        block, body = _normalize_block(self.block, self.body)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "body", body)

    def __repr__(self):
        return print_formula(self)


TRUE = And(())
FALSE = Or(())


def Not(phi):
    return Imp(phi, FALSE)


@lru_cache(maxsize=None)
def binder_level(phi):
    """Height of quantifier nesting (0 for quantifier-free)."""
    if isinstance(phi, (Rel, Eq)):
        return 0
    if isinstance(phi, (And, Or)):
        return max((binder_level(p) for p in phi.parts), default=0)
    if isinstance(phi, Imp):
        return max(binder_level(phi.lhs), binder_level(phi.rhs))
    return binder_level(phi.body) + 1


def _subst(phi, sub):
    if not sub:
        return phi
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(subst_term(t, sub) for t in phi.args))
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.lhs, sub), subst_term(phi.rhs, sub))
    if isinstance(phi, And):
        return And(tuple(_subst(p, sub) for p in phi.parts))
    if isinstance(phi, Or):
        return Or(tuple(_subst(p, sub) for p in phi.parts))
    if isinstance(phi, Imp):
        return Imp(_subst(phi.lhs, sub), _subst(phi.rhs, sub))
    if isinstance(phi, (Exists, Forall)):
        inner = {k: v for k, v in sub.items() if k not in {v2.name for v2 in phi.block}}
        return type(phi)(phi.block, _subst(phi.body, inner))
    raise TypeError("not a formula: %r" % (phi,))


def substitute(phi, sub):
    """Capture-avoiding substitution of terms for free variables.

    `sub` maps variable names to terms. Capture cannot occur because
    bound variables live in the reserved ``?`` namespace.
    """
    sub = {k: v for k, v in sub.items()}
    return _subst(phi, sub)


def free_vars(phi, acc=None):
    """Free variables in first-occurrence order (name -> Var)."""
    if acc is None:
        acc = {}
    if isinstance(phi, Rel):
        for t in phi.args:
            term_vars(t, acc)
    elif isinstance(phi, Eq):
        term_vars(phi.lhs, acc)
        term_vars(phi.rhs, acc)
    elif isinstance(phi, (And, Or)):
        for p in phi.parts:
            free_vars(p, acc)
    elif isinstance(phi, Imp):
        free_vars(phi.lhs, acc)
        free_vars(phi.rhs, acc)
    elif isinstance(phi, (Exists, Forall)):
        inner = free_vars(phi.body, {})
        for v in phi.block:
            inner.pop(v.name, None)
        for name, v in inner.items():
            acc.setdefault(name, v)
    else:
        raise TypeError("not a formula: %r" % (phi,))
    return acc


def canonical_context(phi, base=()):
    """`base` extended with the remaining free variables sorted by name."""
    fv = free_vars(phi)
    have = {v.name for v in base}
    extra = sorted((v for n, v in fv.items() if n not in have), key=lambda v: v.name)
    return tuple(base) + tuple(extra)


def mk_and(parts):
    """Smart conjunction used by rule emitters: collapse 0/1-ary cases."""
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def mk_or(parts):
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def mk_exists(block, body):
    """Existential closure; skipped entirely on an empty block."""
    block = tuple(block)
    return Exists(block, body) if block else body


def mk_forall(block, body):
    block = tuple(block)
    return Forall(block, body) if block else body


def tuple_eq(xs, ys):
    """Componentwise equality of two equally long variable tuples."""
    if len(xs) != len(ys):
        raise ValueError("tuple length mismatch")
    return mk_and(tuple(Eq(x, y) for x, y in zip(xs, ys)))


# ---------------------------------------------------------------- sequents


@dataclass(frozen=True)
class Sequent:
    context: tuple
    lhs: object
    rhs: object

    def __post_init__(self):
        names = [v.name for v in self.context]
        if len(set(names)) != len(names):
            raise ValueError("repeated variable in context: %s" % names)
        have = set(names)
        missing = [n for n in {**free_vars(self.lhs), **free_vars(self.rhs)} if n not in have]
        if missing:
            raise ValueError("free variables %s escape the context" % missing)
        object.__setattr__(self, "context", tuple(self.context))

    def __repr__(self):
        return print_sequent(self)


# ---------------------------------------------------------------- signatures and theories


class Signature:
    """Sorts plus function and relation symbols with their sort profiles."""

    def __init__(self, sorts=(), funcs=None, rels=None):
        self.sorts = tuple(sorts)
        self.funcs = dict(funcs or {})  # name -> (arg sorts tuple, result sort)
        self.rels = dict(rels or {})  # name -> arg sorts tuple
        for name, (args, res) in self.funcs.items():
            for s in (*args, res):
                if s not in self.sorts:
                    raise SortError("function %s uses unknown sort %s" % (name, s))
        for name, args in self.rels.items():
            for s in args:
                if s not in self.sorts:
                    raise SortError("relation %s uses unknown sort %s" % (name, s))

    def __eq__(self, other):
        return (
            isinstance(other, Signature)
            and self.sorts == other.sorts
            and self.funcs == other.funcs
            and self.rels == other.rels
        )

    def __repr__(self):
        return sexp.dumps(signature_to_sexp(self))

    def constants(self, sort=None):
        return [
            (name, res)
            for name, (args, res) in sorted(self.funcs.items())
            if not args and (sort is None or res == sort)
        ]

    def extend(self, funcs=None, rels=None, sorts=()):
        new = Signature(
            self.sorts + tuple(s for s in sorts if s not in self.sorts),
            {**self.funcs, **(funcs or {})},
            {**self.rels, **(rels or {})},
        )
        return new


class Theory:
    def __init__(self, signature, axioms=(), fragment="first-order", name="T"):
        if fragment not in FRAGMENTS:
            raise FragmentError("unknown fragment %r" % fragment)
        self.signature = signature
        self.axioms = tuple(axioms)
        self.fragment = fragment
        self.name = name
        for seq in self.axioms:
            check_sequent(seq, signature)
            bad = sequent_fragment_violation(seq, fragment)
            if bad:
                raise FragmentError("axiom %s outside fragment %s: %s" % (print_sequent(seq), fragment, bad))

    def __repr__(self):
        return "Theory(%s, %d axioms, %s)" % (self.name, len(self.axioms), self.fragment)


# ---------------------------------------------------------------- sort checking


def check_term(t, sig, scope):
    if isinstance(t, Var):
        want = scope.get(t.name)
        if want is None:
            raise SortError("variable %s not in scope" % t.name)
        if want != t.sort:
            raise SortError("variable %s has sort %s, annotated %s" % (t.name, want, t.sort))
        return t.sort
    if t.fn not in sig.funcs:
        raise SortError("unknown function symbol %s" % t.fn)
    args, res = sig.funcs[t.fn]
    if len(args) != len(t.args):
        raise SortError("function %s expects %d arguments" % (t.fn, len(args)))
    for want, a in zip(args, t.args):
        got = check_term(a, sig, scope)
        if got != want:
            raise SortError("argument of %s has sort %s, expected %s" % (t.fn, got, want))
    if t.sort != res:
        raise SortError("application of %s annotated %s, expected %s" % (t.fn, t.sort, res))
    return res


def check_formula(phi, sig, scope):
    if isinstance(phi, Rel):
        if phi.name not in sig.rels:
            raise SortError("unknown relation symbol %s" % phi.name)
        args = sig.rels[phi.name]
        if len(args) != len(phi.args):
            raise SortError("relation %s expects %d arguments" % (phi.name, len(args)))
        for want, a in zip(args, phi.args):
            got = check_term(a, sig, scope)
            if got != want:
                raise SortError("argument of %s has sort %s, expected %s" % (phi.name, got, want))
    elif isinstance(phi, Eq):
        s = check_term(phi.lhs, sig, scope)
        t = check_term(phi.rhs, sig, scope)
        if s != t:
            raise SortError("equality between sorts %s and %s" % (s, t))
    elif isinstance(phi, (And, Or)):
        for p in phi.parts:
            check_formula(p, sig, scope)
    elif isinstance(phi, Imp):
        check_formula(phi.lhs, sig, scope)
        check_formula(phi.rhs, sig, scope)
    elif isinstance(phi, (Exists, Forall)):
        for v in phi.block:
            if v.sort not in sig.sorts:
                raise SortError("quantifier over unknown sort %s" % v.sort)
        inner = dict(scope)
        inner.update({v.name: v.sort for v in phi.block})
        check_formula(phi.body, sig, inner)
    else:
        raise TypeError("not a formula: %r" % (phi,))


def check_sequent(seq, sig):
    scope = {v.name: v.sort for v in seq.context}
    for v in seq.context:
        if v.sort not in sig.sorts:
            raise SortError("context variable %s has unknown sort %s" % (v.name, v.sort))
    check_formula(seq.lhs, sig, scope)
    check_formula(seq.rhs, sig, scope)


# ---------------------------------------------------------------- fragments


def formula_fragment_violation(phi, fragment):
    """First construct of `phi` outside `fragment`, or None."""
    if fragment in ("first-order", "first-order+EM"):
        return None
    if isinstance(phi, (Rel, Eq)):
        return None
    if isinstance(phi, And):
        for p in phi.parts:
            bad = formula_fragment_violation(p, fragment)
            if bad:
                return bad
        return None
    if isinstance(phi, Or):
        if fragment == "regular":
            return "disjunction %s" % print_formula(phi)
        for p in phi.parts:
            bad = formula_fragment_violation(p, fragment)
            if bad:
                return bad
        return None
    if isinstance(phi, Imp):
        return "implication %s" % print_formula(phi)
    if isinstance(phi, Forall):
        return "universal %s" % print_formula(phi)
    if isinstance(phi, Exists):
        return formula_fragment_violation(phi.body, fragment)
    raise TypeError("not a formula: %r" % (phi,))


def sequent_fragment_violation(seq, fragment):
    return formula_fragment_violation(seq.lhs, fragment) or formula_fragment_violation(seq.rhs, fragment)


def fragment_of(phi):
    """Smallest fragment tag admitting the formula."""
    for frag in ("regular", "coherent", "first-order"):
        if not formula_fragment_violation(phi, frag):
            return frag
    return "first-order"


# ---------------------------------------------------------------- subformulas


def _freshen(block, body):
    """Open a binder: rename its block to fresh plain names v0, v1, ..."""
    taken = set(free_vars(body))
    out = []
    counter = itertools.count()
    for v in block:
        while True:
            cand = "v%d" % next(counter)
            if cand not in taken:
                break
        taken.add(cand)
        out.append(Var(cand, v.sort))
    ren = {v.name: w for v, w in zip(block, out)}
    return _subst(body, ren)


def immediate_subformulas(phi):
    if isinstance(phi, (Rel, Eq)):
        return ()
    if isinstance(phi, (And, Or)):
        return tuple(phi.parts)
    if isinstance(phi, Imp):
        return (phi.lhs, phi.rhs)
    return (_freshen(phi.block, phi.body),)


def subformula_set(theory, extra_sequents=(), extra_formulas=()):
    """All subformulas of the theory's axioms (plus extras), deduplicated
    up to alpha-equivalence, in deterministic first-visit order.
    Quantified bodies are opened with fresh plain variables."""
    seen = {}

    def visit(phi):
        if phi not in seen:
            seen[phi] = None
            for sub in immediate_subformulas(phi):
                visit(sub)

    roots = []
    for seq in tuple(theory.axioms) + tuple(extra_sequents):
        roots.extend([seq.lhs, seq.rhs])
    roots.extend(extra_formulas)
    for phi in roots:
        visit(phi)
    return list(seen)


# ---------------------------------------------------------------- printing


def print_term(t):
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.fn
    return "(" + " ".join([t.fn] + [print_term(a) for a in t.args]) + ")"


def _term_sexp(t):
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.fn
    return [t.fn] + [_term_sexp(a) for a in t.args]


def _block_sexp(block):
    return ["%s:%s" % (v.name, v.sort) for v in block]


def formula_to_sexp(phi):
    if isinstance(phi, Rel):
        if not phi.args:
            return phi.name
        return ["rel", phi.name] + [_term_sexp(t) for t in phi.args]
    if isinstance(phi, Eq):
        return ["eq", _term_sexp(phi.lhs), _term_sexp(phi.rhs)]
    if isinstance(phi, And):
        if not phi.parts:
            return "true"
        return ["and"] + [formula_to_sexp(p) for p in phi.parts]
    if isinstance(phi, Or):
        if not phi.parts:
            return "false"
        return ["or"] + [formula_to_sexp(p) for p in phi.parts]
    if isinstance(phi, Imp):
        if phi.rhs == FALSE:
            return ["not", formula_to_sexp(phi.lhs)]
        return ["imp", formula_to_sexp(phi.lhs), formula_to_sexp(phi.rhs)]
    if isinstance(phi, Exists):
        return ["ex", _block_sexp(phi.block), formula_to_sexp(phi.body)]
    if isinstance(phi, Forall):
        return ["all", _block_sexp(phi.block), formula_to_sexp(phi.body)]
    raise TypeError("not a formula: %r" % (phi,))


def print_formula(phi):
    return sexp.dumps(formula_to_sexp(phi))


def sequent_to_sexp(seq):
    return ["seq", _block_sexp(seq.context), formula_to_sexp(seq.lhs), formula_to_sexp(seq.rhs)]


def print_sequent(seq):
    return sexp.dumps(sequent_to_sexp(seq))


def signature_to_sexp(sig):
    node = ["signature", ["sorts"] + list(sig.sorts)]
    for name, (args, res) in sorted(sig.funcs.items()):
        node.append(["fun", name, list(args), res])
    for name, args in sorted(sig.rels.items()):
        node.append(["rel", name, list(args)])
    return node


def theory_to_sexp(th):
    node = ["theory", ["name", th.name], signature_to_sexp(th.signature), ["fragment", th.fragment]]
    for seq in th.axioms:
        node.append(["axiom", sequent_to_sexp(seq)])
    return node


def print_theory(th):
    return sexp.dumps_pretty(theory_to_sexp(th))


# ---------------------------------------------------------------- parsing


_KEYWORDS = {"and", "or", "imp", "not", "ex", "all", "eq", "rel", "true", "false", "seq"}


def _parse_typed_var(tok, where):
    if not isinstance(tok, str) or ":" not in tok:
        raise ParseError("expected var:Sort in %s, got %s" % (where, sexp.dumps(tok)))
    name, _, sort = tok.partition(":")
    if not name or not sort:
        raise ParseError("malformed var:Sort token %r" % tok)
    return Var(name, sort)


def parse_context(node):
    if isinstance(node, str):
        raise ParseError("context must be a list, got %r" % node)
    ctx = tuple(_parse_typed_var(tok, "context") for tok in node)
    for v in ctx:
        if v.name.startswith(RESERVED_PREFIX):
            raise ParseError("variable name %s uses the reserved prefix" % v.name)
    return ctx


def _parse_term(node, sig, scope):
    if isinstance(node, str):
        if node in scope:
            return scope[node]
        if sig is not None and node in sig.funcs:
            args, res = sig.funcs[node]
            if args:
                raise ParseError("function %s needs arguments" % node)
            return App(node, (), res)
        raise ParseError("unknown variable or constant %r" % node)
    if not node or not isinstance(node[0], str):
        raise ParseError("bad term %s" % sexp.dumps(node))
    fn = node[0]
    if sig is None or fn not in sig.funcs:
        raise ParseError("unknown function symbol %r" % fn)
    args, res = sig.funcs[fn]
    sub = tuple(_parse_term(a, sig, scope) for a in node[1:])
    if len(sub) != len(args):
        raise ParseError("function %s expects %d arguments" % (fn, len(args)))
    return App(fn, sub, res)


def _parse_formula(node, sig, scope):
    if isinstance(node, str):
        if node == "true":
            return TRUE
        if node == "false":
            return FALSE
        if node.startswith(RESERVED_PREFIX):
            raise ParseError("relation name %s uses the reserved prefix" % node)
        return Rel(node, ())
    if not node:
        raise ParseError("empty formula ()")
    head = node[0]
    if not isinstance(head, str):
        raise ParseError("bad formula head %s" % sexp.dumps(head))
    if head == "and":
        return And(tuple(_parse_formula(p, sig, scope) for p in node[1:]))
    if head == "or":
        return Or(tuple(_parse_formula(p, sig, scope) for p in node[1:]))
    if head == "imp":
        if len(node) != 3:
            raise ParseError("imp takes two formulas")
        return Imp(_parse_formula(node[1], sig, scope), _parse_formula(node[2], sig, scope))
    if head == "not":
        if len(node) != 2:
            raise ParseError("not takes one formula")
        return Not(_parse_formula(node[1], sig, scope))
    if head == "eq":
        if len(node) != 3:
            raise ParseError("eq takes two terms")
        return Eq(_parse_term(node[1], sig, scope), _parse_term(node[2], sig, scope))
    if head == "rel":
        if len(node) < 2 or not isinstance(node[1], str):
            raise ParseError("rel needs a relation name")
        return Rel(node[1], tuple(_parse_term(t, sig, scope) for t in node[2:]))
    if head in ("ex", "all"):
        if len(node) != 3:
            raise ParseError("%s takes a block and a body" % head)
        block = tuple(_parse_typed_var(tok, "quantifier block") for tok in node[1])
        inner = dict(scope)
        inner.update({v.name: v for v in block})
        body = _parse_formula(node[2], sig, inner)
        return (Exists if head == "ex" else Forall)(block, body)
    raise ParseError("unknown formula head %r" % head)


def _scope_of(context):
    scope = {}
    for v in context:
        scope[v.name] = v
    return scope


def parse_formula(text, sig=None, context=()):
    node = sexp.loads(text) if isinstance(text, str) else text
    phi = _parse_formula(node, sig, _scope_of(context))
    if sig is not None:
        check_formula(phi, sig, {v.name: v.sort for v in context})
    return phi


def parse_sequent(text, sig=None):
    node = sexp.loads(text) if isinstance(text, str) else text
    if not isinstance(node, list) or not node or node[0] != "seq" or len(node) != 4:
        raise ParseError("expected (seq (context) lhs rhs)")
    ctx = parse_context(node[1])
    scope = _scope_of(ctx)
    seq = Sequent(ctx, _parse_formula(node[2], sig, scope), _parse_formula(node[3], sig, scope))
    if sig is not None:
        check_sequent(seq, sig)
    return seq


def parse_signature(node):
    if isinstance(node, str):
        node = sexp.loads(node)
    if not node or node[0] != "signature":
        raise ParseError("expected (signature ...)")
    sorts, funcs, rels = (), {}, {}
    for item in node[1:]:
        if not item:
            raise ParseError("empty signature item")
        if item[0] == "sorts":
            sorts = tuple(item[1:])
        elif item[0] == "fun":
            if len(item) != 4:
                raise ParseError("expected (fun name (args) result)")
            funcs[item[1]] = (tuple(item[2]), item[3])
        elif item[0] == "rel":
            if len(item) != 3:
                raise ParseError("expected (rel name (args))")
            rels[item[1]] = tuple(item[2])
        else:
            raise ParseError("unknown signature item %r" % item[0])
    return Signature(sorts, funcs, rels)


def parse_theory(text):
    node = sexp.loads(text) if isinstance(text, str) else text
    if not isinstance(node, list) or not node or node[0] != "theory":
        raise ParseError("expected (theory ...)")
    name, sig, fragment, axioms = "T", None, "first-order", []
    for item in node[1:]:
        if not item:
            raise ParseError("empty theory item")
        if item[0] == "name":
            name = item[1]
        elif item[0] == "signature":
            sig = parse_signature(item)
        elif item[0] == "fragment":
            fragment = item[1]
        elif item[0] == "axiom":
            axioms.append(item[1])
        else:
            raise ParseError("unknown theory item %r" % item[0])
    if sig is None:
        raise ParseError("theory without signature")
    return Theory(sig, [parse_sequent(a, sig) for a in axioms], fragment, name)
