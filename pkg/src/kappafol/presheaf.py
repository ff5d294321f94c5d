"""Finite categories, presheaves of finite sets, and their subobjects.

The subfunctors of a presheaf form a Heyting algebra; this module builds
that algebra concretely and interprets sequents over a presheaf-valued
structure two ways, by structural recursion into subfunctors and by
point-by-point forcing, so the two can be played against each other in
tests instead of being trusted.

Orientation: arrows run from later stages to earlier ones, so a Kripke
order "l refines k" appears as the arrow l -> k and restriction along it
carries data forward. `compose(f, g)` is "g, then f". Implication and
universal quantification quantify over every arrow into the stage at
hand; a cover here is always the trivial one (the stage itself), the
site-sensitive variants live in the sheaf module.
"""

from __future__ import annotations

import itertools

from .syntax import (
    And, App, Eq, Exists, Forall, Imp, Or, Rel, Var,
    canonical_context, check_formula, free_vars,
)


class CatError(ValueError):
    pass


class FinCat:
    """Finite category with an explicit composition table.

    `arrows` maps nonidentity arrow names to (dom, cod) pairs; identity
    arrows are created here under the name ("id", object). `compose`
    maps each composable nonidentity pair (f, g) with cod(g) == dom(f)
    to the name of the composite "g, then f". Category laws are checked
    eagerly, so holding a FinCat means holding a category.
    """

    def __init__(self, objects, arrows, compose, name="cat"):
        self.name = name
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise CatError("objects repeat")
        self.identity = {c: ("id", c) for c in self.objects}
        self._ids = set(self.identity.values())
        arr = {self.identity[c]: (c, c) for c in self.objects}
        for f, (d, c) in arrows.items():
            if f in arr:
                raise CatError("arrow name %r repeats" % (f,))
            if d not in self.identity or c not in self.identity:
                raise CatError("arrow %r between unknown objects" % (f,))
            arr[f] = (d, c)
        self.arr = arr
        self.nonidentity = tuple(arrows)
        self._table = dict(compose)
        self._check()

    def dom(self, f):
        return self.arr[f][0]

    def cod(self, f):
        return self.arr[f][1]

    def is_identity(self, f):
        return f in self._ids

    def compose(self, f, g):
        """The composite f . g ("g, then f")."""
        if self.dom(f) != self.cod(g):
            raise CatError("arrows %r . %r do not compose" % (f, g))
        if self.is_identity(g):
            return f
        if self.is_identity(f):
            return g
        return self._table[(f, g)]

    def _check(self):
        composable = set()
        for f in self.nonidentity:
            for g in self.nonidentity:
                if self.dom(f) == self.cod(g):
                    composable.add((f, g))
        if set(self._table) != composable:
            missing = composable - set(self._table)
            extra = set(self._table) - composable
            if missing:
                raise CatError("composition table misses %r" % (sorted(missing, key=repr)[0],))
            raise CatError("composition table has junk entry %r" % (sorted(extra, key=repr)[0],))
        for (f, g), h in self._table.items():
            if h not in self.arr:
                raise CatError("composite %r of %r . %r is not an arrow" % (h, f, g))
            if self.arr[h] != (self.dom(g), self.cod(f)):
                raise CatError("composite %r . %r has wrong endpoints" % (f, g))
        names = list(self.arr)
        for f in names:
            for g in names:
                if self.dom(f) != self.cod(g):
                    continue
                for h in names:
                    if self.dom(g) != self.cod(h):
                        continue
                    if self.compose(self.compose(f, g), h) != self.compose(f, self.compose(g, h)):
                        raise CatError("composition not associative at %r, %r, %r" % (f, g, h))

    # -- queries

    def arrow_names(self):
        """Identities first (object order), then the declared order."""
        return tuple(self.identity[c] for c in self.objects) + self.nonidentity

    def hom(self, a, b):
        return tuple(f for f in self.arrow_names() if self.arr[f] == (a, b))

    def arrows_into(self, c):
        return tuple(f for f in self.arrow_names() if self.cod(f) == c)

    def arrows_from(self, d):
        return tuple(f for f in self.arrow_names() if self.dom(f) == d)

    def is_acyclic(self):
        """No nonidentity endomorphisms and no two objects linked both ways."""
        for f in self.nonidentity:
            if self.dom(f) == self.cod(f):
                return False
        for a in self.objects:
            for b in self.objects:
                if a != b and self.hom(a, b) and self.hom(b, a):
                    return False
        return True

    def __repr__(self):
        return "FinCat(%s: %d objects, %d arrows)" % (
            self.name, len(self.objects), len(self.nonidentity))


def poset_category(elements, leq, name="poset"):
    """Category of a finite poset: one arrow ("le", a, b) per strict pair
    a <= b. `leq` must be a partial order on `elements` (checked)."""
    elements = tuple(elements)
    pairs = [(a, b) for a in elements for b in elements if a != b and leq(a, b)]
    for a, b in pairs:
        if leq(b, a):
            raise CatError("order is not antisymmetric at %r, %r" % (a, b))
    arrows = {("le", a, b): (a, b) for a, b in pairs}
    compose = {}
    for b, c in pairs:
        for a, b2 in pairs:
            if b2 != b:
                continue
            if not leq(a, c):
                raise CatError("order is not transitive at %r, %r, %r" % (a, b, c))
            compose[(("le", b, c), ("le", a, b))] = ("le", a, c)
    return FinCat(elements, arrows, compose, name=name)


def tree_category(parent, name="tree"):
    """Category of a rooted tree: one arrow from each node to each of its
    ancestors (and itself). `parent` maps node -> parent, root -> None."""
    nodes = list(parent)
    roots = [n for n in nodes if parent[n] is None]
    if len(roots) != 1:
        raise CatError("tree needs exactly one root, got %d" % len(roots))
    ancestors = {}
    for n in nodes:
        chain = [n]
        seen = {n}
        cur = n
        while parent[cur] is not None:
            cur = parent[cur]
            if cur in seen or cur not in parent:
                raise CatError("node %r has a broken ancestor chain" % (n,))
            seen.add(cur)
            chain.append(cur)
        ancestors[n] = set(chain)
    order = sorted(nodes, key=lambda n: (len(ancestors[n]), str(n)))
    return poset_category(order, lambda a, b: b in ancestors[a], name=name)


class Presheaf:
    """Contravariant finite-set functor: `sets` per object, `maps` per
    nonidentity arrow f: d -> c taking sets[c] into sets[d]."""

    def __init__(self, cat, sets, maps):
        self.cat = cat
        self.sets = {c: tuple(v) for c, v in sets.items()}
        self.maps = {f: dict(m) for f, m in maps.items()}
        self.validate()

    def restrict(self, f, e):
        if self.cat.is_identity(f):
            return e
        return self.maps[f][e]

    def validate(self):
        cat = self.cat
        for c in cat.objects:
            if c not in self.sets:
                raise ValueError("presheaf has no set at %r" % (c,))
            if len(set(self.sets[c])) != len(self.sets[c]):
                raise ValueError("presheaf set at %r repeats an element" % (c,))
        for f in cat.nonidentity:
            d, c = cat.arr[f]
            m = self.maps.get(f)
            if m is None:
                raise ValueError("presheaf has no map along %r" % (f,))
            if set(m) != set(self.sets[c]):
                raise ValueError("map along %r is not total on the set at %r" % (f, c))
            for v in m.values():
                if v not in self.sets[d]:
                    raise ValueError("map along %r leaves the set at %r" % (f, d))
        for f in cat.nonidentity:
            for g in cat.nonidentity:
                if cat.dom(f) != cat.cod(g):
                    continue
                fg = cat.compose(f, g)
                for e in self.sets[cat.cod(f)]:
                    if self.restrict(fg, e) != self.restrict(g, self.restrict(f, e)):
                        raise ValueError(
                            "restriction not functorial along %r . %r" % (f, g))
        return self

    def __repr__(self):
        return "Presheaf(%s)" % {c: len(v) for c, v in self.sets.items()}


def constant_presheaf(cat, elems):
    """Same finite set everywhere, identity restriction."""
    elems = tuple(elems)
    sets = {c: elems for c in cat.objects}
    maps = {f: {e: e for e in elems} for f in cat.nonidentity}
    return Presheaf(cat, sets, maps)


def product_presheaf(cat, factors):
    """Pointwise product; elements are tuples in factor order. The empty
    product is the terminal presheaf (one point everywhere)."""
    factors = tuple(factors)
    sets = {c: tuple(itertools.product(*[p.sets[c] for p in factors])) for c in cat.objects}
    maps = {}
    for f in cat.nonidentity:
        maps[f] = {
            tup: tuple(p.restrict(f, e) for p, e in zip(factors, tup))
            for tup in sets[cat.cod(f)]
        }
    return Presheaf(cat, sets, maps)


def terminal_presheaf(cat):
    return product_presheaf(cat, ())


def check_natural(src, dst, eta):
    """Validate eta: src -> dst (a dict of per-object maps)."""
    cat = src.cat
    for c in cat.objects:
        comp = eta.get(c)
        if comp is None or set(comp) != set(src.sets[c]):
            raise ValueError("component at %r is not total" % (c,))
        for v in comp.values():
            if v not in dst.sets[c]:
                raise ValueError("component at %r lands outside the target" % (c,))
    for f in cat.nonidentity:
        d, c = cat.arr[f]
        for e in src.sets[c]:
            if eta[d][src.restrict(f, e)] != dst.restrict(f, eta[c][e]):
                raise ValueError("not natural along %r" % (f,))
    return eta


class Subfunctor:
    """Restriction-closed choice of subsets of a presheaf."""

    def __init__(self, parent, parts):
        self.parent = parent
        self.parts = {c: frozenset(parts.get(c, ())) for c in parent.cat.objects}

    def validate(self):
        cat = self.parent.cat
        for c in cat.objects:
            if not self.parts[c] <= set(self.parent.sets[c]):
                raise ValueError("subfunctor leaves the parent at %r" % (c,))
        for f in cat.nonidentity:
            d, c = cat.arr[f]
            for e in self.parts[c]:
                if self.parent.restrict(f, e) not in self.parts[d]:
                    raise ValueError("subfunctor not closed along %r" % (f,))
        return self

    def has(self, c, e):
        return e in self.parts[c]

    def _key(self):
        return tuple((c, frozenset(self.parts[c])) for c in self.parent.cat.objects)

    def __eq__(self, other):
        return isinstance(other, Subfunctor) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def leq(self, other):
        return all(self.parts[c] <= other.parts[c] for c in self.parent.cat.objects)

    def __repr__(self):
        return "Subfunctor(%s)" % {c: sorted(map(repr, v)) for c, v in self.parts.items()}


def largest_subfunctor_inside(parent, pointwise):
    """Greatest restriction-closed family below a pointwise bound. This
    is how the right adjoints (implication, universal quantification)
    are computed: take the pointwise candidate set, then erase elements
    whose restriction escapes it until nothing moves."""
    cat = parent.cat
    parts = {c: set(pointwise.get(c, ())) for c in cat.objects}
    changed = True
    while changed:
        changed = False
        for f in cat.nonidentity:
            d, c = cat.arr[f]
            for e in list(parts[c]):
                if parent.restrict(f, e) not in parts[d]:
                    parts[c].discard(e)
                    changed = True
    return Subfunctor(parent, parts)


def enumerate_subfunctors(parent):
    """All subfunctors, smallest parts first per object. Exponential; meant
    for the desk-scale parents used in tests and verification sweeps."""
    cat = parent.cat
    per_object = []
    for c in cat.objects:
        elems = parent.sets[c]
        subs = []
        for mask in range(1 << len(elems)):
            subs.append(frozenset(e for i, e in enumerate(elems) if (mask >> i) & 1))
        per_object.append(subs)
    out = []
    for choice in itertools.product(*per_object):
        parts = dict(zip(cat.objects, choice))
        ok = True
        for f in cat.nonidentity:
            d, c = cat.arr[f]
            if any(parent.restrict(f, e) not in parts[d] for e in parts[c]):
                ok = False
                break
        if ok:
            out.append(Subfunctor(parent, parts))
    return out


class SubHeyting:
    """The Heyting algebra of subfunctors of one presheaf.

    Meet and join are pointwise. Implication and universal quantification
    are right adjoints, computed by `largest_subfunctor_inside` (the
    universal property made executable) rather than by a per-arrow
    formula; `forall_by_search` re-derives the same answer by brute
    enumeration so tests can confront the two.
    """

    def __init__(self, parent):
        self.parent = parent

    def top(self):
        return Subfunctor(self.parent, {c: self.parent.sets[c] for c in self.parent.cat.objects})

    def bottom(self):
        return Subfunctor(self.parent, {})

    def meet(self, a, b):
        return Subfunctor(self.parent, {c: a.parts[c] & b.parts[c] for c in self.parent.cat.objects})

    def join(self, a, b):
        return Subfunctor(self.parent, {c: a.parts[c] | b.parts[c] for c in self.parent.cat.objects})

    def meet_all(self, subs):
        out = self.top()
        for s in subs:
            out = self.meet(out, s)
        return out

    def join_all(self, subs):
        out = self.bottom()
        for s in subs:
            out = self.join(out, s)
        return out

    def imp(self, a, b):
        pointwise = {
            c: [e for e in self.parent.sets[c] if e not in a.parts[c] or e in b.parts[c]]
            for c in self.parent.cat.objects
        }
        return largest_subfunctor_inside(self.parent, pointwise)

    def neg(self, a):
        return self.imp(a, self.bottom())

    def leq(self, a, b):
        return a.leq(b)

    def exists_along(self, eta, sub):
        """Image of `sub` (a subfunctor of the source of eta) under eta.
        Naturality makes the pointwise image restriction-closed already,
        so no correction pass is needed."""
        parts = {c: {eta[c][e] for e in sub.parts[c]} for c in self.parent.cat.objects}
        return Subfunctor(self.parent, parts)

    def forall_along(self, eta, src, sub):
        """Right adjoint to pulling back along eta: src -> parent. The
        pointwise bound keeps y when the whole eta-fiber over y lies in
        `sub`; the erase pass then enforces stability under restriction."""
        pointwise = {}
        for c in self.parent.cat.objects:
            keep = []
            for y in self.parent.sets[c]:
                if all(sub.has(c, a) for a in src.sets[c] if eta[c][a] == y):
                    keep.append(y)
            pointwise[c] = keep
        return largest_subfunctor_inside(self.parent, pointwise)

    def forall_by_search(self, eta, src, sub):
        """The same right adjoint found literally: the largest subfunctor
        whose eta-preimage sits below `sub`, by exhaustive enumeration."""
        best = self.bottom()
        for cand in enumerate_subfunctors(self.parent):
            pullback = Subfunctor(src, {
                c: {a for a in src.sets[c] if eta[c][a] in cand.parts[c]}
                for c in self.parent.cat.objects
            })
            if pullback.leq(sub):
                best = self.join(best, cand)
        return best


def sub_heyting(parent):
    return SubHeyting(parent)


class CatStructure:
    """Interpretation of a signature in presheaves on one category:
    a presheaf per sort, a natural family of tables per function symbol,
    and a restriction-closed table per relation symbol."""

    def __init__(self, signature, cat, sorts, funcs=None, rels=None, name="catstructure"):
        self.signature = signature
        self.cat = cat
        self.name = name
        self.sorts = dict(sorts)
        self.funcs = {f: {c: dict(t) for c, t in by.items()} for f, by in (funcs or {}).items()}
        self.rels = {r: {c: set(map(tuple, t)) for c, t in by.items()} for r, by in (rels or {}).items()}
        for r in signature.rels:
            if r not in self.rels:
                self.rels[r] = {c: set() for c in cat.objects}
            for c in cat.objects:
                self.rels[r].setdefault(c, set())

    def validate(self):
        sig = self.signature
        for s in sig.sorts:
            p = self.sorts.get(s)
            if p is None or p.cat is not self.cat:
                raise ValueError("sort %s has no presheaf on this category" % s)
        for f, (args, res) in sig.funcs.items():
            by = self.funcs.get(f)
            if by is None:
                raise ValueError("no tables for function %s" % f)
            for c in self.cat.objects:
                table = by.get(c)
                want = set(itertools.product(*[self.sorts[a].sets[c] for a in args]))
                if table is None or set(table) != want:
                    raise ValueError("function %s is not total at %r" % (f, c))
                for v in table.values():
                    if v not in self.sorts[res].sets[c]:
                        raise ValueError("function %s maps outside sort %s at %r" % (f, res, c))
            for g in self.cat.nonidentity:
                d, c = self.cat.arr[g]
                for tup, v in by[c].items():
                    moved = tuple(self.sorts[a].restrict(g, e) for a, e in zip(args, tup))
                    if by[d][moved] != self.sorts[res].restrict(g, v):
                        raise ValueError("function %s is not natural along %r" % (f, g))
        for r, args in sig.rels.items():
            by = self.rels[r]
            for c in self.cat.objects:
                for tup in by[c]:
                    if len(tup) != len(args) or any(
                        e not in self.sorts[s].sets[c] for s, e in zip(args, tup)
                    ):
                        raise ValueError("relation %s holds outside its sorts at %r" % (r, c))
            for g in self.cat.nonidentity:
                d, c = self.cat.arr[g]
                for tup in by[c]:
                    moved = tuple(self.sorts[s].restrict(g, e) for s, e in zip(args, tup))
                    if moved not in by[d]:
                        raise ValueError("relation %s is not closed along %r" % (r, g))
        return self

    def context_presheaf(self, context):
        return product_presheaf(self.cat, [self.sorts[v.sort] for v in context])

    def term_at(self, c, t, env):
        if isinstance(t, Var):
            return env[t.name]
        return self.funcs[t.fn][c][tuple(self.term_at(c, a, env) for a in t.args)]

    def __repr__(self):
        return "CatStructure(%s on %s)" % (self.name, self.cat.name)


def _scope(context):
    return {v.name: v.sort for v in context}


def interpret(M, phi, context=None):
    """Subfunctor of the context product denoted by phi, by structural
    recursion: pointwise atoms, lattice operations for conjunction and
    disjunction, right adjoints for implication and universal
    quantification, image along the context projection for existentials."""
    if context is None:
        context = canonical_context(phi)
    check_formula(phi, M.signature, _scope(context))
    P = M.context_presheaf(context)
    H = SubHeyting(P)
    names = [v.name for v in context]

    if isinstance(phi, (Rel, Eq)):
        parts = {}
        for c in M.cat.objects:
            keep = []
            for tup in P.sets[c]:
                env = dict(zip(names, tup))
                if isinstance(phi, Rel):
                    got = tuple(M.term_at(c, t, env) for t in phi.args)
                    if got in M.rels[phi.name][c]:
                        keep.append(tup)
                elif M.term_at(c, phi.lhs, env) == M.term_at(c, phi.rhs, env):
                    keep.append(tup)
            parts[c] = keep
        return Subfunctor(P, parts)
    if isinstance(phi, And):
        return H.meet_all(interpret(M, p, context) for p in phi.parts)
    if isinstance(phi, Or):
        return H.join_all(interpret(M, p, context) for p in phi.parts)
    if isinstance(phi, Imp):
        return H.imp(interpret(M, phi.lhs, context), interpret(M, phi.rhs, context))
    if isinstance(phi, (Exists, Forall)):
        inner_ctx = tuple(context) + phi.block
        inner = interpret(M, phi.body, inner_ctx)
        Q = inner.parent
        n = len(context)
        proj = {c: {tup: tup[:n] for tup in Q.sets[c]} for c in M.cat.objects}
        if isinstance(phi, Exists):
            return H.exists_along(proj, inner)
        return H.forall_along(proj, Q, inner)
    raise TypeError("not a formula: %r" % (phi,))


def kj_force(M, c, alpha, phi, context):
    """Point-by-point forcing of phi at the stage c under the environment
    tuple alpha (aligned with `context`). Disjunction and existentials are
    decided on the spot, implication and universal quantification range
    over every arrow into c."""
    names = [v.name for v in context]
    env = dict(zip(names, alpha))
    if isinstance(phi, Rel):
        got = tuple(M.term_at(c, t, env) for t in phi.args)
        return got in M.rels[phi.name][c]
    if isinstance(phi, Eq):
        return M.term_at(c, phi.lhs, env) == M.term_at(c, phi.rhs, env)
    if isinstance(phi, And):
        return all(kj_force(M, c, alpha, p, context) for p in phi.parts)
    if isinstance(phi, Or):
        return any(kj_force(M, c, alpha, p, context) for p in phi.parts)
    if isinstance(phi, Imp):
        for f in M.cat.arrows_into(c):
            d = M.cat.dom(f)
            moved = tuple(
                M.sorts[v.sort].restrict(f, e) for v, e in zip(context, alpha))
            if kj_force(M, d, moved, phi.lhs, context) and not kj_force(
                    M, d, moved, phi.rhs, context):
                return False
        return True
    if isinstance(phi, (Exists, Forall)):
        inner_ctx = tuple(context) + phi.block
        if isinstance(phi, Exists):
            pools = [M.sorts[v.sort].sets[c] for v in phi.block]
            return any(
                kj_force(M, c, tuple(alpha) + ext, phi.body, inner_ctx)
                for ext in itertools.product(*pools))
        for f in M.cat.arrows_into(c):
            d = M.cat.dom(f)
            moved = tuple(
                M.sorts[v.sort].restrict(f, e) for v, e in zip(context, alpha))
            pools = [M.sorts[v.sort].sets[d] for v in phi.block]
            for ext in itertools.product(*pools):
                if not kj_force(M, d, moved + ext, phi.body, inner_ctx):
                    return False
        return True
    raise TypeError("not a formula: %r" % (phi,))


def catstructure_holds(M, sequent):
    """Truth of a sequent: the left subfunctor sits below the right one."""
    lhs = interpret(M, sequent.lhs, sequent.context)
    rhs = interpret(M, sequent.rhs, sequent.context)
    return lhs.leq(rhs)


# ----------------------------------------------------- chains of arrows


def _chains(M):
    """Composable sequences of nonidentity arrows, each recorded as
    (base object, arrow, arrow, ...) with every arrow pointing at the
    stage before it. Single objects count as empty sequences."""
    out = [(c,) for c in M.objects]
    frontier = list(out)
    while frontier:
        grown = []
        for ch in frontier:
            tail = M.dom(ch[-1]) if len(ch) > 1 else ch[0]
            for f in M.nonidentity:
                if M.cod(f) == tail:
                    grown.append(ch + (f,))
        out.extend(grown)
        frontier = grown
    return out


def diaconescu(M):
    """Replace an acyclic category by the poset of its composable chains
    of nonidentity arrows, ordered by initial segment. Returns the poset
    category P, the functor E back to M (as an object map and an arrow
    map), and a transport function pulling presheaves and subfunctors on
    M back along E. E is surjective on objects and arrows, which is what
    makes the transport conservative; that and the Heyting commutation
    are checked per instance by the callers, not assumed here."""
    if not M.is_acyclic():
        raise CatError("chain poset needs an acyclic category")
    chains = _chains(M)

    def initial_segment(short, long):
        return len(short) <= len(long) and long[:len(short)] == short

    P = poset_category(chains, lambda a, b: initial_segment(b, a), name="chains(%s)" % M.name)

    def last_object(ch):
        return M.dom(ch[-1]) if len(ch) > 1 else ch[0]

    e_obj = {ch: last_object(ch) for ch in chains}
    e_arr = {}
    for f in P.arrow_names():
        if P.is_identity(f):
            continue
        _, long, short = f
        comp = M.identity[last_object(short)]
        for step in long[len(short):]:
            comp = M.compose(comp, step)
        e_arr[f] = comp

    def transport(x):
        if isinstance(x, Subfunctor):
            return Subfunctor(transport(x.parent), {ch: x.parts[e_obj[ch]] for ch in chains})
        sets = {ch: x.sets[e_obj[ch]] for ch in chains}
        maps = {}
        for f, g in e_arr.items():
            src = P.cod(f)
            maps[f] = {e: x.restrict(g, e) for e in x.sets[e_obj[src]]}
        return Presheaf(P, sets, maps)

    return P, (e_obj, e_arr), transport


def transport_natural(P, e_obj, eta):
    """Carry a natural transformation on M over to the chain poset."""
    return {ch: dict(eta[e_obj[ch]]) for ch in P.objects}


__all__ = [
    "CatError", "FinCat", "poset_category", "tree_category",
    "Presheaf", "constant_presheaf", "product_presheaf", "terminal_presheaf",
    "check_natural", "Subfunctor", "largest_subfunctor_inside",
    "enumerate_subfunctors", "SubHeyting", "sub_heyting",
    "CatStructure", "interpret", "kj_force", "catstructure_holds",
    "diaconescu", "transport_natural",
]
