"""Finite sites, Grothendieck topologies, sheafification, and the logic
of subsheaves.

A site is a finite category with declared covering families and,
optionally, designated pullbacks. `saturate` grows the declared covers
into the least topology (a set of sieves per object closed upward,
under pullback, and under composition of covers); everything downstream
asks that topology, never the raw declaration. Sheafification is the
double application of the one-step plus construction, with its unit
returned so callers can test, not assume, the universal property.

Subsheaves of a sheaf form a Heyting algebra like subfunctors do, except
that joins, images, and falsity happen locally: an element belongs when
a covering sieve pulls it in. `sheaf_force` spells the same semantics
point by point so the two can be cross-checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .presheaf import (
    Presheaf, SubHeyting, Subfunctor, check_natural, poset_category,
)
from .syntax import And, Eq, Exists, Forall, Imp, Or, Rel, check_formula


class SiteError(ValueError):
    pass


# ------------------------------------------------------------- sieves


def sieve_generated(cat, c, family):
    """Least sieve on c containing the family: all composites f . g."""
    out = set()
    for f in family:
        if cat.cod(f) != c:
            raise SiteError("arrow %r does not point at %r" % (f, c))
        for g in cat.arrows_into(cat.dom(f)):
            out.add(cat.compose(f, g))
    return frozenset(out)


def is_sieve(cat, c, arrows):
    for f in arrows:
        if cat.cod(f) != c:
            return False
        for g in cat.arrows_into(cat.dom(f)):
            if cat.compose(f, g) not in arrows:
                return False
    return True


def pullback_sieve(cat, f, sieve):
    """The sieve f*(S) = {h | f . h in S} on dom(f). Always exists; no
    designated pullbacks are involved."""
    d = cat.dom(f)
    return frozenset(h for h in cat.arrows_into(d) if cat.compose(f, h) in sieve)


def all_sieves(cat, c):
    """Every sieve on c, by filtering subsets of the incoming arrows."""
    arrows = cat.arrows_into(c)
    out = []
    for mask in range(1 << len(arrows)):
        s = frozenset(a for i, a in enumerate(arrows) if (mask >> i) & 1)
        if is_sieve(cat, c, s):
            out.append(s)
    return out


class Site:
    """Category plus declared covers. `covers` maps an object to a tuple
    of families (tuples of incoming arrows). `pullbacks` maps a pair of
    arrows (f, g) with a common codomain to the designated span (p1, p2);
    the table may be partial, users that need a pullback get a SiteError
    naming the missing pair."""

    def __init__(self, cat, covers, pullbacks=None, name="site"):
        self.cat = cat
        self.name = name
        self.covers = {c: tuple(tuple(fam) for fam in covers.get(c, ())) for c in cat.objects}
        self.pullbacks = dict(pullbacks or {})
        self._topology = None
        self.validate()

    def validate(self):
        cat = self.cat
        for c, fams in self.covers.items():
            for fam in fams:
                for f in fam:
                    if f not in cat.arr or cat.cod(f) != c:
                        raise SiteError("cover of %r lists %r, which does not point there" % (c, f))
        for (f, g), (p1, p2) in self.pullbacks.items():
            if cat.cod(f) != cat.cod(g):
                raise SiteError("pullback declared for non-cospan %r, %r" % (f, g))
            if cat.dom(p1) != cat.dom(p2):
                raise SiteError("pullback span of %r, %r has two apexes" % (f, g))
            if cat.compose(f, p1) != cat.compose(g, p2):
                raise SiteError("pullback square of %r, %r does not commute" % (f, g))
            apex = cat.dom(p1)
            for q in cat.objects:
                for u in cat.hom(q, cat.dom(f)):
                    for v in cat.hom(q, cat.dom(g)):
                        if cat.compose(f, u) != cat.compose(g, v):
                            continue
                        mediating = [w for w in cat.hom(q, apex)
                                     if cat.compose(p1, w) == u and cat.compose(p2, w) == v]
                        if len(mediating) != 1:
                            raise SiteError(
                                "pullback of %r, %r is not universal at %r" % (f, g, q))
        return self

    def pullback(self, f, g):
        got = self.pullbacks.get((f, g))
        if got is None:
            raise SiteError("missing designated pullback for %r, %r" % (f, g))
        return got

    def topology(self):
        if self._topology is None:
            self._topology = saturate(self)
        return self._topology

    def covering(self, c, sieve):
        return frozenset(sieve) in self.topology()[c]

    def __repr__(self):
        return "Site(%s on %s)" % (self.name, self.cat.name)


def saturate(site):
    """Least topology containing the declared covers: per object, the
    set of covering sieves, closed under supersets, pullback along any
    arrow, and composition of covers. Running it on its own output adds
    nothing (tested, not assumed)."""
    cat = site.cat
    sieves = {c: all_sieves(cat, c) for c in cat.objects}
    J = {c: set() for c in cat.objects}
    for c in cat.objects:
        J[c].add(frozenset(cat.arrows_into(c)))
        for fam in site.covers[c]:
            J[c].add(sieve_generated(cat, c, fam))
    changed = True
    while changed:
        changed = False
        for c in cat.objects:
            for s in list(J[c]):
                for f in cat.arrows_into(c):
                    d = cat.dom(f)
                    back = pullback_sieve(cat, f, s)
                    if back not in J[d]:
                        J[d].add(back)
                        changed = True
        for c in cat.objects:
            for cand in sieves[c]:
                if cand in J[c]:
                    continue
                for t in list(J[c]):
                    if all(pullback_sieve(cat, f, cand) in J[cat.dom(f)] for f in t):
                        J[c].add(cand)
                        changed = True
                        break
    return {c: frozenset(J[c]) for c in cat.objects}


def lattice_site(L, name="lattice-site"):
    """Site of a finite lattice: objects are the elements, arrows the
    order, covers the families whose join recovers the object, and the
    designated pullback of a cospan is the meet."""
    elems = tuple(range(L.n))
    cat = poset_category(elems, L.leq, name=name)
    covers = {}
    for b in elems:
        below = [a for a in elems if L.leq(a, b)]
        fams = []
        for r in range(len(below) + 1):
            for combo in itertools.combinations(below, r):
                if L.join_all(combo) == b:
                    fams.append(tuple(
                        ("le", a, b) if a != b else cat.identity[b] for a in combo))
        covers[b] = tuple(fams)
    pullbacks = {}
    for f in cat.arrow_names():
        for g in cat.arrow_names():
            if cat.cod(f) != cat.cod(g):
                continue
            a, b = cat.dom(f), cat.dom(g)
            m = L.meet(a, b)
            p1 = cat.identity[a] if m == a else ("le", m, a)
            p2 = cat.identity[b] if m == b else ("le", m, b)
            pullbacks[(f, g)] = (p1, p2)
    return Site(cat, covers, pullbacks, name=name)


def representable(cat, a):
    """The presheaf of arrows into a."""
    sets = {c: cat.hom(c, a) for c in cat.objects}
    maps = {}
    for f in cat.nonidentity:
        d, c = cat.arr[f]
        maps[f] = {g: cat.compose(g, f) for g in sets[c]}
    return Presheaf(cat, sets, maps)


# ---------------------------------------------------- sheaf condition


def matching_families(F, c, sieve):
    """All compatible assignments of an element of F(dom f) to each f in
    the sieve, by backtracking over the arrows in a fixed order."""
    arrows = sorted(sieve, key=repr)
    cat = F.cat
    out = []

    def compatible(partial, f, val):
        for g in cat.arrows_into(cat.dom(f)):
            fg = cat.compose(f, g)
            if fg in partial and partial[fg] != F.restrict(g, val):
                return False
        for h, w in partial.items():
            for g in cat.arrows_into(cat.dom(h)):
                if cat.compose(h, g) == f and F.restrict(g, w) != val:
                    return False
        return True

    def walk(i, partial):
        if i == len(arrows):
            out.append(dict(partial))
            return
        f = arrows[i]
        for val in F.sets[cat.dom(f)]:
            if compatible(partial, f, val):
                partial[f] = val
                walk(i + 1, partial)
                del partial[f]

    walk(0, {})
    return out


def sheaf_violation(site, F):
    """None when F is a sheaf for the saturated topology; otherwise a
    tuple (object, sieve, problem) where problem counts amalgamations."""
    topo = site.topology()
    cat = site.cat
    for c in cat.objects:
        for sieve in sorted(topo[c], key=lambda s: (len(s), sorted(map(repr, s)))):
            for fam in matching_families(F, c, sieve):
                hits = [e for e in F.sets[c]
                        if all(F.restrict(f, e) == fam[f] for f in sieve)]
                if len(hits) != 1:
                    return (c, sieve, "%d amalgamations" % len(hits))
    return None


def check_sheaf(site, F):
    return sheaf_violation(site, F) is None


# -------------------------------------------------- plus construction


def plus_construction(site, F):
    """One step of the plus construction: elements over c are matching
    families on covering sieves, identified when they agree on a common
    covering refinement. Returns the new presheaf and the unit map."""
    topo = site.topology()
    cat = site.cat

    def encode(sieve, fam):
        return (sieve, tuple(sorted(((repr(f), f, fam[f]) for f in sieve), key=lambda t: t[0])))

    pairs = {c: [] for c in cat.objects}
    for c in cat.objects:
        for sieve in sorted(topo[c], key=lambda s: (len(s), sorted(map(repr, s)))):
            for fam in matching_families(F, c, sieve):
                pairs[c].append((sieve, fam))

    # Group pairs agreeing on a common covering refinement.
    class_of = {}
    classes = {c: [] for c in cat.objects}
    for c in cat.objects:
        buckets = {}
        parent = list(range(len(pairs[c])))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i, (sieve, fam) in enumerate(pairs[c]):
            for refinement in topo[c]:
                if refinement <= sieve:
                    key = encode(refinement, fam)
                    j = buckets.setdefault(key, i)
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[ri] = rj
        roots = {}
        for i, pair in enumerate(pairs[c]):
            r = find(i)
            if r not in roots:
                roots[r] = len(classes[c])
                classes[c].append(pair)
            class_of[(c, encode(*pair))] = roots[r]

    sets = {c: tuple(range(len(classes[c]))) for c in cat.objects}
    maps = {}
    for f in cat.nonidentity:
        d, c = cat.arr[f]
        m = {}
        for idx, (sieve, fam) in enumerate(classes[c]):
            back = pullback_sieve(cat, f, sieve)
            moved = {h: fam[cat.compose(f, h)] for h in back}
            m[idx] = class_of[(d, encode(back, moved))]
        maps[f] = m
    plus = Presheaf(cat, sets, maps)
    unit = {}
    for c in cat.objects:
        top_sieve = frozenset(cat.arrows_into(c))
        unit[c] = {
            e: class_of[(c, encode(top_sieve, {f: F.restrict(f, e) for f in top_sieve}))]
            for e in F.sets[c]
        }
    return plus, unit


def sheafify(site, F):
    """Double plus. Returns (sheaf, unit); the unit is an isomorphism
    exactly when F already was a sheaf."""
    once, u1 = plus_construction(site, F)
    twice, u2 = plus_construction(site, once)
    unit = {c: {e: u2[c][u1[c][e]] for e in F.sets[c]} for c in site.cat.objects}
    return twice, unit


# ------------------------------------------------------ subsheaf logic


def sheaf_close(site, sub):
    """j-closure: keep the elements some covering sieve pulls into the
    parts. One pass suffices because the topology composes covers."""
    topo = site.topology()
    parent = sub.parent
    cat = site.cat
    parts = {}
    for c in cat.objects:
        keep = set()
        for e in parent.sets[c]:
            hit = frozenset(
                f for f in cat.arrows_into(c)
                if parent.restrict(f, e) in sub.parts[cat.dom(f)])
            if hit in topo[c]:
                keep.add(e)
        parts[c] = keep
    return Subfunctor(parent, parts)


class SheafSub(SubHeyting):
    """Heyting algebra of j-closed subfunctors of a sheaf. Meet,
    implication, and universal quantification are the presheaf ones
    (those preserve closedness); bottom, join, and image close off."""

    def __init__(self, site, parent):
        super().__init__(parent)
        self.site = site

    def bottom(self):
        return sheaf_close(self.site, super().bottom())

    def join(self, a, b):
        return sheaf_close(self.site, super().join(a, b))

    def join_all(self, subs):
        out = super().bottom()
        for s in subs:
            out = SubHeyting.join(self, out, s)
        return sheaf_close(self.site, out)

    def exists_along(self, eta, sub):
        return sheaf_close(self.site, super().exists_along(eta, sub))

    def close(self, sub):
        return sheaf_close(self.site, sub)


# ------------------------------------------------------ sheaf forcing


def sheaf_force(site, M, c, alpha, phi, context):
    """Forcing over the saturated topology: disjunction, existence,
    falsity, and equality hold when their witness sieve covers;
    implication and universal quantification range over all arrows."""
    cat = site.cat
    names = [v.name for v in context]
    env = dict(zip(names, alpha))

    def moved(f):
        return tuple(M.sorts[v.sort].restrict(f, e) for v, e in zip(context, alpha))

    if isinstance(phi, Rel):
        hit = frozenset(
            f for f in cat.arrows_into(c)
            if tuple(M.term_at(cat.dom(f), t, dict(zip(names, moved(f)))) for t in phi.args)
            in M.rels[phi.name][cat.dom(f)])
        return site.covering(c, hit)
    if isinstance(phi, Eq):
        hit = frozenset(
            f for f in cat.arrows_into(c)
            if M.term_at(cat.dom(f), phi.lhs, dict(zip(names, moved(f))))
            == M.term_at(cat.dom(f), phi.rhs, dict(zip(names, moved(f)))))
        return site.covering(c, hit)
    if isinstance(phi, And):
        return all(sheaf_force(site, M, c, alpha, p, context) for p in phi.parts)
    if isinstance(phi, Or):
        hit = frozenset(
            f for f in cat.arrows_into(c)
            if any(sheaf_force(site, M, cat.dom(f), moved(f), p, context) for p in phi.parts))
        return site.covering(c, hit)
    if isinstance(phi, Imp):
        for f in cat.arrows_into(c):
            d = cat.dom(f)
            if sheaf_force(site, M, d, moved(f), phi.lhs, context) and not sheaf_force(
                    site, M, d, moved(f), phi.rhs, context):
                return False
        return True
    if isinstance(phi, (Exists, Forall)):
        inner_ctx = tuple(context) + phi.block
        if isinstance(phi, Exists):
            def witnessed(f):
                d = cat.dom(f)
                pools = [M.sorts[v.sort].sets[d] for v in phi.block]
                base = moved(f)
                return any(
                    sheaf_force(site, M, d, base + ext, phi.body, inner_ctx)
                    for ext in itertools.product(*pools))
            hit = frozenset(f for f in cat.arrows_into(c) if witnessed(f))
            return site.covering(c, hit)
        for f in cat.arrows_into(c):
            d = cat.dom(f)
            pools = [M.sorts[v.sort].sets[d] for v in phi.block]
            base = moved(f)
            for ext in itertools.product(*pools):
                if not sheaf_force(site, M, d, base + ext, phi.body, inner_ctx):
                    return False
        return True
    raise TypeError("not a formula: %r" % (phi,))


def sheaf_interpret(site, M, phi, context):
    """Subsheaf of the context product denoted by phi; the recursion of
    `interpret` with the local operations swapped in."""
    check_formula(phi, M.signature, {v.name: v.sort for v in context})
    P = M.context_presheaf(context)
    H = SheafSub(site, P)
    names = [v.name for v in context]
    if isinstance(phi, (Rel, Eq)):
        parts = {}
        for c in M.cat.objects:
            keep = []
            for tup in P.sets[c]:
                env = dict(zip(names, tup))
                if isinstance(phi, Rel):
                    if tuple(M.term_at(c, t, env) for t in phi.args) in M.rels[phi.name][c]:
                        keep.append(tup)
                elif M.term_at(c, phi.lhs, env) == M.term_at(c, phi.rhs, env):
                    keep.append(tup)
            parts[c] = keep
        return sheaf_close(site, Subfunctor(P, parts))
    if isinstance(phi, And):
        return H.meet_all(sheaf_interpret(site, M, p, context) for p in phi.parts)
    if isinstance(phi, Or):
        return H.join_all([sheaf_interpret(site, M, p, context) for p in phi.parts])
    if isinstance(phi, Imp):
        return H.imp(sheaf_interpret(site, M, phi.lhs, context),
                     sheaf_interpret(site, M, phi.rhs, context))
    if isinstance(phi, (Exists, Forall)):
        inner_ctx = tuple(context) + phi.block
        inner = sheaf_interpret(site, M, phi.body, inner_ctx)
        Q = inner.parent
        n = len(context)
        proj = {c: {tup: tup[:n] for tup in Q.sets[c]} for c in M.cat.objects}
        if isinstance(phi, Exists):
            return H.exists_along(proj, inner)
        return H.forall_along(proj, Q, inner)
    raise TypeError("not a formula: %r" % (phi,))


def sheaf_sequent_holds(site, M, sequent):
    lhs = sheaf_interpret(site, M, sequent.lhs, sequent.context)
    rhs = sheaf_interpret(site, M, sequent.rhs, sequent.context)
    return lhs.leq(rhs)


# ------------------------------------------------- embedding of a lattice


@dataclass
class EmbeddingReport:
    ok: bool
    stable: bool
    stability_witness: tuple | None
    checks: dict

    def line(self):
        if not self.stable:
            return ("unions not stable under pullback (witness %r); "
                    "the subobject checks are inapplicable" % (self.stability_witness,))
        body = ", ".join("%s=%s" % (k, "ok" if v else "FAIL") for k, v in self.checks.items())
        return ("embedding %s: %s" % ("holds" if self.ok else "FAILS", body))


def _heyting_imp(L, a, b):
    cands = [c for c in range(L.n) if L.leq(L.meet(c, a), b)]
    j = L.join_all(cands)
    if not L.leq(L.meet(j, a), b):
        return None
    return j


def check_embedding(L):
    """How faithfully the covers-as-joins site represents a finite
    lattice inside its subsheaves of the total representable. On a
    distributive lattice every listed check passes; when pulling a cover
    back fails to cover (the non-distributive case) the report stops
    there and marks the remaining checks inapplicable."""
    elems = tuple(range(L.n))
    for b in elems:
        for fam in _join_families(L, b):
            for c in [x for x in elems if L.leq(x, b)]:
                pulled = [L.meet(a, c) for a in fam]
                got = L.join_all(pulled)
                if got != c:
                    return EmbeddingReport(
                        ok=False, stable=False,
                        stability_witness=(tuple(fam), b, c, got),
                        checks={k: None for k in (
                            "representables-are-sheaves", "conservative", "meets",
                            "unions", "covers-local-surjective", "implication",
                            "universal-quantifier")})
    site = lattice_site(L)
    cat = site.cat
    top = L.top
    ytop = representable(cat, top)
    H = SheafSub(site, ytop)

    def sub_of(a):
        return Subfunctor(ytop, {c: set(ytop.sets[c]) if L.leq(c, a) else set()
                                 for c in cat.objects})

    checks = {}
    checks["representables-are-sheaves"] = all(
        check_sheaf(site, representable(cat, a)) for a in elems)
    subs = {a: sub_of(a) for a in elems}
    checks["conservative"] = all(
        subs[a].leq(subs[b]) == L.leq(a, b)
        for a in elems for b in elems)
    checks["meets"] = all(
        H.meet(subs[a], subs[b]) == subs[L.meet(a, b)]
        for a in elems for b in elems)
    checks["unions"] = all(
        H.join(subs[a], subs[b]) == subs[L.join(a, b)]
        for a in elems for b in elems)
    covers_ok = True
    for b in elems:
        for fam in _join_families(L, b):
            got = H.join_all([subs[a] for a in fam])
            if got != subs[b]:
                covers_ok = False
    checks["covers-local-surjective"] = covers_ok
    imp_ok = True
    for a in elems:
        for b in elems:
            want = _heyting_imp(L, a, b)
            if want is None:
                imp_ok = False
                continue
            if H.imp(subs[a], subs[b]) != subs[want]:
                imp_ok = False
    checks["implication"] = imp_ok
    fa_ok = True
    for A in elems:
        for B in elems:
            if not L.leq(A, B) or A == B:
                continue
            f = ("le", A, B)
            yA, yB = representable(cat, A), representable(cat, B)
            eta = {c: {g: cat.compose(f, g) for g in yA.sets[c]} for c in cat.objects}
            HB = SheafSub(site, yB)
            for csub in [x for x in elems if L.leq(x, A)]:
                T = Subfunctor(yA, {c: set(yA.sets[c]) if L.leq(c, csub) else set()
                                    for c in cat.objects})
                got = HB.forall_along(eta, yA, T)
                want_elem = _heyting_imp(L, A, csub)
                if want_elem is None:
                    fa_ok = False
                    continue
                want_elem = L.meet(want_elem, B)
                want = Subfunctor(yB, {c: set(yB.sets[c]) if L.leq(c, want_elem) else set()
                                       for c in cat.objects})
                if got != want:
                    fa_ok = False
    checks["universal-quantifier"] = fa_ok
    ok = all(checks.values())
    return EmbeddingReport(ok=ok, stable=True, stability_witness=None, checks=checks)


def _join_families(L, b):
    below = [a for a in range(L.n) if L.leq(a, b)]
    fams = []
    for r in range(len(below) + 1):
        for combo in itertools.combinations(below, r):
            if L.join_all(combo) == b:
                fams.append(combo)
    return fams


# -------------------------------------------- transitivity in sheaves


@dataclass
class TTSheafReport:
    ok: bool
    failing: tuple | None

    def line(self):
        if self.ok:
            return "levelwise covers compose: bottom family is jointly covering"
        kind, level, node = self.failing
        return "%s violated at level %d, node %r" % (kind, level, node)


def _tree_paths(gamma, height):
    internal = [()]
    for lvl in range(1, height):
        internal.extend(itertools.product(range(gamma), repeat=lvl))
    leaves = list(itertools.product(range(gamma), repeat=height))
    return internal, leaves


def _compose_maps(cat, outer, inner):
    """outer . inner componentwise (inner first)."""
    return {c: {e: outer[c][inner[c][e]] for e in inner[c]} for c in cat.objects}


def check_tt_in_sheaves(site, sheaves, maps, gamma, height):
    """Levelwise joint covering composes down a finite tree of sheaf
    maps: if at every internal node the children cover it locally, then
    the leaves, composed all the way up, cover the root locally.

    `sheaves` maps each tree path (tuples over range(gamma), root ()) to
    a sheaf on the site; `maps` sends each nonroot path to the natural
    map into its parent's sheaf. Premise violations are reported with
    the failing level instead of poisoning the conclusion."""
    if gamma < 1 or height < 1:
        raise ValueError("need gamma >= 1 and height >= 1")
    cat = site.cat
    internal, leaves = _tree_paths(gamma, height)
    for path in internal + leaves:
        if path not in sheaves:
            raise ValueError("no sheaf at node %r" % (path,))
        if path:
            parent = path[:-1]
            check_natural(sheaves[path], sheaves[parent], maps[path])
    for path in internal + leaves:
        bad = sheaf_violation(site, sheaves[path])
        if bad is not None:
            return TTSheafReport(ok=False, failing=("not-a-sheaf", len(path), path))

    def image(target, eta, src):
        H = SheafSub(site, target)
        whole = Subfunctor(src, {c: set(src.sets[c]) for c in cat.objects})
        return H.exists_along(eta, whole)

    for path in internal:
        target = sheaves[path]
        H = SheafSub(site, target)
        union = H.bottom()
        for j in range(gamma):
            child = path + (j,)
            union = H.join(union, image(target, maps[child], sheaves[child]))
        if union != H.top():
            return TTSheafReport(ok=False, failing=("premise", len(path), path))

    root = sheaves[()]
    H = SheafSub(site, root)
    union = H.bottom()
    for leaf in leaves:
        eta = maps[leaf[:1]]
        for k in range(2, height + 1):
            eta = _compose_maps(cat, eta, maps[leaf[:k]])
        union = H.join(union, image(root, eta, sheaves[leaf]))
    if union != H.top():
        return TTSheafReport(ok=False, failing=("conclusion", 0, ()))
    return TTSheafReport(ok=True, failing=None)


__all__ = [
    "SiteError", "Site", "saturate", "sieve_generated", "pullback_sieve",
    "all_sieves", "is_sieve", "lattice_site", "representable",
    "matching_families", "sheaf_violation", "check_sheaf",
    "plus_construction", "sheafify", "sheaf_close", "SheafSub",
    "sheaf_force", "sheaf_interpret", "sheaf_sequent_holds",
    "EmbeddingReport", "check_embedding", "TTSheafReport",
    "check_tt_in_sheaves",
]
