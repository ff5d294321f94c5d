"""Kripke and Beth forcing on finite trees.

Both model kinds carry a finite rooted tree, one first-order structure per
node, and transition functions along the edges. Kripke nodes never explode
and evaluate disjunction and existentials on the spot; Beth nodes may
explode and evaluate them through level bars. The module also provides a
bounded countermodel search, exhaustive model enumeration, the root-smash
construction behind the disjunction property, and a builder that unfolds a
site model into a Beth tree by scheduling witnessing covers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import isqrt

from . import fastcore
from .lattice import pairing
from .presheaf import CatStructure, Presheaf, tree_category
from .setmodels import FinStructure
from .sheaf import sheaf_force, sieve_generated
from .syntax import (
    FALSE, And, Eq, Exists, Forall, Imp, Or, Rel, Var, canonical_context,
    check_formula,
)

__all__ = [
    "ForcingError", "KripkeModel", "BethModel", "kripke_force", "beth_force",
    "kripke_sequent_holds", "beth_sequent_holds", "kripke_theory_holds",
    "kripke_to_beth", "kripke_to_catstructure", "enumerate_kripke_models",
    "SearchReport", "countermodel_search", "smash", "subformula_closure",
    "BuildReport", "beth_build", "beth_build_linear",
]


class ForcingError(ValueError):
    pass


def _same_signature(a, b):
    return a.sorts == b.sorts and a.funcs == b.funcs and a.rels == b.rels


class _TreeModel:
    """Shared tree bookkeeping: parent map with a single root, one
    FinStructure per node, and per-edge transition maps keyed by the child
    node as {sort: {parent element: child element}}."""

    def __init__(self, parent, structures, transitions=None, name="model"):
        self.parent = dict(parent)
        self.structures = dict(structures)
        self.transitions = {
            k: {s: dict(m) for s, m in v.items()}
            for k, v in (transitions or {}).items()
        }
        self.name = name
        roots = [n for n, p in self.parent.items() if p is None]
        if len(roots) != 1:
            raise ForcingError("tree needs exactly one root, got %d" % len(roots))
        self.root = roots[0]
        self._level = {}
        for n in self.parent:
            chain = [n]
            cur = n
            while self.parent[cur] is not None:
                cur = self.parent[cur]
                if cur in chain or cur not in self.parent:
                    raise ForcingError("node %r has a broken ancestor chain" % (n,))
                chain.append(cur)
            self._level[n] = len(chain) - 1
        self.nodes = tuple(sorted(self.parent, key=lambda n: (self._level[n], str(n))))
        self.height = max(self._level.values())
        kids = {n: [] for n in self.nodes}
        for n in self.nodes:
            if self.parent[n] is not None:
                kids[self.parent[n]].append(n)
        self.children = {n: tuple(v) for n, v in kids.items()}
        self._desc = {}
        for n in reversed(self.nodes):
            out = [n]
            for c in self.children[n]:
                out.extend(self._desc[c])
            self._desc[n] = tuple(out)
        if self.root not in self.structures:
            raise ForcingError("no structure at the root")
        self.signature = self.structures[self.root].signature

    # -- tree geometry

    def level(self, k):
        return self._level[k]

    def descendants(self, k):
        """k itself and everything above it in the order."""
        return self._desc[k]

    def descendants_at(self, k, lvl):
        return tuple(n for n in self._desc[k] if self._level[n] == lvl)

    def leaves(self):
        return tuple(n for n in self.nodes if not self.children[n])

    def is_below(self, k, l):
        """True when l sits on the subtree of k (k <= l)."""
        cur = l
        while cur is not None:
            if cur == k:
                return True
            cur = self.parent[cur]
        return False

    # -- moving elements along the order

    def step(self, child, sort, e):
        return self.transitions.get(child, {}).get(sort, {})[e]

    def move(self, k, l, sort, e):
        """Transport an element of D(k) up to the descendant l."""
        path = []
        cur = l
        while cur != k:
            if cur is None:
                raise ForcingError("%r is not below %r" % (l, k))
            path.append(cur)
            cur = self.parent[cur]
        for node in reversed(path):
            e = self.step(node, sort, e)
        return e

    def move_env(self, k, l, context, alpha):
        return tuple(self.move(k, l, v.sort, e) for v, e in zip(context, alpha))

    def environments(self, k, context):
        pools = [self.structures[k].sorts[v.sort] for v in context]
        return itertools.product(*pools)

    # -- validation shared by both kinds

    def _validate_tree(self):
        sig = self.signature
        for n in self.nodes:
            st = self.structures.get(n)
            if st is None:
                raise ForcingError("no structure at node %r" % (n,))
            st.validate()
            if not _same_signature(st.signature, sig):
                raise ForcingError("node %r uses a different signature" % (n,))
        for n in self.nodes:
            if n == self.root:
                continue
            p = self.parent[n]
            up, down = self.structures[p], self.structures[n]
            for s in sig.sorts:
                m = self.transitions.get(n, {}).get(s, {})
                if set(m) != set(up.sorts[s]):
                    raise ForcingError(
                        "transition into %r is not total on sort %s" % (n, s))
                for v in m.values():
                    if v not in down.sorts[s]:
                        raise ForcingError(
                            "transition into %r leaves sort %s" % (n, s))
            for f, (args, res) in sig.funcs.items():
                for tup, val in up.funcs[f].items():
                    moved = tuple(self.step(n, s, e) for s, e in zip(args, tup))
                    if down.funcs[f][moved] != self.step(n, res, val):
                        raise ForcingError(
                            "transition into %r does not commute with %s" % (n, f))
            if not up.exploding:
                for r, args in sig.rels.items():
                    for tup in up.rels.get(r, ()):
                        moved = tuple(self.step(n, s, e) for s, e in zip(args, tup))
                        if not down.exploding and moved not in down.rels.get(r, ()):
                            raise ForcingError(
                                "relation %s is not monotone into %r" % (r, n))
        return self

    def __repr__(self):
        return "%s(%r, %d nodes, height %d)" % (
            type(self).__name__, self.name, len(self.nodes), self.height)


class KripkeModel(_TreeModel):
    """Tree model with growing domains and monotone atoms; no node ever
    forces the empty disjunction."""

    def validate(self):
        self._validate_tree()
        for n in self.nodes:
            if self.structures[n].exploding:
                raise ForcingError("node %r explodes; not allowed here" % (n,))
        return self


class BethModel(_TreeModel):
    """Uniform-height tree model whose branch set is all root-to-leaf
    paths. `alpha_bound`, when given, caps the bar offsets (1 recovers the
    on-the-spot clauses)."""

    def __init__(self, parent, structures, transitions=None, name="model",
                 alpha_bound=None):
        super().__init__(parent, structures, transitions, name)
        if alpha_bound is not None and alpha_bound < 1:
            raise ForcingError("alpha_bound must leave at least offset 0")
        self.alpha_bound = alpha_bound

    def validate(self):
        self._validate_tree()
        lv = {self.level(n) for n in self.leaves()}
        if lv != {self.height}:
            raise ForcingError("leaves sit at levels %s; height must be uniform"
                               % sorted(lv))
        for n in self.nodes:
            p = self.parent[n]
            if p is not None and self.structures[p].exploding \
                    and not self.structures[n].exploding:
                raise ForcingError("exploding is not monotone into %r" % (n,))
        return self

    def branches(self):
        return tuple(self._branch(leaf) for leaf in self.leaves())

    def _branch(self, leaf):
        out = []
        cur = leaf
        while cur is not None:
            out.append(cur)
            cur = self.parent[cur]
        return tuple(reversed(out))

    def offsets(self, k):
        top = self.height - self.level(k)
        if self.alpha_bound is not None:
            top = min(top, self.alpha_bound - 1)
        return range(top + 1)


def _check_env(model, k, context, alpha):
    if len(alpha) != len(context):
        raise ForcingError("environment of length %d for a context of %d"
                           % (len(alpha), len(context)))
    st = model.structures[k]
    for v, e in zip(context, alpha):
        if e not in st.sorts[v.sort]:
            raise ForcingError("element %r is not in sort %s at node %r"
                               % (e, v.sort, k))


def kripke_force(K, k, alpha, phi, context=()):
    """Forcing at node k under the environment tuple `alpha` (aligned with
    `context`). Disjunction and existentials are decided on the spot,
    implication and universal quantification range over the subtree."""
    _check_env(K, k, context, alpha)
    st = K.structures[k]
    env = {v.name: e for v, e in zip(context, alpha)}
    if isinstance(phi, Rel):
        got = tuple(st.term_val(t, env) for t in phi.args)
        return got in st.rels.get(phi.name, ())
    if isinstance(phi, Eq):
        return st.term_val(phi.lhs, env) == st.term_val(phi.rhs, env)
    if isinstance(phi, And):
        return all(kripke_force(K, k, alpha, p, context) for p in phi.parts)
    if isinstance(phi, Or):
        return any(kripke_force(K, k, alpha, p, context) for p in phi.parts)
    if isinstance(phi, Imp):
        for l in K.descendants(k):
            moved = K.move_env(k, l, context, alpha)
            if kripke_force(K, l, moved, phi.lhs, context) and not \
                    kripke_force(K, l, moved, phi.rhs, context):
                return False
        return True
    if isinstance(phi, (Exists, Forall)):
        inner = tuple(context) + phi.block
        if isinstance(phi, Exists):
            pools = [st.sorts[v.sort] for v in phi.block]
            return any(
                kripke_force(K, k, tuple(alpha) + ext, phi.body, inner)
                for ext in itertools.product(*pools))
        for l in K.descendants(k):
            moved = K.move_env(k, l, context, alpha)
            pools = [K.structures[l].sorts[v.sort] for v in phi.block]
            for ext in itertools.product(*pools):
                if not kripke_force(K, l, moved + ext, phi.body, inner):
                    return False
        return True
    raise TypeError("not a formula: %r" % (phi,))


def _atomic_at(st, phi, env):
    if st.exploding:
        return True
    if isinstance(phi, Rel):
        return tuple(st.term_val(t, env) for t in phi.args) in st.rels.get(phi.name, ())
    return st.term_val(phi.lhs, env) == st.term_val(phi.rhs, env)


def _bar(B, k, pred):
    """True when some admissible offset makes pred hold at every node of
    the matching level below k (every branch through k meets that level
    exactly once)."""
    base = B.level(k)
    for off in B.offsets(k):
        if all(pred(l) for l in B.descendants_at(k, base + off)):
            return True
    return False


def beth_force(B, k, alpha, phi, context=()):
    """Forcing at node k with atoms, disjunction and existentials decided
    through level bars; an exploding node forces everything, and the empty
    disjunction needs a bar of exploding nodes."""
    _check_env(B, k, context, alpha)
    st = B.structures[k]
    if st.exploding:
        return True
    if isinstance(phi, (Rel, Eq)):
        def hit(l):
            moved = B.move_env(k, l, context, alpha)
            env = {v.name: e for v, e in zip(context, moved)}
            return _atomic_at(B.structures[l], phi, env)
        return _bar(B, k, hit)
    if isinstance(phi, And):
        return all(beth_force(B, k, alpha, p, context) for p in phi.parts)
    if isinstance(phi, Or):
        def hit(l):
            if B.structures[l].exploding:
                return True
            moved = B.move_env(k, l, context, alpha)
            return any(beth_force(B, l, moved, p, context) for p in phi.parts)
        return _bar(B, k, hit)
    if isinstance(phi, Imp):
        for l in B.descendants(k):
            moved = B.move_env(k, l, context, alpha)
            if beth_force(B, l, moved, phi.lhs, context) and not \
                    beth_force(B, l, moved, phi.rhs, context):
                return False
        return True
    if isinstance(phi, (Exists, Forall)):
        inner = tuple(context) + phi.block
        if isinstance(phi, Exists):
            def hit(l):
                if B.structures[l].exploding:
                    return True
                moved = B.move_env(k, l, context, alpha)
                pools = [B.structures[l].sorts[v.sort] for v in phi.block]
                return any(
                    beth_force(B, l, moved + ext, phi.body, inner)
                    for ext in itertools.product(*pools))
            return _bar(B, k, hit)
        for l in B.descendants(k):
            moved = B.move_env(k, l, context, alpha)
            pools = [B.structures[l].sorts[v.sort] for v in phi.block]
            for ext in itertools.product(*pools):
                if not beth_force(B, l, moved + ext, phi.body, inner):
                    return False
        return True
    raise TypeError("not a formula: %r" % (phi,))


def _sequent_holds(model, force, seq):
    for k in model.nodes:
        for alpha in model.environments(k, seq.context):
            if force(model, k, alpha, seq.lhs, seq.context) and not \
                    force(model, k, alpha, seq.rhs, seq.context):
                return False
    return True


def kripke_sequent_holds(K, seq):
    return _sequent_holds(K, kripke_force, seq)


def beth_sequent_holds(B, seq):
    return _sequent_holds(B, beth_force, seq)


def kripke_theory_holds(K, theory):
    return all(kripke_sequent_holds(K, ax) for ax in theory.axioms)


def kripke_to_beth(K):
    """Reread a uniform-height Kripke model as a Beth model whose bar
    offsets are pinned to zero; it forces exactly the same formulas."""
    return BethModel(K.parent, K.structures, K.transitions,
                     name=K.name, alpha_bound=1).validate()


def kripke_to_catstructure(K):
    """The same data as a presheaf-category structure: arrows run from a
    node to each of its ancestors and restriction is the transition map."""
    cat = tree_category(K.parent, name=K.name)
    sorts = {}
    for s in K.signature.sorts:
        sets = {n: K.structures[n].sorts[s] for n in K.nodes}
        maps = {}
        for f in cat.nonidentity:
            below, above = cat.arr[f]
            maps[f] = {e: K.move(above, below, s, e) for e in sets[above]}
        sorts[s] = Presheaf(cat, sets, maps)
    funcs = {f: {n: dict(K.structures[n].funcs[f]) for n in K.nodes}
             for f in K.signature.funcs}
    rels = {r: {n: set(K.structures[n].rels.get(r, ())) for n in K.nodes}
            for r in K.signature.rels}
    return CatStructure(K.signature, cat, sorts, funcs, rels, name=K.name).validate()


# ------------------------------------------------- model enumeration


def _parent_vectors(n):
    """Parent choices for nodes 1..n-1 of a tree rooted at 0."""
    return itertools.product(*[range(i) for i in range(1, n)])


def _size_vectors(sig, parents, max_card):
    """Carrier sizes per node and sort, growing along the tree."""
    n = len(parents) + 1
    sorts = sig.sorts

    def rec(i, acc):
        if i == n:
            yield acc
            return
        floor = acc[parents[i - 1]] if i else {s: 0 for s in sorts}
        for sizes in itertools.product(
                *[range(floor[s], max_card + 1) for s in sorts]):
            yield from rec(i + 1, acc + (dict(zip(sorts, sizes)),))

    yield from rec(0, ())


def _func_tables(sig, carrier, parent_table, parent_carrier):
    """All total function interpretations on `carrier` that extend the
    parent's tables along the inclusion transitions."""
    names = sorted(sig.funcs)
    per = []
    for f in names:
        args, res = sig.funcs[f]
        keys = sorted(itertools.product(*[carrier[s] for s in args]))
        fixed = {}
        if parent_table is not None:
            old = set(itertools.product(*[parent_carrier[s] for s in args]))
            fixed = {k: parent_table[f][k] for k in keys if k in old}
        free = [k for k in keys if k not in fixed]
        pool = carrier[res]
        cands = []
        for vals in itertools.product(pool, repeat=len(free)):
            cands.append({**fixed, **dict(zip(free, vals))})
        per.append(cands)
    for combo in itertools.product(*per):
        yield dict(zip(names, combo))


def _rel_tables(sig, carrier, parent_table):
    """All monotone relation interpretations: supersets of the parent's
    tuples under the inclusion transitions."""
    names = sorted(sig.rels)
    per = []
    for r in names:
        args = sig.rels[r]
        tuples = sorted(itertools.product(*[carrier[s] for s in args]))
        base = set(parent_table[r]) if parent_table is not None else set()
        extra = [t for t in tuples if t not in base]
        cands = []
        for mask in range(1 << len(extra)):
            got = set(base)
            for i, t in enumerate(extra):
                if (mask >> i) & 1:
                    got.add(t)
            cands.append(got)
        per.append(cands)
    for combo in itertools.product(*per):
        yield dict(zip(names, combo))


def _raw_kripke_models(sig, max_nodes, max_card):
    """Every Kripke model over the signature within the bounds, with
    inclusion transitions, in a fixed order."""
    for n in range(1, max_nodes + 1):
        for parents in _parent_vectors(n):
            for sizes in _size_vectors(sig, parents, max_card):
                carriers = [{s: tuple(range(sizes[i][s])) for s in sig.sorts}
                            for i in range(n)]

                def rec(i, funcs_acc, rels_acc):
                    if i == n:
                        yield funcs_acc, rels_acc
                        return
                    par = parents[i - 1] if i else None
                    ptab = funcs_acc[par] if i else None
                    pcar = carriers[par] if i else None
                    for ft in _func_tables(sig, carriers[i], ptab, pcar):
                        prel = rels_acc[par] if i else None
                        for rt in _rel_tables(sig, carriers[i], prel):
                            yield from rec(i + 1, funcs_acc + (ft,),
                                           rels_acc + (rt,))

                for funcs, rels in rec(0, (), ()):
                    parent = {0: None}
                    parent.update({i: parents[i - 1] for i in range(1, n)})
                    structures = {
                        i: FinStructure(sig, carriers[i], funcs[i], rels[i])
                        for i in range(n)
                    }
                    transitions = {
                        i: {s: {e: e for e in carriers[parents[i - 1]][s]}
                            for s in sig.sorts}
                        for i in range(1, n)
                    }
                    yield KripkeModel(parent, structures, transitions)


def enumerate_kripke_models(theory, max_nodes=2, max_card=2):
    """Kripke models of the theory within the bounds (inclusion
    transitions only), in a deterministic order."""
    for K in _raw_kripke_models(theory.signature, max_nodes, max_card):
        if kripke_theory_holds(K, theory):
            yield K


# ------------------------------------------------- countermodel search


@dataclass
class SearchReport:
    found: bool
    model: KripkeModel | None
    frames: int

    def line(self):
        if self.found:
            return "countermodel with %d nodes (tried %d frames)" % (
                len(self.model.nodes), self.frames)
        return "exhausted after %d frames" % self.frames


def _refutes_at_root(K, goal):
    for alpha in K.environments(K.root, goal.context):
        if kripke_force(K, K.root, alpha, goal.lhs, goal.context) and not \
                kripke_force(K, K.root, alpha, goal.rhs, goal.context):
            return True
    return False


def _propositional_search(theory, goal, max_nodes):
    sig = theory.signature
    atom_index = {}
    hyps = tuple(Imp(ax.lhs, ax.rhs) for ax in theory.axioms)
    lhs = And(hyps + (goal.lhs,)) if hyps else goal.lhs
    lhs_prog = fastcore.compile_formula(lhs, atom_index)
    rhs_prog = fastcore.compile_formula(goal.rhs, atom_index)
    slots = sorted(atom_index, key=atom_index.get)
    frames = 0
    for n in range(1, max_nodes + 1):
        for parents in _parent_vectors(n):
            frames += 1
            children = [[j for j in range(1, n) if parents[j - 1] == i]
                        for i in range(n)]
            frame = fastcore.Frame.from_children(children)
            got = fastcore.find_refutation(frame, lhs_prog, rhs_prog,
                                           len(slots))
            if got is None:
                continue
            combo, node = got
            keep = [i for i in range(n) if (frame.up[node] >> i) & 1]
            parent = {}
            structures = {}
            for i in keep:
                parent[i] = None if i == node else parents[i - 1]
                rels = {a: {()} for j, a in enumerate(slots)
                        if (combo[j] >> i) & 1}
                structures[i] = FinStructure(sig, {}, {}, rels)
            K = KripkeModel(parent, structures, {},
                            name="countermodel").validate()
            return SearchReport(True, K, frames)
    return SearchReport(False, None, frames)


def countermodel_search(theory, goal, max_nodes=3, max_card=2):
    """Deterministic bounded search for a Kripke model of the theory whose
    root forces the goal's left side but not its right side. Exhaustion is
    reported, not raised."""
    if not theory.signature.sorts:
        return _propositional_search(theory, goal, max_nodes)
    frames = 0
    seen_frames = set()
    for K in _raw_kripke_models(theory.signature, max_nodes, max_card):
        key = (len(K.nodes), tuple(K.parent[i] for i in sorted(K.nodes)[1:]))
        if key not in seen_frames:
            seen_frames.add(key)
            frames += 1
        if kripke_theory_holds(K, theory) and _refutes_at_root(K, goal):
            return SearchReport(True, K.validate(), frames)
    return SearchReport(False, None, frames)


# ------------------------------------------------- the smash construction


def smash(models, signature=None):
    """Glue models under one fresh root whose domains hold just the
    constants and whose atom tables are empty. Sorts without constants get
    an empty root domain. Requires a constants-only signature."""
    models = list(models)
    if signature is None:
        if not models:
            raise ForcingError("smash of zero models needs a signature")
        signature = models[0].signature
    for m in models:
        if not _same_signature(m.signature, signature):
            raise ForcingError("smash needs a shared signature")
    for f, (args, _res) in signature.funcs.items():
        if args:
            raise ForcingError(
                "smash needs a constants-only signature; %s takes arguments" % f)
    consts = {
        s: tuple(sorted(f for f, (a, r) in signature.funcs.items() if r == s))
        for s in signature.sorts
    }
    root = "root"
    root_st = FinStructure(
        signature, consts, {c: {(): c} for cs in consts.values() for c in cs})
    parent = {root: None}
    structures = {root: root_st}
    transitions = {}
    for i, m in enumerate(models):
        for n in m.nodes:
            tag = (i, n)
            parent[tag] = root if n == m.root else (i, m.parent[n])
            structures[tag] = m.structures[n]
            if n == m.root:
                base = m.structures[n]
                transitions[tag] = {
                    s: {c: base.funcs[c][()] for c in consts[s]}
                    for s in signature.sorts
                }
            else:
                transitions[tag] = m.transitions.get(n, {})
    return KripkeModel(parent, structures, transitions, name="smash").validate()


# ------------------------------------------------- the Beth tree builder


def subformula_closure(formulas):
    """The formulas with all their subformulas, outermost first."""
    out = []
    seen = set()

    def add(phi):
        if phi in seen:
            return
        seen.add(phi)
        out.append(phi)
        if isinstance(phi, (And, Or)):
            for p in phi.parts:
                add(p)
        elif isinstance(phi, Imp):
            add(phi.lhs)
            add(phi.rhs)
        elif isinstance(phi, (Exists, Forall)):
            add(phi.body)

    for phi in formulas:
        add(phi)
    return tuple(out)


def _unpair(a):
    """Inverse of lattice.pairing."""
    m = isqrt(a)
    r = a - m * m
    if r < m:
        return r, m
    return m, r - m


def _witness_sieve(site, M, c, phi, env, context):
    """Arrows into c on whose domain the disjunction picks a disjunct or
    the existential finds a witness; a sieve by monotonicity."""
    cat = site.cat
    out = set()
    for f in cat.arrows_into(c):
        d = cat.dom(f)
        moved = tuple(M.sorts[v.sort].restrict(f, e)
                      for v, e in zip(context, env))
        if isinstance(phi, Or):
            hit = any(sheaf_force(site, M, d, moved, p, context)
                      for p in phi.parts)
        else:
            pools = [M.sorts[v.sort].sets[d] for v in phi.block]
            inner = tuple(context) + phi.block
            hit = any(sheaf_force(site, M, d, moved + ext, phi.body, inner)
                      for ext in itertools.product(*pools))
        if hit:
            out.add(f)
    return frozenset(out)


def _minimal_family(site, c, sieve, singleton_only):
    arrows = sorted(sieve, key=repr)
    if site.covering(c, sieve_generated(site.cat, c, ())):
        # the empty family already covers, so c behaves as an exploding
        # object and any bar through it is free
        return ()
    top = 1 if singleton_only else len(arrows)
    for size in range(1, top + 1):
        for combo in itertools.combinations(arrows, size):
            if site.covering(c, sieve_generated(site.cat, c, combo)):
                return combo
    return None


def _witnessing_covers(site, M, c, S, singleton_only):
    """Nontrivial witnessing families at the object c, one per forced
    disjunctive or existential S-formula and environment, in order."""
    out = []
    for phi in S:
        if not isinstance(phi, (Or, Exists)):
            continue
        ctx = canonical_context(phi)
        pools = [M.sorts[v.sort].sets[c] for v in ctx]
        for env in itertools.product(*pools):
            if not sheaf_force(site, M, c, env, phi, ctx):
                continue
            sieve = _witness_sieve(site, M, c, phi, env, ctx)
            fam = _minimal_family(site, c, sieve, singleton_only)
            if fam is None:
                raise ForcingError(
                    "no singleton witnessing cover at %r for %r" % (c, phi))
            if not fam or (len(fam) == 1 and site.cat.is_identity(fam[0])):
                continue
            if fam not in out:
                out.append(fam)
    return out


def _node_structure(site, M, c_obj):
    sig = M.signature
    sorts = {s: tuple(M.sorts[s].sets[c_obj]) for s in sig.sorts}
    funcs = {f: dict(M.funcs[f][c_obj]) for f in sig.funcs}
    rels = {}
    for r, arg_sorts in sig.rels.items():
        vs = tuple(Var("x%d" % i, s) for i, s in enumerate(arg_sorts))
        atom = Rel(r, vs)
        rels[r] = {
            tup for tup in itertools.product(*[sorts[s] for s in arg_sorts])
            if sheaf_force(site, M, c_obj, tup, atom, vs)
        }
    exploding = sheaf_force(site, M, c_obj, (), FALSE, ())
    return FinStructure(sig, sorts, funcs, rels, exploding=exploding)


@dataclass
class BuildReport:
    model: BethModel
    objects: dict
    exhausted: bool
    pending: tuple

    def line(self):
        state = "exhausted" if self.exhausted else (
            "%d covers pending" % len(self.pending))
        return "beth tree of height %d, %d nodes, %s" % (
            self.model.height, len(self.model.nodes), state)


def _regular_only(phi):
    if isinstance(phi, (Rel, Eq)):
        return True
    if isinstance(phi, And):
        return all(_regular_only(p) for p in phi.parts)
    if isinstance(phi, Exists):
        return _regular_only(phi.body)
    return False


def _build(site, M, root_obj, S, h, singleton_only, name):
    if h < 1:
        raise ForcingError("the tree needs at least one level of growth")
    cat = site.cat
    if root_obj not in cat.objects:
        raise ForcingError("%r is not an object of the site" % (root_obj,))
    S = tuple(S)
    for phi in S:
        check_formula(phi, M.signature,
                      {v.name: v.sort for v in canonical_context(phi)})
    obj = {(): root_obj}
    edge = {}
    covers = {(): _witnessing_covers(site, M, root_obj, S, singleton_only)}
    levels = [[()]]
    for level in range(1, h + 1):
        beta, gamma = _unpair(level - 1)
        grown = []
        for p in levels[level - 1]:
            q = p[:gamma]
            fams = covers[q]
            if beta < len(fams):
                g = cat.identity[obj[p]]
                cur = p
                while cur != q:
                    g = cat.compose(edge[cur], g)
                    cur = cur[:-1]
                kids = [site.pullback(f, g)[1] for f in fams[beta]]
            else:
                kids = [cat.identity[obj[p]]]
            for j, a in enumerate(kids):
                child = p + (j,)
                obj[child] = cat.dom(a)
                edge[child] = a
                covers[child] = _witnessing_covers(
                    site, M, obj[child], S, singleton_only)
                grown.append(child)
        levels.append(grown)
    pending = []
    for lvl, batch in enumerate(levels):
        for q in batch:
            for b in range(len(covers[q])):
                if pairing(b, lvl) + 1 > h:
                    pending.append((q, b))
    parent = {(): None}
    structures = {(): _node_structure(site, M, root_obj)}
    transitions = {}
    for batch in levels[1:]:
        for n in batch:
            parent[n] = n[:-1]
            structures[n] = _node_structure(site, M, obj[n])
            transitions[n] = {
                s: {e: M.sorts[s].restrict(edge[n], e)
                    for e in M.sorts[s].sets[obj[n[:-1]]]}
                for s in M.signature.sorts
            }
    model = BethModel(parent, structures, transitions, name=name).validate()
    return BuildReport(model, obj, not pending, tuple(pending))


def beth_build(site, M, root_obj, S, h):
    """Unfold a site model into a Beth tree of height h rooted at the
    given object. Level a+1 with a = pairing(b, g) pulls the b-th
    witnessing cover of each level-g ancestor back along the accumulated
    path (identity when the index runs off the list). Atom tables and
    exploding flags come from site forcing; the report says whether every
    witnessing cover was scheduled within the height."""
    return _build(site, M, root_obj, S, h, False, "beth")


def beth_build_linear(site, M, root_obj, S, h):
    """As beth_build but restricted to singleton witnessing covers, so
    the output tree is a chain. S must avoid disjunction, implication and
    universal quantification."""
    for phi in S:
        if not _regular_only(phi):
            raise ForcingError(
                "%r falls outside the fragment of atoms, conjunction and "
                "existentials" % (phi,))
    return _build(site, M, root_obj, S, h, True, "beth-linear")
