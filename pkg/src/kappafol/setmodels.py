"""Finite set-valued structures: Tarski evaluation, model enumeration up
to isomorphism, reduced products over filters, and finite chain colimits.

Structures carry a `exploding` flag: an exploding structure satisfies
every formula (it interprets falsum as true), matching the possibly
inconsistent points that show up in sheaf and forcing semantics.
"""

from __future__ import annotations

import itertools

from .syntax import (
    And, App, Eq, Exists, Forall, Imp, Or, Rel, Var, free_vars,
)


class FinStructure:
    def __init__(self, signature, sorts, funcs=None, rels=None, exploding=False):
        self.signature = signature
        self.sorts = {s: tuple(v) for s, v in sorts.items()}
        self.funcs = {f: dict(t) for f, t in (funcs or {}).items()}
        self.rels = {r: set(map(tuple, t)) for r, t in (rels or {}).items()}
        self.exploding = bool(exploding)

    def validate(self):
        sig = self.signature
        for s in sig.sorts:
            if s not in self.sorts:
                raise ValueError("no carrier for sort %s" % s)
            if len(set(self.sorts[s])) != len(self.sorts[s]):
                raise ValueError("carrier of %s repeats an element" % s)
        for f, (args, res) in sig.funcs.items():
            table = self.funcs.get(f)
            if table is None:
                raise ValueError("no table for function %s" % f)
            want = set(itertools.product(*[self.sorts[a] for a in args]))
            if set(table) != want:
                raise ValueError("function %s is not total" % f)
            for tup, v in table.items():
                if v not in self.sorts[res]:
                    raise ValueError("function %s maps outside sort %s" % (f, res))
        for r, args in sig.rels.items():
            for tup in self.rels.get(r, ()):
                if len(tup) != len(args) or any(
                    e not in self.sorts[s] for e, s in zip(tup, args)
                ):
                    raise ValueError("relation %s holds of a tuple outside its sorts" % r)
        return self

    def sizes(self):
        return tuple(len(self.sorts[s]) for s in self.signature.sorts)

    # -- evaluation

    def term_val(self, t, env):
        if isinstance(t, Var):
            return env[t.name]
        return self.funcs[t.fn][tuple(self.term_val(a, env) for a in t.args)]

    def eval(self, phi, env=None):
        if self.exploding:
            return True
        env = env or {}
        if isinstance(phi, Rel):
            return tuple(self.term_val(t, env) for t in phi.args) in self.rels.get(phi.name, ())
        if isinstance(phi, Eq):
            return self.term_val(phi.lhs, env) == self.term_val(phi.rhs, env)
        if isinstance(phi, And):
            return all(self.eval(p, env) for p in phi.parts)
        if isinstance(phi, Or):
            return any(self.eval(p, env) for p in phi.parts)
        if isinstance(phi, Imp):
            return (not self.eval(phi.lhs, env)) or self.eval(phi.rhs, env)
        if isinstance(phi, (Exists, Forall)):
            doms = [self.sorts[v.sort] for v in phi.block]
            names = [v.name for v in phi.block]
            picks = (
                self.eval(phi.body, {**env, **dict(zip(names, choice))})
                for choice in itertools.product(*doms)
            )
            return any(picks) if isinstance(phi, Exists) else all(picks)
        raise TypeError("not a formula: %r" % (phi,))

    def environments(self, context):
        doms = [self.sorts[v.sort] for v in context]
        names = [v.name for v in context]
        for choice in itertools.product(*doms):
            yield dict(zip(names, choice))

    # -- bookkeeping

    def canonical(self):
        """Encoding invariant under sort-wise renaming; equal encodings
        mean isomorphic structures."""
        sig = self.signature
        best = None
        index_pools = [
            itertools.permutations(range(len(self.sorts[s]))) for s in sig.sorts
        ]
        for perms in itertools.product(*index_pools):
            code = {
                s: {e: perm[i] for i, e in enumerate(self.sorts[s])}
                for s, perm in zip(sig.sorts, perms)
            }
            enc_f = []
            for f in sorted(sig.funcs):
                args, res = sig.funcs[f]
                table = self.funcs[f]
                enc_f.append((
                    f,
                    tuple(sorted(
                        (tuple(code[s][e] for s, e in zip(args, tup)), code[res][table[tup]])
                        for tup in table
                    )),
                ))
            enc_r = []
            for r in sorted(sig.rels):
                args = sig.rels[r]
                enc_r.append((
                    r,
                    tuple(sorted(
                        tuple(code[s][e] for s, e in zip(args, tup)) for tup in self.rels.get(r, ())
                    )),
                ))
            cand = (self.sizes(), self.exploding, tuple(enc_f), tuple(enc_r))
            if best is None or cand < best:
                best = cand
        return best

    def _key(self):
        return (
            {s: tuple(v) for s, v in self.sorts.items()},
            {f: sorted(t.items()) for f, t in self.funcs.items()},
            {r: sorted(t) for r, t in self.rels.items()},
            self.exploding,
        )

    def __eq__(self, other):
        return isinstance(other, FinStructure) and self._key() == other._key()

    def __repr__(self):
        return "FinStructure(sizes=%s%s)" % (
            dict(zip(self.signature.sorts, self.sizes())),
            ", exploding" if self.exploding else "",
        )


def model_check(structure, sequent):
    """Truth of one sequent: every environment satisfying the left side
    satisfies the right side."""
    if structure.exploding:
        return True
    for env in structure.environments(sequent.context):
        if structure.eval(sequent.lhs, env) and not structure.eval(sequent.rhs, env):
            return False
    return True


def theory_holds(structure, theory):
    return all(model_check(structure, ax) for ax in theory.axioms)


def enumerate_models(theory, bound, include_exploding=False):
    """Generate models of the theory with carriers of size at most
    `bound` per sort, one per isomorphism class."""
    sig = theory.signature
    seen = set()
    sizeranges = [range(bound + 1) for _ in sig.sorts]
    for sizes in itertools.product(*sizeranges):
        carriers = {s: tuple(range(n)) for s, n in zip(sig.sorts, sizes)}
        variants = [()]
        if include_exploding:
            variants = [(), ("exploding",)]
        for flavor in variants:
            exploding = bool(flavor)
            for funcs in _all_function_tables(sig, carriers):
                if exploding:
                    rel_choices = [_full_relations(sig, carriers)]
                else:
                    rel_choices = _all_relation_tables(sig, carriers)
                for rels in rel_choices:
                    m = FinStructure(sig, carriers, funcs, rels, exploding)
                    if not exploding and not theory_holds(m, theory):
                        continue
                    key = m.canonical()
                    if key in seen:
                        continue
                    seen.add(key)
                    yield m


def _all_function_tables(sig, carriers):
    items = sorted(sig.funcs.items())
    pools = []
    for f, (args, res) in items:
        dom = list(itertools.product(*[carriers[a] for a in args]))
        cod = carriers[res]
        if dom and not cod:
            return  # no total function into an empty carrier
        pools.append([dict(zip(dom, choice)) for choice in itertools.product(cod, repeat=len(dom))])
    for combo in itertools.product(*pools):
        yield {f: table for (f, _), table in zip(items, combo)}


def _all_relation_tables(sig, carriers):
    items = sorted(sig.rels.items())
    pools = []
    for r, args in items:
        dom = list(itertools.product(*[carriers[a] for a in args]))
        pools.append([frozenset(c) for k in range(len(dom) + 1) for c in itertools.combinations(dom, k)])
    for combo in itertools.product(*pools):
        yield {r: set(t) for (r, _), t in zip(items, combo)}


def _full_relations(sig, carriers):
    return {
        r: set(itertools.product(*[carriers[a] for a in args]))
        for r, args in sig.rels.items()
    }


# ---------------------------------------------------------------- filters


def validate_filter(index_set, filter_sets):
    """A filter on a finite index set: contains the whole set, upward
    closed, closed under intersection. The improper filter (containing
    the empty set) is allowed and flagged by the caller's logic."""
    universe = frozenset(index_set)
    fs = {frozenset(s) for s in filter_sets}
    if universe not in fs:
        raise ValueError("filter must contain the full index set")
    for s in fs:
        if not s <= universe:
            raise ValueError("filter member %s outside the index set" % sorted(s))
        for t in fs:
            if s & t not in fs:
                raise ValueError("filter not closed under intersection")
        for t in map(frozenset, _supersets(s, universe)):
            if t not in fs:
                raise ValueError("filter not upward closed")
    return fs


def _supersets(s, universe):
    rest = sorted(universe - s)
    for k in range(len(rest) + 1):
        for extra in itertools.combinations(rest, k):
            yield s | set(extra)


def filter_core(filter_sets):
    core = None
    for s in filter_sets:
        core = frozenset(s) if core is None else core & frozenset(s)
    return core


def plain_product(structures, signature):
    """Direct product of finitely many non-exploding structures."""
    structures = list(structures)
    if not structures:
        raise ValueError("product needs at least one factor")
    sorts = {
        s: tuple(itertools.product(*[m.sorts[s] for m in structures]))
        for s in signature.sorts
    }
    funcs = {}
    for f, (args, res) in signature.funcs.items():
        table = {}
        for tup in itertools.product(*[sorts[a] for a in args]):
            table[tup] = tuple(
                m.funcs[f][tuple(comp[i] for comp in tup)] for i, m in enumerate(structures)
            )
        funcs[f] = table
    rels = {}
    for r, args in signature.rels.items():
        rels[r] = {
            tup
            for tup in itertools.product(*[sorts[a] for a in args])
            if all(
                tuple(comp[i] for comp in tup) in m.rels.get(r, set())
                for i, m in enumerate(structures)
            )
        }
    return FinStructure(signature, sorts, funcs, rels)


def reduced_product(structures, filter_sets, signature):
    """Quotient of the product by agreement on a filter set. Atomic
    relations hold when their truth set belongs to the filter. The
    improper filter collapses everything to an exploding point."""
    structures = list(structures)
    for m in structures:
        if m.exploding:
            raise ValueError("reduced products take non-exploding factors")
    index_set = range(len(structures))
    fs = validate_filter(index_set, filter_sets)
    if frozenset() in fs:
        sorts = {s: ("*",) for s in signature.sorts}
        funcs = {
            f: {tup: "*" for tup in itertools.product(*[sorts[a] for a in args])}
            for f, (args, _res) in signature.funcs.items()
        }
        return FinStructure(signature, sorts, funcs, _full_relations(signature, sorts), exploding=True)

    def agree(a, b):
        return frozenset(i for i in index_set if a[i] == b[i]) in fs

    sorts = {}
    classes = {}
    for s in signature.sorts:
        reps = []
        lookup = {}
        for tup in itertools.product(*[m.sorts[s] for m in structures]):
            for rep in reps:
                if agree(tup, rep):
                    lookup[tup] = rep
                    break
            else:
                reps.append(tup)
                lookup[tup] = tup
        sorts[s] = tuple(reps)
        classes[s] = lookup
    funcs = {}
    for f, (args, res) in signature.funcs.items():
        table = {}
        for tup in itertools.product(*[sorts[a] for a in args]):
            raw = tuple(
                m.funcs[f][tuple(comp[i] for comp in tup)] for i, m in enumerate(structures)
            )
            table[tup] = classes[res][raw]
        funcs[f] = table
    rels = {}
    for r, args in signature.rels.items():
        out = set()
        for tup in itertools.product(*[sorts[a] for a in args]):
            holds = frozenset(
                i
                for i in index_set
                if tuple(comp[i] for comp in tup) in structures[i].rels.get(r, set())
            )
            if holds in fs:
                out.add(tup)
        rels[r] = out
    return FinStructure(signature, sorts, funcs, rels)


def los_check(structures, filter_sets, formula, context):
    """Test the fundamental equivalence for one formula: the reduced
    product satisfies it at a tuple of classes exactly when the set of
    coordinates satisfying it pointwise lies in the filter.

    Holds for every formula of the regular fragment (a theorem the test
    suite exercises); can fail beyond it, which this reports honestly."""
    fs = validate_filter(range(len(structures)), filter_sets)
    if frozenset() in fs:
        return True  # both sides are vacuously true everywhere
    prod = reduced_product(structures, filter_sets, structures[0].signature)
    for env in prod.environments(context):
        left = prod.eval(formula, env)
        holds = frozenset(
            i
            for i in range(len(structures))
            if structures[i].eval(formula, {k: v[i] for k, v in env.items()})
        )
        if left != (holds in fs):
            return False
    return True


# ---------------------------------------------------------------- homomorphisms


def is_homomorphism(src, dst, mapping):
    """`mapping`: sort -> dict taking src carrier to dst carrier.
    Checks totality, function commutation, and relation preservation."""
    sig = src.signature
    for s in sig.sorts:
        h = mapping.get(s, {})
        for e in src.sorts[s]:
            if h.get(e) not in dst.sorts[s]:
                return False
    for f, (args, res) in sig.funcs.items():
        for tup, v in src.funcs[f].items():
            image = tuple(mapping[a][e] for a, e in zip(args, tup))
            if dst.funcs[f][image] != mapping[res][v]:
                return False
    for r, args in sig.rels.items():
        for tup in src.rels.get(r, ()):
            image = tuple(mapping[a][e] for a, e in zip(args, tup))
            if image not in dst.rels.get(r, set()):
                return False
    return True


def compose_maps(signature, first, second):
    return {
        s: {e: second[s][first[s][e]] for e in first.get(s, {})}
        for s in signature.sorts
    }


def chain_colimit(structures, maps):
    """Colimit of a finite chain M_0 -> M_1 -> ... -> M_n: the last
    structure, with the composite map from every stage into it."""
    structures = list(structures)
    if len(maps) != len(structures) - 1:
        raise ValueError("a chain of n structures needs n-1 maps")
    sig = structures[0].signature
    for i, h in enumerate(maps):
        if not is_homomorphism(structures[i], structures[i + 1], h):
            raise ValueError("stage %d map is not a homomorphism" % i)
    legs = []
    for i in range(len(structures)):
        leg = {s: {e: e for e in structures[i].sorts[s]} for s in sig.sorts}
        for h in maps[i:]:
            leg = compose_maps(sig, leg, h)
        legs.append(leg)
    return structures[-1], legs


# ---------------------------------------------------------------- serialization


def structure_to_sexp(m):
    node = ["structure"]
    if m.exploding:
        node.append(["exploding"])
    for s in m.signature.sorts:
        node.append(["sort", s] + [str(e) for e in m.sorts[s]])
    for f in sorted(m.funcs):
        entries = [
            [[str(e) for e in tup], str(v)] for tup, v in sorted(m.funcs[f].items(), key=str)
        ]
        node.append(["fun", f] + entries)
    for r in sorted(m.rels):
        node.append(["rel", r] + [[str(e) for e in tup] for tup in sorted(m.rels[r], key=str)])
    return node
