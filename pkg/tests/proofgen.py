"""Random generation of checker-valid proofs for property tests.

A Gen grows a pool of proofs by applying rules whose premises already
live in the pool. Every node goes through proofs.rule_node, so the
kernel itself computes each conclusion; a bad random choice surfaces as
RuleError and the step is retried. Transitivity-family nodes are built
around a designated child whose premise is provable by construction
(either a copy of the parent label or an equality witness), with junk
siblings to keep the shapes varied.
"""

import random

from kappafol import proofs as P
from kappafol.kernel import RuleError, TreeAssignment, choice_chain, tt_premises
from kappafol.syntax import (
    And, Eq, Exists, FALSE, Forall, Imp, Or, Rel, Signature, Theory, TRUE,
    Var, free_vars, mk_exists, mk_or,
)

FO_SIG = Signature(("D",), {}, {"S": ("D",), "R": ("D", "D"), "p": (), "q": (), "r": ()})
PROP_SIG = Signature((), {}, {"p": (), "q": (), "r": ()})


def rand_formula(rng, ctx, depth=2, fo=True, dsort=True):
    dvars = [v for v in ctx if v.sort == "D"]
    atoms = [Rel("p", ()), Rel("q", ()), Rel("r", ()), TRUE, FALSE]
    if dsort and dvars:
        v, w = rng.choice(dvars), rng.choice(dvars)
        atoms += [Rel("S", (v,)), Rel("R", (v, w)), Eq(v, w)]
    if depth <= 0 or rng.random() < 0.45:
        return rng.choice(atoms)
    kinds = ["and", "or"]
    if fo:
        kinds.append("imp")
    if dsort:
        kinds.append("exists")
        if fo:
            kinds.append("forall")
    kind = rng.choice(kinds)
    if kind in ("and", "or"):
        parts = (
            rand_formula(rng, ctx, depth - 1, fo, dsort),
            rand_formula(rng, ctx, depth - 1, fo, dsort),
        )
        return And(parts) if kind == "and" else Or(parts)
    if kind == "imp":
        return Imp(
            rand_formula(rng, ctx, depth - 1, fo, dsort),
            rand_formula(rng, ctx, depth - 1, fo, dsort),
        )
    v = Var("b%d" % rng.randrange(50), "D")
    if any(u.name == v.name for u in ctx):
        return rand_formula(rng, ctx, depth, fo, dsort)
    body = rand_formula(rng, ctx + (v,), depth - 1, fo, dsort)
    return (Exists if kind == "exists" else Forall)((v,), body)


class Gen:
    def __init__(self, rng, theory, fo=None, ttfam=True):
        self.rng = rng
        self.theory = theory
        self.fo = (theory.fragment == "first-order") if fo is None else fo
        self.dsort = "D" in theory.signature.sorts
        self.ttfam = ttfam
        self.pool = []

    def contexts(self):
        if not self.dsort:
            return [()]
        x, y = Var("x", "D"), Var("y", "D")
        return [(), (x,), (x, y)]

    def formula(self, ctx, depth=2):
        return rand_formula(self.rng, ctx, depth, self.fo, self.dsort)

    # ------------------------------------------------------------- helpers

    def _eq_refl_at(self, ctx, v):
        leaf = P.rule_node("eq_refl", var=v)
        if tuple(ctx) == (v,):
            return leaf
        return P.rule_node("sub", [leaf], sub={}, context=tuple(ctx))

    def _witness_premise(self, ctx, phi, w, v):
        """phi |- exists w (phi and w = v), for v free in phi."""
        ctx = tuple(ctx)
        body = And((phi, Eq(w, v)))
        e = P.ex_intro(ctx, (w,), body)
        closed = P.rule_node("sub", [e], sub={w.name: v}, context=ctx)
        eq = P.cut2(P.true_intro(ctx, phi), self._eq_refl_at(ctx, v))
        pair = P.conj_intro(ctx, phi, [P.identity(ctx, phi), eq])
        return P.cut2(pair, closed)

    # ------------------------------------------------------------- leaves

    def leaf(self):
        rng = self.rng
        ctx = rng.choice(self.contexts())
        ops = ["id", "proj", "inj", "true", "false", "small_dist"]
        dvars = [v for v in ctx if v.sort == "D"]
        if dvars:
            ops += ["eq_refl", "eq_sub", "frobenius"]
        if self.theory.axioms:
            ops += ["axiom", "axiom"]
        op = rng.choice(ops)
        if op == "id":
            return P.identity(ctx, self.formula(ctx))
        if op == "proj":
            parts = (self.formula(ctx, 1), self.formula(ctx, 1))
            return P.proj(ctx, parts, rng.randrange(2))
        if op == "inj":
            parts = (self.formula(ctx, 1), self.formula(ctx, 1))
            return P.inj(ctx, parts, rng.randrange(2))
        if op == "true":
            return P.true_intro(ctx, self.formula(ctx, 1))
        if op == "false":
            return P.false_elim(ctx, self.formula(ctx, 1))
        if op == "small_dist":
            parts = (self.formula(ctx, 1), self.formula(ctx, 1))
            return P.rule_node(
                "small_dist", context=ctx, phi=self.formula(ctx, 1), parts=parts
            )
        if op == "eq_refl":
            return self._eq_refl_at(ctx, rng.choice(dvars))
        if op == "eq_sub":
            x = dvars[0]
            y = dvars[-1]
            return P.rule_node(
                "eq_sub", xs=(x,), ys=(y,), phi=self.formula(ctx, 1), context=ctx
            )
        if op == "frobenius":
            w = Var("w9", "D")
            body = self.formula(ctx + (w,), 1)
            if w.name not in free_vars(body):
                body = And((body, Rel("S", (w,))))
            return P.rule_node(
                "frobenius", context=ctx, phi=self.formula(ctx, 1),
                exists=Exists((w,), body),
            )
        i = rng.randrange(len(self.theory.axioms))
        leaf = P.axiom_leaf(self.theory, i)
        return leaf

    # ------------------------------------------- transitivity family nodes

    def tt_node(self):
        rng = self.rng
        kind = rng.choice(("tt", "dist", "tt_bar", "dc", "choice"))
        ctx = rng.choice(self.contexts())
        root = self.formula(ctx, 1)
        rootvars = [v for v in free_vars(root).values() if v.sort == "D"]
        if kind == "choice":
            if not rootvars:
                raise RuleError("no witness variable available")
            v = rng.choice(rootvars)
            depth = rng.choice((1, 2))
            items = [((Var("w%d" % b, "D"),), Eq(Var("w%d" % b, "D"), v))
                     for b in range(depth)]
            chain = choice_chain(root, items, ctx)
            prems = []
            for b in range(len(items)):
                cctx = chain.context((0,) * b)
                cur = chain.labels[(0,) * b]
                nxt = chain.labels[(0,) * (b + 1)]
                w = items[b][0][0]
                opened = P.ex_intro(cctx, (w,), nxt)
                closed = P.rule_node(
                    "sub", [opened], sub={w.name: v}, context=cctx
                )
                filled = And(tuple(
                    Eq(v, v) if pt == Eq(w, v) else pt for pt in nxt.parts
                ))
                legs = []
                for pt in filled.parts:
                    if pt == Eq(v, v):
                        legs.append(P.cut2(P.true_intro(cctx, cur), self._eq_refl_at(cctx, v)))
                    else:
                        legs.append(P.prove_implied_conj(cctx, cur, pt))
                pair = P.conj_intro(cctx, cur, legs)
                prems.append(P.cut2(pair, closed))
            node = P.rule_node("choice", prems, phi=root, items=items, context=ctx)
            return node
        gamma = 1 if kind == "dc" else rng.choice((1, 2))
        if kind == "tt_bar":
            gamma = 2
        height = rng.choice((1, 2))
        if kind == "tt_bar":
            height = 2
        labels, blocks = {(): root}, {}
        widx = [0]

        def build(f, phi):
            if len(f) == height:
                return
            phivars = [u for u in free_vars(phi).values() if u.sort == "D"]
            for j in range(gamma):
                g = f + (j,)
                if j == 0:
                    if kind != "dist" and phivars and rng.random() < 0.5:
                        w = Var("w%d" % widx[0], "D")
                        widx[0] += 1
                        v = rng.choice(phivars)
                        labels[g] = And((phi, Eq(w, v)))
                        blocks[g] = (w,)
                    else:
                        labels[g] = phi
                else:
                    if kind != "dist" and self.dsort and rng.random() < 0.4:
                        w = Var("w%d" % widx[0], "D")
                        widx[0] += 1
                        labels[g] = And((phi, Rel("S", (w,))))
                        blocks[g] = (w,)
                    else:
                        junk = rng.choice([Rel("p", ()), Rel("q", ()), TRUE])
                        labels[g] = rng.choice((And, Or))((phi, junk))
                build(g, labels[g])

        build((), root)
        a = TreeAssignment(gamma, height, labels, blocks, tuple(ctx))
        prems = []
        for f in a.internal_nodes():
            fctx = a.context(f)
            phi = a.labels[f]
            parts = [mk_exists(a.block(g), a.labels[g]) for g in a.children_of(f)]
            g0 = f + (0,)
            if a.block(g0):
                w = a.block(g0)[0]
                v = a.labels[g0].parts[1].rhs
                hit = self._witness_premise(fctx, phi, w, v)
            else:
                hit = P.identity(fctx, phi)
            if len(parts) == 1:
                prems.append(hit if a.block(g0) else P.identity(fctx, phi))
            else:
                prems.append(P.cut2(hit, P.inj(fctx, tuple(parts), 0)))
        if kind == "dc":
            return P.rule_node("dc", prems, assignment=a)
        if kind == "dist":
            return P.rule_node("dist", prems, assignment=a)
        if kind == "tt":
            return P.rule_node("tt", prems, assignment=a)
        bar = rng.choice((
            tuple(a.leaves()),
            tuple((j,) for j in range(gamma)),
            ((0,),) + tuple((1,) + (j,) for j in range(gamma)),
        ))
        return P.rule_node("tt_bar", prems, assignment=a, bar=bar)

    # -------------------------------------------------------------- growth

    def step(self):
        rng = self.rng
        ops = ["leaf", "leaf", "cut", "cut", "conj_intro", "disj_elim", "sub",
               "ex_up", "ex_down"]
        if self.fo:
            ops += ["imp_down", "imp_up", "all_down", "all_up"]
        if self.ttfam:
            ops.append("ttfam")
        op = rng.choice(ops)
        if op == "leaf" or not self.pool:
            return self.leaf()
        if op == "ttfam":
            return self.tt_node()
        picks = rng.sample(self.pool, min(len(self.pool), 12))
        if op == "cut":
            for a in picks:
                for b in picks:
                    ca, cb = a.conclusion, b.conclusion
                    if ca.context == cb.context and ca.rhs == cb.lhs and a is not b:
                        return P.cut2(a, b)
            raise RuleError("no cuttable pair in sample")
        if op == "conj_intro":
            a = rng.choice(picks)
            ca = a.conclusion
            sibs = [b for b in picks
                    if b.conclusion.context == ca.context and b.conclusion.lhs == ca.lhs]
            children = [a] + sibs[:1]
            return P.conj_intro(ca.context, ca.lhs, children)
        if op == "disj_elim":
            a = rng.choice(picks)
            ca = a.conclusion
            sibs = [b for b in picks
                    if b.conclusion.context == ca.context and b.conclusion.rhs == ca.rhs
                    and b is not a]
            children = [a] + sibs[:1]
            return P.disj_elim(ca.context, ca.rhs, children)
        if op == "sub":
            a = rng.choice(picks)
            ctx = a.conclusion.context
            if self.dsort and rng.random() < 0.5:
                extra = Var("z%d" % rng.randrange(20), "D")
                if any(u.name == extra.name for u in ctx):
                    raise RuleError("fresh name collision")
                return P.rule_node("sub", [a], sub={}, context=ctx + (extra,))
            fresh = tuple(Var("z%d" % i, v.sort) for i, v in enumerate(ctx))
            return P.rule_node(
                "sub", [a], sub={v.name: u for v, u in zip(ctx, fresh)}, context=fresh
            )
        a = self.rng.choice(picks)
        ca = a.conclusion
        if op == "imp_down":
            return P.rule_node("imp_down", [a])
        if op == "imp_up":
            return P.rule_node("imp_up", [a])
        if op == "all_down":
            if not ca.context or ca.context[-1].name in free_vars(ca.lhs):
                raise RuleError("no generalizable variable")
            return P.rule_node("all_down", [a], block=(ca.context[-1],))
        if op == "all_up":
            return P.rule_node("all_up", [a], names=("u%d" % rng.randrange(20),))
        if op == "ex_down":
            if not ca.context or ca.context[-1].name in free_vars(ca.rhs):
                raise RuleError("no boundable variable")
            return P.rule_node("ex_down", [a], block=(ca.context[-1],))
        return P.rule_node("ex_up", [a], names=("u%d" % rng.randrange(20),))

    def grow(self, steps):
        for _ in range(steps):
            for _attempt in range(30):
                try:
                    nd = self.step()
                except (RuleError, IndexError, ValueError):
                    continue
                self.pool.append(nd)
                break
        return self.pool


def corpus(seed, theory=None, steps=60, fo=None, ttfam=True):
    """A reproducible pool of checker-valid proofs in the theory."""
    if theory is None:
        theory = Theory(FO_SIG, (), "first-order", name="G")
    g = Gen(random.Random(seed), theory, fo=fo, ttfam=ttfam)
    return g.grow(steps)
