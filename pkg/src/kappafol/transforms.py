"""Syntactic transformations on theories and proofs.

Contents: the deduction lemma as a proof rewriter, renderers for the
classical and intuitionistic axiom schemata, the tree assignment that
reduces classical distributivity to the distributivity rule (plus the
proof assembly built on it), the two Morleyizations, positive diagrams,
and the branch / ultrafilter theory encoders.

Everything is a pure function from syntax to syntax; proof-producing
transforms go through `proofs.rule_node`, so their outputs are computed
by the kernel's own rule checkers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .kernel import (
    Proof, RuleError, TreeAssignment, check_proof, choice_chain, validate_bar,
)
from .proofs import (
    axiom_leaf, conj_intro, cut2, cut_chain, derive_tt_from_cut, disj_elim,
    disj_lift, ex_intro, exists_mono, false_elim, identity, proj,
    prove_implied_conj, rule_node, true_intro,
)
from .syntax import (
    And, App, Eq, Exists, FALSE, Forall, Imp, Or, Rel, Sequent, Signature,
    Theory, TRUE, Var, canonical_context, free_vars, mk_and, mk_exists,
    mk_forall, mk_or, print_formula, substitute,
)

__all__ = [
    "SchemaInstance", "classical_dist_proof", "classical_morleyize",
    "classical_schema", "classical_symbols", "coherent_morleyize",
    "coherent_symbols", "cofinal_branches", "constants_faithful",
    "choice_premise", "deduction", "derive_tt_from_cut", "diagram_signature",
    "encode_branch_theory", "encode_ultrafilter_theory", "equivl_assignment",
    "extend_theory", "positive_diagram", "subformula_set",
]


# ------------------------------------------------------------ theory plumbing


def extend_theory(theory, sigma):
    """Append the axiom (true |- sigma); returns the new theory and the
    index of the added axiom. Existing axiom indices are unchanged."""
    if free_vars(sigma):
        raise RuleError("only a closed sentence can extend a theory this way")
    axiom = Sequent((), TRUE, sigma)
    out = Theory(
        theory.signature,
        theory.axioms + (axiom,),
        theory.fragment,
        name=theory.name + "+",
    )
    return out, len(theory.axioms)


def choice_premise(phi, items, context):
    """The single-premise form of the rule of choice:
    phi |- AND_b exists x_b phi_b."""
    items = [(tuple(blk), body) for blk, body in items]
    return Sequent(
        tuple(context), phi, mk_and([mk_exists(blk, body) for blk, body in items])
    )


# ------------------------------------------------------------ deduction lemma


def _push_sigma(ctx, sigma, branches):
    """(OR_g exists x_g phi_g) and sigma |- OR_g exists x_g (phi_g and sigma).

    `branches` lists (block, label) pairs; empty blocks degrade to plain
    disjuncts. Uses small distributivity and Frobenius leaves only."""
    ctx = tuple(ctx)
    dis = [mk_exists(blk, lab) for blk, lab in branches]
    tgts = [mk_exists(blk, And((lab, sigma))) for blk, lab in branches]

    def leg(i):
        blk, lab = branches[i]
        if not blk:
            return prove_implied_conj(ctx, And((sigma, lab)), And((lab, sigma)))
        frob = rule_node("frobenius", context=ctx, phi=sigma, exists=dis[i])
        body = prove_implied_conj(
            ctx + tuple(blk), And((sigma, lab)), And((lab, sigma))
        )
        return cut2(frob, exists_mono(ctx, blk, body))

    if len(branches) == 1:
        start = prove_implied_conj(ctx, And((dis[0], sigma)), And((sigma, dis[0])))
        return cut2(start, leg(0))
    start = prove_implied_conj(ctx, And((mk_or(dis), sigma)), And((sigma, Or(tuple(dis)))))
    sd = rule_node("small_dist", context=ctx, phi=sigma, parts=tuple(dis))
    lift = disj_lift(ctx, [leg(i) for i in range(len(branches))], tuple(tgts))
    return cut_chain(start, sd, lift)


def deduction(theory, sigma, proof):
    """Rewrite a proof of phi |- psi in theory + (true |- sigma) into a
    proof of (phi and sigma) |- psi in the base theory.

    Structural recursion on the proof; subtrees that never touch the
    added axiom are kept verbatim and weakened by one projection cut."""
    if free_vars(sigma):
        raise RuleError("the deduction lemma needs a closed sentence")
    extended, idx = extend_theory(theory, sigma)
    res = check_proof(proof, extended)
    if not res.ok:
        raise RuleError("input proof fails in the extended theory: %s" % res.errors[0][1])

    uses = {}

    def _uses(nd):
        key = id(nd)
        if key not in uses:
            uses[key] = (nd.rule == "axiom" and nd["index"] == idx) or any(
                _uses(c) for c in nd.children
            )
        return uses[key]

    def w(phi):
        return And((phi, sigma))

    memo = {}

    def _ded(nd):
        key = id(nd)
        if key not in memo:
            memo[key] = _build(nd)
        return memo[key]

    def _tt_family(nd, kids):
        data = dict(nd.data)
        a = data["assignment"]
        labels2 = {f: w(a.labels[f]) for f in a.all_nodes()}
        a2 = TreeAssignment(a.gamma, a.height, labels2, dict(a.blocks), a.root_context)
        premises = []
        for f, kid in zip(a.internal_nodes(), kids):
            ctx = a.context(f)
            branches = [(a.block(g), a.labels[g]) for g in a.children_of(f)]
            pair = conj_intro(
                ctx, w(a.labels[f]), [kid, proj(ctx, (a.labels[f], sigma), 1)]
            )
            premises.append(cut2(pair, _push_sigma(ctx, sigma, branches)))
        extra = {}
        if data.get("ordering") is not None:
            extra["ordering"] = data["ordering"]
        if nd.rule == "tt_bar":
            extra["bar"] = data["bar"]
        node2 = rule_node(nd.rule, premises, assignment=a2, **extra)
        rctx = a.root_context
        if nd.rule == "dc":
            bottom = (0,) * a.height
            body = prove_implied_conj(
                a.context(bottom), labels2[bottom], a.labels[bottom]
            )
            return cut2(node2, exists_mono(rctx, a.path_blocks(bottom), body))
        if nd.rule == "tt_bar":
            ordered = validate_bar(a, data["bar"])
        else:
            ordered = a.leaves()
        if data.get("ordering") is not None:
            ordered = [tuple(p) for p in data["ordering"]]
        strips, old_parts = [], []
        for f in ordered:
            blocks = a.path_blocks(f)
            body = prove_implied_conj(
                a.context(f), a2.path_conjunction(f), a.path_conjunction(f)
            )
            strips.append(exists_mono(rctx, blocks, body))
            old_parts.append(mk_exists(blocks, a.path_conjunction(f)))
        if len(ordered) == 1:
            return cut2(node2, strips[0])
        return cut2(node2, disj_lift(rctx, strips, tuple(old_parts)))

    def _build(nd):
        ctx = nd.conclusion.context
        if not _uses(nd):
            return cut2(proj(ctx, (nd.conclusion.lhs, sigma), 0), nd)
        rule = nd.rule
        if rule == "axiom":
            return proj((), (TRUE, sigma), 1)
        if rule == "choice":
            chain = choice_chain(nd["phi"], nd["items"], nd["context"])
            repl = Proof("dc", nd.conclusion, nd.children, (("assignment", chain),))
            return _ded(repl)
        kids = [_ded(c) for c in nd.children]
        if rule == "sub":
            return rule_node("sub", kids, sub=nd["sub"], context=nd["context"])
        if rule == "cut":
            chi = nd.children[0].conclusion.lhs
            pair = conj_intro(ctx, w(chi), [kids[0], proj(ctx, (chi, sigma), 1)])
            return cut2(pair, kids[1])
        if rule == "conj_intro":
            return rule_node(
                "conj_intro", kids, context=ctx, lhs=w(nd["lhs"]), parts=nd["parts"]
            )
        if rule == "disj_elim":
            parts = tuple(nd["parts"])
            rhs = nd["rhs"]
            if not parts:
                return cut2(proj(ctx, (FALSE, sigma), 0), false_elim(ctx, rhs))
            start = prove_implied_conj(ctx, w(Or(parts)), And((sigma, Or(parts))))
            sd = rule_node("small_dist", context=ctx, phi=sigma, parts=parts)
            legs = [
                cut2(prove_implied_conj(ctx, And((sigma, p)), w(p)), k)
                for p, k in zip(parts, kids)
            ]
            return cut_chain(start, sd, disj_elim(ctx, rhs, legs))
        if rule == "imp_down":
            prem = nd.children[0].conclusion
            chi, phi = prem.lhs.parts
            t = cut2(
                prove_implied_conj(ctx, And((w(chi), phi)), w(prem.lhs)), kids[0]
            )
            return rule_node("imp_down", [t])
        if rule == "imp_up":
            prem = nd.children[0].conclusion
            chi, phi = prem.lhs, prem.rhs.lhs
            u = rule_node("imp_up", [kids[0]])
            return cut2(prove_implied_conj(ctx, w(And((chi, phi))), And((w(chi), phi))), u)
        if rule == "ex_down":
            block = tuple(nd["block"])
            prem = nd.children[0].conclusion
            ex = Exists(block, prem.lhs)
            inner = cut2(
                prove_implied_conj(prem.context, And((sigma, prem.lhs)), w(prem.lhs)),
                kids[0],
            )
            e = rule_node("ex_down", [inner], block=block)
            start = prove_implied_conj(ctx, w(ex), And((sigma, ex)))
            frob = rule_node("frobenius", context=ctx, phi=sigma, exists=ex)
            return cut_chain(start, frob, e)
        if rule == "ex_up":
            prem = nd.children[0].conclusion
            opened = nd.conclusion.lhs
            block = tuple(nd.conclusion.context[len(prem.context):])
            lift = ex_intro(prem.context, block, opened)
            pair = conj_intro(
                ctx,
                w(opened),
                [cut2(proj(ctx, (opened, sigma), 0), lift), proj(ctx, (opened, sigma), 1)],
            )
            wide = rule_node("sub", [kids[0]], sub={}, context=ctx)
            return cut2(pair, wide)
        if rule == "all_down":
            return rule_node("all_down", kids, block=tuple(nd["block"]))
        if rule == "all_up":
            return rule_node("all_up", kids, names=tuple(nd["names"]))
        if rule in ("tt", "tt_bar", "dist", "dc"):
            return _tt_family(nd, kids)
        raise RuleError("deduction cannot rewrite a %s node that uses the axiom" % rule)

    out = _ded(proof)
    want = Sequent(
        proof.conclusion.context, w(proof.conclusion.lhs), proof.conclusion.rhs
    )
    if out.conclusion != want:
        raise RuleError("deduction produced %s" % out.conclusion)
    return out


# ----------------------------------------------------------- schema rendering

SCHEMA_NAMES = (
    "classical-distributivity",
    "classical-DC",
    "tt-axiom",
    "intuitionistic-distributivity-axiom",
    "intuitionistic-DC-axiom",
)


@dataclass
class SchemaInstance:
    name: str
    parameters: dict = field(repr=False)
    rendered: Sequent = None


def _auto_context(formulas):
    seen = {}
    for phi in formulas:
        for name, v in free_vars(phi).items():
            seen.setdefault(name, v)
    return tuple(seen.values())


def _check_matrix(gamma, matrix):
    if gamma < 1:
        raise RuleError("schema needs gamma >= 1")
    if len(matrix) != gamma or any(len(row) != gamma for row in matrix):
        raise RuleError("matrix must be gamma x gamma")


def classical_schema(name, gamma=None, matrix=None, chain=None, assignment=None,
                     context=None):
    """Render one of the displayed axiom schemata as a sequent."""
    if name == "classical-distributivity":
        _check_matrix(gamma, matrix)
        lhs = mk_and([mk_or([matrix[i][j] for j in range(gamma)]) for i in range(gamma)])
        rhs = mk_or([
            mk_and([matrix[i][f[i]] for i in range(gamma)])
            for f in itertools.product(range(gamma), repeat=gamma)
        ])
        params = {"gamma": gamma, "matrix": matrix}
    elif name == "classical-DC":
        chain = [(tuple(blk), body) for blk, body in chain]
        if not chain:
            raise RuleError("schema needs gamma >= 1")
        seen = set()
        for blk, _ in chain:
            names = {v.name for v in blk}
            if len(names) != len(blk) or names & seen:
                raise RuleError("quantifier blocks must be pairwise disjoint")
            seen |= names
        for a, (blk, _) in enumerate(chain):
            names = {v.name for v in blk}
            for b in range(a):
                if names & set(free_vars(chain[b][1])):
                    raise RuleError(
                        "block %d appears free in an earlier chain formula" % a
                    )
        lhs = mk_and([
            mk_forall(
                tuple(itertools.chain.from_iterable(b for b, _ in chain[:a])),
                mk_exists(chain[a][0], chain[a][1]),
            )
            for a in range(len(chain))
        ])
        rhs = mk_exists(
            tuple(itertools.chain.from_iterable(b for b, _ in chain)),
            mk_and([body for _, body in chain]),
        )
        params = {"gamma": len(chain), "chain": chain}
    elif name in ("tt-axiom", "intuitionistic-distributivity-axiom",
                  "intuitionistic-DC-axiom"):
        a = assignment
        a.validate()
        if name == "intuitionistic-distributivity-axiom" and any(
            a.block(f) for f in a.all_nodes()
        ):
            raise RuleError("the distributivity axiom has no quantifier blocks")
        if name == "intuitionistic-DC-axiom" and a.gamma != 1:
            raise RuleError("the dependent choice axiom is a unary chain")
        conjuncts = []
        for f in a.internal_nodes():
            step = Imp(
                a.labels[f],
                mk_or([
                    mk_exists(a.block(g), a.labels[g]) for g in a.children_of(f)
                ]),
            )
            conjuncts.append(mk_forall(a.path_blocks(f), step))
        lhs = mk_and(conjuncts)
        if name == "intuitionistic-DC-axiom":
            bottom = (0,) * a.height
            tail = mk_exists(a.path_blocks(bottom), a.labels[bottom])
        else:
            tail = mk_or([
                mk_exists(a.path_blocks(f), a.path_conjunction(f)) for f in a.leaves()
            ])
        rhs = Imp(a.labels[()], tail)
        params = {"assignment": a}
        if context is None:
            context = a.root_context
    else:
        raise RuleError("unknown schema %r" % name)
    if context is None:
        context = _auto_context((lhs, rhs))
    return SchemaInstance(name, params, Sequent(tuple(context), lhs, rhs))


# ----------------------------------------- classical distributivity, reduced


def equivl_assignment(gamma, matrix):
    """The tree assignment that turns the classical distributivity
    antecedent into distributivity-rule premises: root true, level d+1
    labeled by row d of the matrix, no quantifier blocks. Entries must be
    closed (the rule's free-variable provisos force this with a closed
    root)."""
    _check_matrix(gamma, matrix)
    labels = {(): TRUE}
    for depth in range(1, gamma + 1):
        for path in itertools.product(range(gamma), repeat=depth):
            entry = matrix[depth - 1][path[-1]]
            if free_vars(entry):
                raise RuleError(
                    "matrix entry %s is not closed" % print_formula(entry)
                )
            labels[path] = entry
    return TreeAssignment(gamma, gamma, labels, {}, ())


def classical_dist_proof(theory, gamma, matrix):
    """A proof of the classical distributivity instance from one
    distributivity-rule node, via the deduction lemma: the antecedent is
    assumed as a temporary axiom, the rule fires on the tree assignment,
    and the axiom is then discharged."""
    schema = classical_schema(
        "classical-distributivity", gamma=gamma, matrix=matrix, context=()
    )
    big = schema.rendered.lhs
    extended, idx = extend_theory(theory, big)
    a = equivl_assignment(gamma, matrix)
    ax = axiom_leaf(extended, idx)
    premises = []
    for f in a.internal_nodes():
        row = mk_or([matrix[len(f)][j] for j in range(gamma)])
        premises.append(cut_chain(
            true_intro((), a.labels[f]), ax, prove_implied_conj((), big, row)
        ))
    node = rule_node("dist", premises, assignment=a)
    ded = deduction(theory, big, node)
    pair = conj_intro((), big, [true_intro((), big), identity((), big)])
    got = cut2(pair, ded)
    leaves = a.leaves()
    olds = [a.path_conjunction(f) for f in leaves]
    news = [mk_and([matrix[i][f[i]] for i in range(gamma)]) for f in leaves]
    if len(leaves) == 1:
        return cut2(got, prove_implied_conj((), olds[0], news[0]))
    legs = [prove_implied_conj((), o, n) for o, n in zip(olds, news)]
    return cut2(got, disj_lift((), legs, tuple(news)))


# ------------------------------------------------------------- Morleyization


def _freed(binder):
    """Open a binder with deterministic fresh names (depends only on the
    formula, so the same subformula frees identically everywhere)."""
    taken = set(free_vars(binder.body))
    fresh = []
    i = 0
    for v in binder.block:
        while "_m%d" % i in taken:
            i += 1
        fresh.append(Var("_m%d" % i, v.sort))
        taken.add("_m%d" % i)
        i += 1
    repl = {v.name: u for v, u in zip(binder.block, fresh)}
    return tuple(fresh), substitute(binder.body, repl)


def subformula_set(theory, extra=()):
    """All subformulas of the theory's axioms (and extra sequents), in a
    deterministic first-visit order; binder bodies are freed with fresh
    variables before descending."""
    out = []
    seen = set()

    def visit(phi):
        if phi in seen:
            return
        seen.add(phi)
        out.append(phi)
        if isinstance(phi, (And, Or)):
            for p in phi.parts:
                visit(p)
        elif isinstance(phi, Imp):
            visit(phi.lhs)
            visit(phi.rhs)
        elif isinstance(phi, (Exists, Forall)):
            visit(_freed(phi)[1])

    for seq in tuple(theory.axioms) + tuple(extra):
        visit(seq.lhs)
        visit(seq.rhs)
    return tuple(out)


def _fresh_rel_names(prefix, count, signature):
    names = []
    for i in range(count):
        n = "%s%d" % (prefix, i)
        while n in signature.rels or n in signature.funcs:
            n = "_" + n
        names.append(n)
    return names


def coherent_symbols(theory):
    """Subformula -> new relation name for the coherent Morleyization."""
    formulas = subformula_set(theory)
    return dict(zip(formulas, _fresh_rel_names("P_", len(formulas), theory.signature)))


def coherent_morleyize(theory, fragment="coherent"):
    """The theory of (regular or coherent) models: one relation P_phi per
    subformula, with the axiom families

      (i)   P_phi -||- phi            for atomic phi
      (ii)  P_phi |- P_psi            for every axiom phi |- psi
      (iii) P_(AND phi_i) -||- AND P_phi_i
      (iv)  P_(exists y phi) -||- exists y P_phi
      (v)   P_(OR phi_i) -||- OR P_phi_i   (dropped for the regular case)
    """
    if fragment not in ("regular", "coherent"):
        raise ValueError("fragment must be regular or coherent")
    symbols = coherent_symbols(theory)
    rels = dict(theory.signature.rels)
    for phi, name in symbols.items():
        rels[name] = tuple(v.sort for v in canonical_context(phi))
    sig = Signature(theory.signature.sorts, dict(theory.signature.funcs), rels)

    def atom(phi):
        return Rel(symbols[phi], canonical_context(phi))

    def both(phi, rhs):
        ctx = canonical_context(phi)
        return [Sequent(ctx, atom(phi), rhs), Sequent(ctx, rhs, atom(phi))]

    axioms = []
    for phi in symbols:
        if isinstance(phi, (Rel, Eq)):
            axioms += both(phi, phi)
    for seq in theory.axioms:
        axioms.append(Sequent(seq.context, atom(seq.lhs), atom(seq.rhs)))
    for phi in symbols:
        if isinstance(phi, And):
            axioms += both(phi, And(tuple(atom(p) for p in phi.parts)))
    for phi in symbols:
        if isinstance(phi, Exists):
            fresh, body = _freed(phi)
            axioms += both(phi, mk_exists(fresh, atom(body)))
    if fragment == "coherent":
        for phi in symbols:
            if isinstance(phi, Or):
                axioms += both(phi, Or(tuple(atom(p) for p in phi.parts)))
    return Theory(sig, axioms, fragment, name=theory.name + "^m")


def classical_symbols(theory, goal):
    """Subformula -> (C name, D name) tables for the classical
    Morleyization over the axioms and the goal sequent."""
    formulas = subformula_set(theory, extra=(goal,))
    cnames = _fresh_rel_names("C_", len(formulas), theory.signature)
    dnames = _fresh_rel_names("D_", len(formulas), theory.signature)
    return dict(zip(formulas, cnames)), dict(zip(formulas, dnames))


def classical_morleyize(theory, goal):
    """The coherent theory whose models interpret C_phi as phi and D_phi
    as not-phi, for every subformula of the axioms and the goal. Axiom
    families (i)-(ix), in display order."""
    cmap, dmap = classical_symbols(theory, goal)
    rels = dict(theory.signature.rels)
    for phi in cmap:
        sorts = tuple(v.sort for v in canonical_context(phi))
        rels[cmap[phi]] = sorts
        rels[dmap[phi]] = sorts
    sig = Signature(theory.signature.sorts, dict(theory.signature.funcs), rels)

    def catom(phi):
        return Rel(cmap[phi], canonical_context(phi))

    def datom(phi):
        return Rel(dmap[phi], canonical_context(phi))

    def both(lhs, rhs, ctx):
        return [Sequent(ctx, lhs, rhs), Sequent(ctx, rhs, lhs)]

    axioms = []
    for phi in cmap:
        ctx = canonical_context(phi)
        axioms.append(Sequent(ctx, And((catom(phi), datom(phi))), FALSE))
    for phi in cmap:
        ctx = canonical_context(phi)
        axioms.append(Sequent(ctx, TRUE, Or((catom(phi), datom(phi)))))
    for phi in cmap:
        if isinstance(phi, (Rel, Eq)):
            axioms += both(catom(phi), phi, canonical_context(phi))
    for seq in theory.axioms:
        axioms.append(Sequent(seq.context, catom(seq.lhs), catom(seq.rhs)))
    for phi in cmap:
        if isinstance(phi, And):
            axioms += both(
                catom(phi), And(tuple(catom(p) for p in phi.parts)),
                canonical_context(phi),
            )
    for phi in cmap:
        if isinstance(phi, Or):
            axioms += both(
                catom(phi), Or(tuple(catom(p) for p in phi.parts)),
                canonical_context(phi),
            )
    for phi in cmap:
        if isinstance(phi, Imp):
            axioms += both(
                catom(phi), Or((datom(phi.lhs), catom(phi.rhs))),
                canonical_context(phi),
            )
    for phi in cmap:
        if isinstance(phi, Exists):
            fresh, body = _freed(phi)
            axioms += both(
                catom(phi), mk_exists(fresh, catom(body)), canonical_context(phi)
            )
    for phi in cmap:
        if isinstance(phi, Forall):
            fresh, body = _freed(phi)
            axioms += both(
                datom(phi), mk_exists(fresh, datom(body)), canonical_context(phi)
            )
    return Theory(sig, axioms, "coherent", name=theory.name + "^m")


# ---------------------------------------------------------- diagram encoders


def diagram_signature(structure):
    """Extend the structure's signature with one constant per element.
    Returns the signature and the (sort, element) -> constant name map."""
    sig = structure.signature
    funcs = dict(sig.funcs)
    consts = {}
    k = 0
    for s in sig.sorts:
        for e in structure.sorts[s]:
            name = "c%d" % k
            while name in funcs:
                name = "_" + name
            consts[(s, e)] = name
            funcs[name] = ((), s)
            k += 1
    return Signature(sig.sorts, funcs, dict(sig.rels)), consts


def positive_diagram(structure):
    """One sequent (true |- atom) per positive atomic fact of the
    structure, over the constant-extended signature: relation facts,
    reflexive equalities, and function-table rows."""
    sig = structure.signature
    _, consts = diagram_signature(structure)

    def c(s, e):
        return App(consts[(s, e)], (), s)

    out = []
    for r in sorted(sig.rels):
        sorts = sig.rels[r]
        for tup in sorted(structure.rels.get(r, ()), key=repr):
            args = tuple(c(s, e) for s, e in zip(sorts, tup))
            out.append(Sequent((), TRUE, Rel(r, args)))
    for s in sig.sorts:
        for e in structure.sorts[s]:
            out.append(Sequent((), TRUE, Eq(c(s, e), c(s, e))))
    for f in sorted(sig.funcs):
        args_sorts, res = sig.funcs[f]
        table = structure.funcs.get(f, {})
        for tup in sorted(table, key=repr):
            args = tuple(c(s, e) for s, e in zip(args_sorts, tup))
            out.append(Sequent((), TRUE, Eq(App(f, args, res), c(res, table[tup]))))
    return out


# ------------------------------------------------- branch and filter theories


def _tree_levels(tree):
    depth = {}

    def d(n, trail):
        if n in depth:
            return depth[n]
        if n in trail:
            raise ValueError("tree has a cycle through %r" % (n,))
        p = tree[n]
        if p is None:
            depth[n] = 0
        else:
            if p not in tree:
                raise ValueError("parent %r is not a tree node" % (p,))
            depth[n] = d(p, trail | {n}) + 1
        return depth[n]

    for n in tree:
        d(n, frozenset())
    height = max(depth.values())
    levels = [[] for _ in range(height + 1)]
    for n in sorted(tree, key=str):
        levels[depth[n]].append(n)
    return levels


def cofinal_branches(tree):
    """Maximal-depth root paths of a parent-map tree, as node tuples."""
    levels = _tree_levels(tree)
    out = []
    for leaf in levels[-1]:
        path = [leaf]
        while tree[path[-1]] is not None:
            path.append(tree[path[-1]])
        out.append(tuple(reversed(path)))
    return out


def encode_branch_theory(tree):
    """The theory of a cofinal branch of the tree (a parent map, roots at
    None): a unary P picks one node per level, consistently with the
    parent relation. Constants are named after the nodes."""
    levels = _tree_levels(tree)
    names = [str(n) for n in tree]
    if len(set(names)) != len(names):
        raise ValueError("node names must be distinct as strings")
    funcs = {str(n): ((), "node") for n in tree}
    sig = Signature(("node",), funcs, {"P": ("node",)})

    def atom(n):
        return Rel("P", (App(str(n), (), "node"),))

    axioms = []
    for level in levels:
        axioms.append(Sequent((), TRUE, mk_or([atom(n) for n in level])))
    for level in levels:
        for a, b in itertools.combinations(level, 2):
            axioms.append(Sequent((), And((atom(a), atom(b))), FALSE))
    for n in sorted(tree, key=str):
        if tree[n] is not None:
            axioms.append(Sequent((), atom(n), atom(tree[n])))
    return Theory(sig, axioms, "coherent", name="branch")


def constants_faithful(structure):
    """True when every carrier is exactly the constants, one element
    each. The branch and ultrafilter counting examples quantify over
    these term-carrier models."""
    sig = structure.signature
    for s in sig.sorts:
        vals = [
            structure.funcs[n][()]
            for n, (args, res) in sig.funcs.items()
            if args == () and res == s
        ]
        if len(set(vals)) != len(vals) or set(vals) != set(structure.sorts[s]):
            return False
    return True


def encode_ultrafilter_theory(lattice):
    """The theory of an ultrafilter in a finite complemented lattice:
    P is monotone, meet-closed (empty and binary meets generate the
    finite family axioms), total on complements, and proper."""
    elems = list(lattice.elements)
    comp = {}
    for a in elems:
        c = lattice.complement(a)
        if c is None:
            raise ValueError("ultrafilter encoding needs a complemented lattice")
        comp[a] = c
    name = {a: "a%d" % i for i, a in enumerate(elems)}
    funcs = {name[a]: ((), "elt") for a in elems}
    sig = Signature(("elt",), funcs, {"P": ("elt",)})

    def atom(a):
        return Rel("P", (App(name[a], (), "elt"),))

    axioms = []
    for a in elems:
        for b in elems:
            if a != b and lattice.leq(a, b):
                axioms.append(Sequent((), atom(a), atom(b)))
    axioms.append(Sequent((), TRUE, atom(lattice.top)))
    for a, b in itertools.combinations(elems, 2):
        axioms.append(
            Sequent((), And((atom(a), atom(b))), atom(lattice.meet(a, b)))
        )
    for a in elems:
        axioms.append(Sequent((), TRUE, Or((atom(a), atom(comp[a])))))
    axioms.append(Sequent((), atom(lattice.bottom), FALSE))
    return Theory(sig, axioms, "coherent", name="ultrafilter")
