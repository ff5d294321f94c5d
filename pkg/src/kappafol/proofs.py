"""Derived proof builders.

Everything here assembles plain kernel rules; no builder introduces a
sequent the kernel would reject. `rule_node` runs the kernel's own rule
checker to compute each conclusion, so a proof built from these helpers
is correct by construction (and `check_proof` re-verifies it anyway).
"""

from __future__ import annotations

from .kernel import RULES, Proof, RuleError, tt_premises, validate_bar
from .syntax import (
    And, Exists, FALSE, Imp, Or, Sequent, TRUE, free_vars, mk_exists, mk_or,
    print_formula, print_sequent,
)


class _Data(dict):
    def __missing__(self, key):
        raise RuleError("rule data misses field %r" % key)


def rule_node(rule, children=(), theory=None, **data):
    """Build a proof node, computing its conclusion with the kernel's
    checker for that rule."""
    checker, arity = RULES[rule]
    children = tuple(children)
    if arity is not None and len(children) != arity:
        raise RuleError("rule %s takes %s premises, got %d" % (rule, arity, len(children)))
    conclusion = checker(_Data(data), [c.conclusion for c in children], theory)
    return Proof(rule, conclusion, children, tuple(data.items()))


def identity(ctx, phi):
    return rule_node("id", context=tuple(ctx), formula=phi)


def axiom_leaf(theory, index):
    return rule_node("axiom", theory=theory, index=index)


def cut2(a, b):
    return rule_node("cut", (a, b))


def cut_chain(*proofs):
    out = proofs[0]
    for p in proofs[1:]:
        out = cut2(out, p)
    return out


def true_intro(ctx, phi):
    """phi |- true."""
    return rule_node("conj_intro", (), context=tuple(ctx), lhs=phi, parts=())


def false_elim(ctx, rhs):
    """false |- rhs."""
    return rule_node("disj_elim", (), context=tuple(ctx), rhs=rhs, parts=())


def proj(ctx, parts, j):
    return rule_node("conj_proj", context=tuple(ctx), parts=tuple(parts), j=j)


def inj(ctx, parts, j):
    return rule_node("disj_inj", context=tuple(ctx), parts=tuple(parts), j=j)


def conj_intro(ctx, lhs, children):
    return rule_node(
        "conj_intro", tuple(children), context=tuple(ctx), lhs=lhs,
        parts=tuple(c.conclusion.rhs for c in children),
    )


def disj_elim(ctx, rhs, children):
    return rule_node(
        "disj_elim", tuple(children), context=tuple(ctx), rhs=rhs,
        parts=tuple(c.conclusion.lhs for c in children),
    )


def and_true(ctx, phi):
    """phi |- phi and true (pairs with imp_up for modus ponens)."""
    return conj_intro(ctx, phi, [identity(ctx, phi), true_intro(ctx, phi)])


# -------------------------------------------------------- conjunction reshaping


def _conj_leaves(phi, path, acc):
    if isinstance(phi, And):
        for i, part in enumerate(phi.parts):
            _conj_leaves(part, path + (i,), acc)
    else:
        acc.setdefault(phi, path)


def conj_leaves(phi):
    """Leaves of the conjunction tree of phi, mapped to access paths."""
    acc = {}
    _conj_leaves(phi, (), acc)
    return acc


def _proj_path(ctx, src, path):
    out = None
    cur = src
    for i in path:
        step = proj(ctx, cur.parts, i)
        out = step if out is None else cut2(out, step)
        cur = cur.parts[i]
    return out


def prove_implied_conj(ctx, src, dst):
    """Proof of src |- dst when every conjunction leaf of dst occurs as a
    conjunction leaf of src (rebuilds dst with projections and
    introductions)."""
    ctx = tuple(ctx)
    if dst == src:
        return identity(ctx, src)
    leaves = conj_leaves(src)
    if dst in leaves:
        p = _proj_path(ctx, src, leaves[dst])
        if p is not None:
            return p
    if isinstance(dst, And):
        return conj_intro(ctx, src, [prove_implied_conj(ctx, src, part) for part in dst.parts])
    raise RuleError(
        "cannot reshape %s into %s: missing leaf" % (print_formula(src), print_formula(dst))
    )


# -------------------------------------------------------- disjunction plumbing


def disj_lift(ctx, children, rhs_parts, indices=None):
    """From proofs phi_i |- psi_{k_i} build (or phi_*) |- (or rhs_parts).

    `indices` gives k_i; identity mapping by default. The right side is
    the literal disjunction of rhs_parts (no collapsing)."""
    ctx = tuple(ctx)
    rhs_parts = tuple(rhs_parts)
    rhs = Or(rhs_parts)
    if indices is None:
        indices = range(len(children))
    lifted = []
    for p, k in zip(children, indices):
        if rhs_parts[k] != p.conclusion.rhs:
            raise RuleError("child proves %s, slot %d wants %s"
                            % (print_formula(p.conclusion.rhs), k, print_formula(rhs_parts[k])))
        lifted.append(cut2(p, inj(ctx, rhs_parts, k)))
    return disj_elim(ctx, rhs, lifted)


# -------------------------------------------------------- existential plumbing


def ex_intro(ctx, block, body):
    """body |- exists block body, in context ctx extended by block."""
    block = tuple(block)
    if not block:
        return identity(tuple(ctx), body)
    outer = tuple(ctx)
    ex = Exists(block, body)
    start = identity(outer, ex)
    return rule_node("ex_up", (start,), names=tuple(v.name for v in block))


def exists_mono(ctx, block, body_proof):
    """From A |- B in context ctx + block, conclude
    (exists block A) |- (exists block B) in context ctx."""
    block = tuple(block)
    if not block:
        return body_proof
    outer = tuple(ctx)
    b = body_proof.conclusion.rhs
    step = cut2(body_proof, ex_intro(outer, block, b))
    return rule_node("ex_down", (step,), block=block)


def forall_mono(ctx, block, body_proof):
    """From A |- B in context ctx + block with the block absent from A,
    conclude (all block A') |- (all block B): here A must not mention the
    block, i.e. this weakens under a universal on the right."""
    block = tuple(block)
    if not block:
        return body_proof
    return rule_node("all_down", (body_proof,), block=block)


def forall_instantiate(ctx, names, forall_proof):
    """From phi |- all block psi, open the block with the given names."""
    return rule_node("all_up", (forall_proof,), names=tuple(names))


# -------------------------------------------------------- tt from cut + leaves


def derive_tt_from_cut(assignment, premise_proofs, bar=None, ordering=None):
    """Rebuild the transfinite-transitivity conclusion from its premises
    using only cuts, conjunction and disjunction bookkeeping, and the
    small-distributivity and Frobenius leaves. No rule of the
    transitivity family appears in the result.

    `premise_proofs` align with the instance's premises (internal nodes
    in level order); with a bar only the proofs above the bar are used.
    """
    assignment.validate()
    internal = assignment.internal_nodes()
    if len(premise_proofs) != len(internal):
        raise RuleError("expected %d premise proofs" % len(internal))
    want = tt_premises(assignment)
    by_path = {}
    for f, p, w in zip(internal, premise_proofs, want):
        if p.conclusion != w:
            raise RuleError("premise proof for %s concludes %s, expected %s"
                            % (f, print_sequent(p.conclusion), print_sequent(w)))
        by_path[f] = p

    if bar is None:
        barset = set(assignment.leaves())
        ordered = sorted(barset)
    else:
        ordered = validate_bar(assignment, bar)
        barset = set(ordered)
    if ordering is not None:
        ordering = [tuple(p) for p in ordering]
        if sorted(ordering) != sorted(ordered):
            raise RuleError("ordering must permute the conclusion paths")
        ordered = ordering
    slot = {f: i for i, f in enumerate(ordered)}
    disj = [mk_exists(assignment.path_blocks(f), assignment.path_conjunction(f)) for f in ordered]
    goal = mk_or(disj)

    def visit(f):
        ctx = assignment.context(f)
        pc = assignment.path_conjunction(f)
        if f in barset:
            blocks = assignment.path_blocks(f)
            outer = ctx[: len(ctx) - len(blocks)] if blocks else ctx
            base = ex_intro(outer, blocks, pc)
            if len(disj) == 1:
                return base
            return cut2(base, inj(ctx, disj, slot[f]))
        if len(f) >= assignment.height:
            raise RuleError("path %s runs past the height without meeting the bar" % (f,))
        prem = by_path[f]
        start = prem if pc == assignment.labels[f] else cut2(
            prove_implied_conj(ctx, pc, assignment.labels[f]), prem)
        children = assignment.children_of(f)
        child_dis = [mk_exists(assignment.block(g), assignment.labels[g]) for g in children]

        def child_branch(g):
            blk = assignment.block(g)
            inner = And((pc, assignment.labels[g]))
            q = prove_implied_conj(assignment.context(g), inner, assignment.path_conjunction(g))
            r = cut2(q, visit(g))
            if blk:
                r = rule_node("ex_down", (r,), block=blk)
                frob = rule_node("frobenius", context=ctx, phi=pc,
                                 exists=Exists(blk, assignment.labels[g]))
                r = cut2(frob, r)
            return r

        paired = conj_intro(ctx, pc, [identity(ctx, pc), start])
        if len(children) == 1:
            return cut2(paired, child_branch(children[0]))
        sd = rule_node("small_dist", context=ctx, phi=pc, parts=tuple(child_dis))
        elim = disj_elim(ctx, goal, [child_branch(g) for g in children])
        return cut_chain(paired, sd, elim)

    return visit(())
