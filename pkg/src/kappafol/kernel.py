"""Sequent-calculus proof kernel.

Proofs are explicit trees: every node carries its rule name, the full
instantiation data for that rule, its stated conclusion, and its premise
subproofs. `check_proof` re-derives each node's conclusion from its data
and its children's conclusions and compares, so a proof object can never
smuggle in an unjustified sequent.

Double-line rules appear as two rule names (`imp_down`/`imp_up`,
`ex_down`/`ex_up`, `all_down`/`all_up`); the `_down` direction reads the
displayed rule top to bottom. The transfinite-transitivity family
(`tt`, `tt_bar`, `dist`, `dc`, `choice`) takes a `TreeAssignment`
describing a full branching tree of labelled nodes with quantifier
blocks; at finite height every level is a successor level, so the
limit-level premises of the general rule have no instances here.

Small distributivity and Frobenius are accepted as axiom leaves in every
fragment whose formulas admit them; in the full first-order fragment
they are also derivable (see `proofs.small_dist_derived` and
`proofs.frobenius_derived`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import sexp
from .syntax import (
    And, Eq, Exists, FALSE, Forall, Imp, Not, Or, Sequent, TRUE, Var,
    check_sequent, free_vars, mk_and, mk_exists, mk_or, term_vars, tuple_eq,
    formula_to_sexp, formula_fragment_violation, parse_context, print_formula,
    print_sequent, sequent_to_sexp, substitute, RESERVED_PREFIX,
    parse_sequent, _parse_formula, _parse_term, _term_sexp, _block_sexp, _scope_of,
)


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Proof:
    rule: str
    conclusion: Sequent
    children: tuple = ()
    data: tuple = ()  # sorted tuple of (key, value) pairs

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "data", tuple(sorted(dict(self.data).items())))

    def __getitem__(self, key):
        for k, v in self.data:
            if k == key:
                return v
        raise KeyError(key)

    def size(self):
        return 1 + sum(c.size() for c in self.children)


def node(rule, conclusion, children=(), **data):
    return Proof(rule, conclusion, tuple(children), tuple(data.items()))


# ---------------------------------------------------------------- tree assignments


class TreeAssignment:
    """Labels and quantifier blocks on the full `gamma`-branching tree of
    height `height`. Nodes are tuples over range(gamma); the root is ().

    Provisos enforced by `validate`: for every non-root node g with parent
    f, FV(label(g)) = FV(label(f)) + block(g) with block(g) fresh for
    label(f); contexts grow by exactly the blocks; the root context covers
    the root label's free variables.
    """

    def __init__(self, gamma, height, labels, blocks=None, root_context=()):
        self.gamma = int(gamma)
        self.height = int(height)
        self.labels = dict(labels)
        self.blocks = {k: tuple(v) for k, v in (blocks or {}).items()}
        self.root_context = tuple(root_context)

    # -- node bookkeeping

    def levels(self):
        return [self.level_nodes(d) for d in range(self.height + 1)]

    def level_nodes(self, depth):
        return [tuple(p) for p in itertools.product(range(self.gamma), repeat=depth)]

    def all_nodes(self):
        return [p for d in range(self.height + 1) for p in self.level_nodes(d)]

    def internal_nodes(self):
        return [p for d in range(self.height) for p in self.level_nodes(d)]

    def leaves(self):
        return self.level_nodes(self.height)

    def children_of(self, f):
        return [f + (j,) for j in range(self.gamma)]

    def block(self, f):
        return self.blocks.get(f, ())

    def context(self, f):
        ctx = list(self.root_context)
        for i in range(1, len(f) + 1):
            ctx.extend(self.block(f[:i]))
        return tuple(ctx)

    def path_blocks(self, f):
        out = []
        for i in range(1, len(f) + 1):
            out.extend(self.block(f[:i]))
        return tuple(out)

    def path_conjunction(self, f):
        return mk_and(tuple(self.labels[f[:i]] for i in range(len(f) + 1)))

    def validate(self):
        if self.gamma < 1:
            raise RuleError("branching must be at least 1")
        if self.height < 0:
            raise RuleError("height must be nonnegative")
        nodes = set(self.all_nodes())
        if set(self.labels) != nodes:
            raise RuleError("labels must cover exactly the tree nodes")
        stray = set(self.blocks) - (nodes - {()})
        if stray or self.blocks.get(()):
            raise RuleError("blocks must sit on non-root tree nodes")
        for v in list(self.root_context) + [v for b in self.blocks.values() for v in b]:
            if v.name.startswith(RESERVED_PREFIX):
                raise RuleError("assignment variable %s uses a reserved name" % v.name)
        root_names = {v.name for v in self.root_context}
        missing = set(free_vars(self.labels[()])) - root_names
        if missing:
            raise RuleError("root context misses free variables %s" % sorted(missing))
        for f in self.all_nodes():
            if f == ():
                continue
            parent = f[:-1]
            blk = self.block(f)
            blk_names = {v.name for v in blk}
            if len(blk_names) != len(blk):
                raise RuleError("repeated variable in block at %s" % (f,))
            parent_fv = set(free_vars(self.labels[parent]))
            if blk_names & parent_fv:
                raise RuleError("block at %s reuses free variables of the parent label" % (f,))
            want = parent_fv | blk_names
            got = set(free_vars(self.labels[f]))
            if got != want:
                raise RuleError(
                    "label at %s has free variables %s, provisos require %s"
                    % (f, sorted(got), sorted(want))
                )
            ctx_names = [v.name for v in self.context(f)]
            if len(set(ctx_names)) != len(ctx_names):
                raise RuleError("context at %s repeats a variable" % (f,))


def validate_bar(assignment, bar):
    """A bar is an antichain of nodes met by every root-to-leaf path."""
    bar = [tuple(b) for b in bar]
    nodes = set(assignment.all_nodes())
    for b in bar:
        if b not in nodes:
            raise RuleError("bar node %s outside the tree" % (b,))
    barset = set(bar)
    if len(barset) != len(bar):
        raise RuleError("bar repeats a node")
    for b in bar:
        for i in range(len(b)):
            if b[:i] in barset:
                raise RuleError("bar node %s has a proper prefix in the bar" % (b,))
    for leaf in assignment.leaves():
        if not any(leaf[: len(b)] == b for b in bar):
            raise RuleError("path %s never meets the bar" % (leaf,))
    return sorted(barset)


def tt_premises(assignment):
    out = []
    for f in assignment.internal_nodes():
        disjuncts = [
            mk_exists(assignment.block(g), assignment.labels[g]) for g in assignment.children_of(f)
        ]
        out.append(Sequent(assignment.context(f), assignment.labels[f], mk_or(disjuncts)))
    return out


def _tt_disjunct(assignment, f):
    return mk_exists(assignment.path_blocks(f), assignment.path_conjunction(f))


def tt_rule_instance(assignment, ordering=None):
    """Premises and conclusion of the transfinite-transitivity rule."""
    assignment.validate()
    paths = assignment.leaves()
    if ordering is not None:
        ordering = [tuple(p) for p in ordering]
        if sorted(ordering) != sorted(paths):
            raise RuleError("ordering must permute the bottom-level paths")
        paths = ordering
    conclusion = Sequent(
        assignment.root_context,
        assignment.labels[()],
        mk_or([_tt_disjunct(assignment, f) for f in paths]),
    )
    return tt_premises(assignment), conclusion


def tt_bar_instance(assignment, bar, ordering=None):
    """Bar variant: the conclusion disjoins over the bar's minimal nodes."""
    assignment.validate()
    bar = validate_bar(assignment, bar)
    if ordering is not None:
        ordering = [tuple(p) for p in ordering]
        if sorted(ordering) != sorted(bar):
            raise RuleError("ordering must permute the bar")
        bar = ordering
    conclusion = Sequent(
        assignment.root_context,
        assignment.labels[()],
        mk_or([_tt_disjunct(assignment, f) for f in bar]),
    )
    return tt_premises(assignment), conclusion


def dist_rule_instance(assignment, ordering=None):
    """Distributivity rule: transfinite transitivity with empty blocks."""
    if any(assignment.block(f) for f in assignment.all_nodes()):
        raise RuleError("distributivity rule requires empty quantifier blocks")
    return tt_rule_instance(assignment, ordering)


def dc_rule_instance(assignment):
    """Dependent choice: unary branching; the conclusion keeps only the
    final label under the existential closure of all blocks."""
    if assignment.gamma != 1:
        raise RuleError("dependent choice requires unary branching")
    assignment.validate()
    premises = tt_premises(assignment)
    bottom = (0,) * assignment.height
    conclusion = Sequent(
        assignment.root_context,
        assignment.labels[()],
        mk_exists(assignment.path_blocks(bottom), assignment.labels[bottom]),
    )
    return premises, conclusion


def choice_chain(phi, items, context):
    """Chain encoding of the rule of choice: level 0 is `phi`, level b+1
    conjoins `phi` with the first b+1 chosen formulas."""
    items = [(tuple(blk), body) for blk, body in items]
    labels = {(): phi}
    blocks = {}
    for b, (blk, body) in enumerate(items):
        labels[(0,) * (b + 1)] = And((phi,) + tuple(it[1] for it in items[: b + 1]))
        blocks[(0,) * (b + 1)] = blk
    return TreeAssignment(1, len(items), labels, blocks, context)


def choice_rule_instance(phi, items, context):
    """Rule of choice, emitted as the dependent-choice instance of its
    chain encoding. The matching single-premise form is
    phi |- AND_b exists x_b phi_b; see `transforms.choice_premise`."""
    return dc_rule_instance(choice_chain(phi, items, context))


def specialized_rules(kind, *args, **kw):
    emitters = {
        "distributivity": dist_rule_instance,
        "dependent-choice": dc_rule_instance,
        "choice": choice_rule_instance,
    }
    if kind not in emitters:
        raise RuleError("unknown specialized rule %r" % kind)
    return emitters[kind](*args, **kw)


# ---------------------------------------------------------------- rule checkers

# Each checker: (node, premises: list of Sequent, theory) -> canonical conclusion.


def _ctx_names(ctx):
    return [v.name for v in ctx]


def _need(cond, msg):
    if not cond:
        raise RuleError(msg)


def _check_context(ctx):
    for v in ctx:
        _need(isinstance(v, Var), "context entries must be variables")
        _need(not v.name.startswith(RESERVED_PREFIX), "context variable %s uses a reserved name" % v.name)
    names = _ctx_names(ctx)
    _need(len(set(names)) == len(names), "context repeats a variable")
    return tuple(ctx)


def _r_id(nd, prem, th):
    ctx = _check_context(nd["context"])
    return Sequent(ctx, nd["formula"], nd["formula"])


def _r_axiom(nd, prem, th):
    i = nd["index"]
    _need(0 <= i < len(th.axioms), "axiom index %s out of range" % i)
    return th.axioms[i]


def _r_sub(nd, prem, th):
    (p,) = prem
    sub = dict(nd["sub"])
    ctx = _check_context(nd["context"])
    have = {v.name: v for v in ctx}
    prem_names = set(_ctx_names(p.context))
    for k in sub:
        _need(k in prem_names, "substitution key %s not in the premise context" % k)
    for v in p.context:
        t = sub.get(v.name)
        if t is None:
            _need(v.name in have and have[v.name].sort == v.sort,
                  "untouched variable %s missing from the new context" % v.name)
        else:
            _need(getattr(t, "sort") == v.sort, "substituting sort %s term for %s" % (t.sort, v))
            for w in term_vars(t).values():
                _need(w.name in have and have[w.name].sort == w.sort,
                      "term variable %s missing from the new context" % w.name)
    return Sequent(ctx, substitute(p.lhs, sub), substitute(p.rhs, sub))


def _r_cut(nd, prem, th):
    a, b = prem
    _need(a.context == b.context, "cut premises must share a context")
    _need(a.rhs == b.lhs, "cut formula mismatch: %s vs %s" % (print_formula(a.rhs), print_formula(b.lhs)))
    return Sequent(a.context, a.lhs, b.rhs)


def _r_eq_refl(nd, prem, th):
    v = nd["var"]
    return Sequent((v,), TRUE, Eq(v, v))


def _r_eq_sub(nd, prem, th):
    xs, ys, phi = tuple(nd["xs"]), tuple(nd["ys"]), nd["phi"]
    ctx = _check_context(nd["context"])
    _need(len(xs) == len(ys) and xs, "equality substitution needs equally long nonempty tuples")
    _need(len({v.name for v in xs}) == len(xs), "left tuple repeats a variable")
    for x, y in zip(xs, ys):
        _need(x.sort == y.sort, "equality between sorts %s and %s" % (x.sort, y.sort))
    eqs = tuple_eq(xs, ys)
    repl = {x.name: y for x, y in zip(xs, ys)}
    return Sequent(ctx, And((eqs, phi)), substitute(phi, repl))


def _r_conj_proj(nd, prem, th):
    parts, j = tuple(nd["parts"]), nd["j"]
    ctx = _check_context(nd["context"])
    _need(0 <= j < len(parts), "projection index out of range")
    return Sequent(ctx, And(parts), parts[j])


def _r_conj_intro(nd, prem, th):
    parts = tuple(nd["parts"])
    ctx = _check_context(nd["context"])
    lhs = nd["lhs"]
    _need(len(prem) == len(parts), "conjunction introduction arity mismatch")
    for p, want in zip(prem, parts):
        _need(p.context == ctx, "premise context differs")
        _need(p.lhs == lhs, "premise left side differs")
        _need(p.rhs == want, "premise proves %s, expected %s" % (print_formula(p.rhs), print_formula(want)))
    return Sequent(ctx, lhs, And(parts))


def _r_disj_inj(nd, prem, th):
    parts, j = tuple(nd["parts"]), nd["j"]
    ctx = _check_context(nd["context"])
    _need(0 <= j < len(parts), "injection index out of range")
    return Sequent(ctx, parts[j], Or(parts))


def _r_disj_elim(nd, prem, th):
    parts = tuple(nd["parts"])
    ctx = _check_context(nd["context"])
    rhs = nd["rhs"]
    _need(len(prem) == len(parts), "disjunction elimination arity mismatch")
    for p, want in zip(prem, parts):
        _need(p.context == ctx, "premise context differs")
        _need(p.rhs == rhs, "premise right side differs")
        _need(p.lhs == want, "premise assumes %s, expected %s" % (print_formula(p.lhs), print_formula(want)))
    return Sequent(ctx, Or(parts), rhs)


def _r_imp_down(nd, prem, th):
    (p,) = prem
    _need(isinstance(p.lhs, And) and len(p.lhs.parts) == 2, "premise left side must be a binary conjunction")
    phi, psi = p.lhs.parts
    return Sequent(p.context, phi, Imp(psi, p.rhs))


def _r_imp_up(nd, prem, th):
    (p,) = prem
    _need(isinstance(p.rhs, Imp), "premise right side must be an implication")
    return Sequent(p.context, And((p.lhs, p.rhs.lhs)), p.rhs.rhs)


def _split_suffix(ctx, block):
    block = tuple(block)
    _need(block, "empty quantifier block")
    _need(len(ctx) >= len(block) and tuple(ctx[-len(block):]) == block,
          "context must end with the quantified block")
    return tuple(ctx[: -len(block)])


def _r_ex_down(nd, prem, th):
    (p,) = prem
    block = tuple(nd["block"])
    outer = _split_suffix(p.context, block)
    names = {v.name for v in block}
    _need(not (names & set(free_vars(p.rhs))), "quantified variable free in the right side")
    return Sequent(outer, Exists(block, p.lhs), p.rhs)


def _open_block(binder, names, ctx):
    names = tuple(names)
    _need(len(names) == len(binder.block), "opening arity mismatch")
    _need(len(set(names)) == len(names), "opening repeats a name")
    ctxnames = set(_ctx_names(ctx))
    for n in names:
        _need(n not in ctxnames, "opened variable %s collides with the context" % n)
        _need(not n.startswith(RESERVED_PREFIX), "opened variable %s uses a reserved name" % n)
    fresh = tuple(Var(n, v.sort) for n, v in zip(names, binder.block))
    opened = substitute(binder.body, {v.name: w for v, w in zip(binder.block, fresh)})
    return fresh, opened


def _r_ex_up(nd, prem, th):
    (p,) = prem
    _need(isinstance(p.lhs, Exists), "premise left side must be existential")
    fresh, opened = _open_block(p.lhs, nd["names"], p.context)
    return Sequent(tuple(p.context) + fresh, opened, p.rhs)


def _r_all_down(nd, prem, th):
    (p,) = prem
    block = tuple(nd["block"])
    outer = _split_suffix(p.context, block)
    names = {v.name for v in block}
    _need(not (names & set(free_vars(p.lhs))), "quantified variable free in the left side")
    return Sequent(outer, p.lhs, Forall(block, p.rhs))


def _r_all_up(nd, prem, th):
    (p,) = prem
    _need(isinstance(p.rhs, Forall), "premise right side must be universal")
    fresh, opened = _open_block(p.rhs, nd["names"], p.context)
    return Sequent(tuple(p.context) + fresh, p.lhs, opened)


def _r_small_dist(nd, prem, th):
    phi, parts = nd["phi"], tuple(nd["parts"])
    ctx = _check_context(nd["context"])
    return Sequent(ctx, And((phi, Or(parts))), Or(tuple(And((phi, p)) for p in parts)))


def _r_frobenius(nd, prem, th):
    phi, ex = nd["phi"], nd["exists"]
    ctx = _check_context(nd["context"])
    _need(isinstance(ex, Exists), "frobenius needs an existential formula")
    return Sequent(ctx, And((phi, ex)), Exists(ex.block, And((phi, ex.body))))


def _r_em(nd, prem, th):
    phi = nd["phi"]
    ctx = _check_context(nd["context"])
    return Sequent(ctx, TRUE, Or((phi, Not(phi))))


def _assignment_of(nd):
    ta = nd["assignment"]
    _need(isinstance(ta, TreeAssignment), "assignment payload missing")
    return ta


def _match_premises(got, want):
    _need(len(got) == len(want), "expected %d premises, got %d" % (len(want), len(got)))
    for g, w in zip(got, want):
        _need(g == w, "premise %s differs from required %s" % (print_sequent(g), print_sequent(w)))


def _r_tt(nd, prem, th):
    want, conclusion = tt_rule_instance(_assignment_of(nd), nd.get("ordering"))
    _match_premises(prem, want)
    return conclusion


def _r_tt_bar(nd, prem, th):
    want, conclusion = tt_bar_instance(_assignment_of(nd), nd["bar"], nd.get("ordering"))
    _match_premises(prem, want)
    return conclusion


def _r_dist(nd, prem, th):
    want, conclusion = dist_rule_instance(_assignment_of(nd), nd.get("ordering"))
    _match_premises(prem, want)
    return conclusion


def _r_dc(nd, prem, th):
    want, conclusion = dc_rule_instance(_assignment_of(nd))
    _match_premises(prem, want)
    return conclusion


def _r_choice(nd, prem, th):
    want, conclusion = choice_rule_instance(nd["phi"], nd["items"], nd["context"])
    _match_premises(prem, want)
    return conclusion


RULES = {
    "id": (_r_id, 0),
    "axiom": (_r_axiom, 0),
    "sub": (_r_sub, 1),
    "cut": (_r_cut, 2),
    "eq_refl": (_r_eq_refl, 0),
    "eq_sub": (_r_eq_sub, 0),
    "conj_proj": (_r_conj_proj, 0),
    "conj_intro": (_r_conj_intro, None),
    "disj_inj": (_r_disj_inj, 0),
    "disj_elim": (_r_disj_elim, None),
    "imp_down": (_r_imp_down, 1),
    "imp_up": (_r_imp_up, 1),
    "ex_down": (_r_ex_down, 1),
    "ex_up": (_r_ex_up, 1),
    "all_down": (_r_all_down, 1),
    "all_up": (_r_all_up, 1),
    "small_dist": (_r_small_dist, 0),
    "frobenius": (_r_frobenius, 0),
    "em": (_r_em, 0),
    "tt": (_r_tt, None),
    "tt_bar": (_r_tt_bar, None),
    "dist": (_r_dist, None),
    "dc": (_r_dc, None),
    "choice": (_r_choice, None),
}

_FIRST_ORDER_ONLY = {"imp_down", "imp_up", "all_down", "all_up"}


@dataclass
class CheckResult:
    ok: bool
    errors: list = field(default_factory=list)  # (path string, message)
    nodes: int = 0
    rules_used: dict = field(default_factory=dict)

    def report(self):
        lines = ["checked %d nodes: %s" % (self.nodes, "ok" if self.ok else "INVALID")]
        for path, msg in self.errors:
            lines.append("  at %s: %s" % (path or "root", msg))
        return "\n".join(lines)


class _GetDataProxy:
    """Dict-style view of a proof node's data with .get support."""

    def __init__(self, proof):
        self._d = dict(proof.data)

    def __getitem__(self, k):
        if k not in self._d:
            raise RuleError("rule data misses field %r" % k)
        return self._d[k]

    def get(self, k, default=None):
        return self._d.get(k, default)


def check_proof(proof, theory):
    """Re-derive every node; collect per-node diagnostics."""
    result = CheckResult(ok=True)

    def walk(p, path):
        result.nodes += 1
        result.rules_used[p.rule] = result.rules_used.get(p.rule, 0) + 1
        for i, c in enumerate(p.children):
            walk(c, path + (i,))
        spot = ".".join(map(str, path))
        if p.rule not in RULES:
            result.errors.append((spot, "unknown rule %r" % p.rule))
            return
        checker, arity = RULES[p.rule]
        if arity is not None and len(p.children) != arity:
            result.errors.append((spot, "rule %s takes %s premises, got %d" % (p.rule, arity, len(p.children))))
            return
        if p.rule == "em" and theory.fragment != "first-order+EM":
            result.errors.append((spot, "excluded middle outside the first-order+EM fragment"))
            return
        if p.rule in _FIRST_ORDER_ONLY and theory.fragment not in ("first-order", "first-order+EM"):
            result.errors.append((spot, "rule %s outside the %s fragment" % (p.rule, theory.fragment)))
            return
        try:
            want = checker(_GetDataProxy(p), [c.conclusion for c in p.children], theory)
        except (RuleError, ValueError) as e:
            result.errors.append((spot, str(e)))
            return
        if want != p.conclusion:
            result.errors.append(
                (spot, "stated %s, rule gives %s" % (print_sequent(p.conclusion), print_sequent(want)))
            )
            return
        bad = formula_fragment_violation(p.conclusion.lhs, theory.fragment) or formula_fragment_violation(
            p.conclusion.rhs, theory.fragment
        )
        if bad:
            result.errors.append((spot, "conclusion outside the %s fragment: %s" % (theory.fragment, bad)))
            return
        try:
            check_sequent(p.conclusion, theory.signature)
        except Exception as e:
            result.errors.append((spot, "ill-sorted conclusion: %s" % e))

    walk(proof, ())
    result.ok = not result.errors
    return result


# ---------------------------------------------------------------- proof serialization

# Formulas inside rule data may mention free variables, so the reader
# resolves them against the variable-valued fields of the same node
# (context, block, xs, ys, var); those fields are read in a first pass.

_VAR_FIELDS = ("context", "block", "xs", "ys", "var")


def _assignment_to_sexp(ta):
    out = [
        "tree-assignment",
        ["gamma", str(ta.gamma)],
        ["height", str(ta.height)],
        ["root-context"] + _block_sexp(ta.root_context),
    ]
    for f in ta.all_nodes():
        out.append(
            ["node", ["path"] + [str(i) for i in f], ["block"] + _block_sexp(ta.block(f)),
             formula_to_sexp(ta.labels[f])]
        )
    return out


def _value_to_sexp(rule, key, value):
    if key in ("context", "block", "xs", "ys"):
        return ["vars"] + _block_sexp(value)
    if key in ("formula", "phi", "rhs", "lhs", "body", "exists"):
        return ["formula", formula_to_sexp(value)]
    if key == "parts":
        return ["formulas"] + [formula_to_sexp(p) for p in value]
    if key in ("j", "index"):
        return ["int", str(value)]
    if key == "var":
        return ["vars"] + _block_sexp([value])
    if key == "names":
        return ["names"] + list(value)
    if key == "sub":
        return ["subst"] + [[k, _term_sexp(t)] for k, t in sorted(dict(value).items())]
    if key == "assignment":
        return _assignment_to_sexp(value)
    if key in ("bar", "ordering"):
        return ["paths"] + [["path"] + [str(i) for i in p] for p in value]
    if key == "items":
        return ["items"] + [[["vars"] + _block_sexp(blk), formula_to_sexp(body)] for blk, body in value]
    raise ValueError("no encoding for %s.%s" % (rule, key))


def proof_to_sexp(p):
    out = ["proof", p.rule, sequent_to_sexp(p.conclusion)]
    for k, v in p.data:
        out.append(["with", k, _value_to_sexp(p.rule, k, v)])
    for c in p.children:
        out.append(proof_to_sexp(c))
    return out


def print_proof(p):
    return sexp.dumps_pretty(proof_to_sexp(p))


def _assignment_from_sexp(node, sig):
    gamma = height = 0
    root_context = ()
    raw_labels, blocks = {}, {}
    for item in node[1:]:
        if item[0] == "gamma":
            gamma = int(item[1])
        elif item[0] == "height":
            height = int(item[1])
        elif item[0] == "root-context":
            root_context = parse_context(item[1:])
        elif item[0] == "node":
            path = tuple(int(i) for i in item[1][1:])
            blk = parse_context(item[2][1:])
            raw_labels[path] = item[3]
            if blk:
                blocks[path] = blk
        else:
            raise ValueError("unknown tree-assignment item %s" % sexp.dumps(item))
    labels = {}
    for path, raw in raw_labels.items():
        scope = _scope_of(root_context)
        for i in range(1, len(path) + 1):
            scope.update(_scope_of(blocks.get(path[:i], ())))
        labels[path] = _parse_formula(raw, sig, scope)
    return TreeAssignment(gamma, height, labels, blocks, root_context)


def _value_from_sexp(key, node, sig, scope):
    head = node[0]
    if head == "vars":
        ctx = parse_context(node[1:])
        return ctx[0] if key == "var" else ctx
    if head == "formula":
        return _parse_formula(node[1], sig, scope)
    if head == "formulas":
        return tuple(_parse_formula(n, sig, scope) for n in node[1:])
    if head == "int":
        return int(node[1])
    if head == "names":
        return tuple(node[1:])
    if head == "subst":
        return {k: _parse_term(t, sig, scope) for k, t in node[1:]}
    if head == "paths":
        return tuple(tuple(int(i) for i in p[1:]) for p in node[1:])
    if head == "items":
        out = []
        inner = dict(scope)
        for b, f in node[1:]:
            blk = parse_context(b[1:])
            inner.update(_scope_of(blk))
            out.append((blk, _parse_formula(f, sig, inner)))
        return tuple(out)
    if head == "tree-assignment":
        return _assignment_from_sexp(node, sig)
    raise ValueError("unknown payload head %r" % head)


def proof_from_sexp(node, sig):
    if isinstance(node, str):
        node = sexp.loads(node)
    if not node or node[0] != "proof":
        raise ValueError("expected (proof rule (seq ...) ...)")
    rule = node[1]
    conclusion = parse_sequent(node[2], sig)
    raw = []
    children = []
    for item in node[3:]:
        if item and item[0] == "with":
            raw.append((item[1], item[2]))
        elif item and item[0] == "proof":
            children.append(proof_from_sexp(item, sig))
        else:
            raise ValueError("unexpected proof item %s" % sexp.dumps(item))
    scope = _scope_of(conclusion.context)
    data = {}
    for key, payload in raw:
        if key in _VAR_FIELDS:
            data[key] = _value_from_sexp(key, payload, sig, scope)
            vs = (data[key],) if key == "var" else data[key]
            scope.update(_scope_of(vs))
    for key, payload in raw:
        if key not in _VAR_FIELDS:
            data[key] = _value_from_sexp(key, payload, sig, scope)
    return Proof(rule, conclusion, tuple(children), tuple(data.items()))
