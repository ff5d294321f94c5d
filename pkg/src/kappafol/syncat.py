"""Formulas-in-context as a category, over a pluggable entailment oracle.

Objects are alpha-normal formulas in context, morphisms are formulas
relating a source context to a target context, and every categorical
fact (morphism validity, iso/mono status, subobject order) is decided by
asking an oracle whether certain sequents follow from the theory. Three
oracles are provided: exhaustive finite-model search (complete only
relative to its size bound), bounded forward proof search through the
kernel (sound, incomplete), and the combination of the two.
"""

import itertools

from .kernel import check_proof
from .proofs import (
    axiom_leaf, conj_intro, cut2, disj_elim, false_elim, identity, inj,
    proj, rule_node, true_intro,
)
from .setmodels import enumerate_models, model_check
from .syntax import (
    And, Eq, Exists, Forall, Imp, Or, Rel, Sequent, Var, check_formula,
    formula_fragment_violation, free_vars, mk_and, mk_exists, mk_forall,
    mk_or, substitute, tuple_eq,
)

__all__ = [
    "YES", "NO", "UNKNOWN", "SyncatError",
    "SemanticOracle", "ProofSearchOracle", "CombinedOracle",
    "SynObject", "syn_object", "SynMorphism", "morphism", "target_vars",
    "functionality_sequents", "verify_morphism", "identity_morphism",
    "compose", "transpose", "equal_morphisms", "classify",
    "subobject_normal_form", "subobject_leq", "inclusion",
    "product", "product_mediator", "equalizer", "equalizer_mediator",
    "image", "union", "forall_along", "construct",
]

YES = "yes"
NO = "no"
UNKNOWN = "unknown"


class SyncatError(ValueError):
    pass


def _fresh_name(stem, taken):
    i = 0
    while "%s%d" % (stem, i) in taken:
        i += 1
    return "%s%d" % (stem, i)


def _combine(verdicts):
    """All three morphism conditions must hold; a single no sinks it."""
    verdicts = tuple(verdicts)
    if NO in verdicts:
        return NO
    if UNKNOWN in verdicts:
        return UNKNOWN
    return YES


# ----------------------------------------------------------------- oracles


def _alpha_sequent(seq):
    """Rename the context positionally so alpha-variant queries share a
    memo slot. Bound variables are already canonical."""
    ren = {v.name: Var("c%d" % i, v.sort) for i, v in enumerate(seq.context)}
    ctx = tuple(Var("c%d" % i, v.sort) for i, v in enumerate(seq.context))
    return Sequent(ctx, substitute(seq.lhs, ren), substitute(seq.rhs, ren))


class _Oracle:
    """Memoized decision procedure for (theory, sequent) queries."""

    def __init__(self):
        self._memo = {}

    def _theory_key(self, theory):
        sig = theory.signature
        return (theory.name, theory.fragment, theory.axioms, sig.sorts,
                tuple(sorted(sig.funcs.items())), tuple(sorted(sig.rels.items())))

    def decide(self, theory, seq):
        key = (self._theory_key(theory), _alpha_sequent(seq))
        got = self._memo.get(key)
        if got is None:
            got = self._decide(theory, key[1])
            self._memo[key] = got
        return got


class SemanticOracle(_Oracle):
    """Exhaustive check over finite models with carriers up to `bound`.

    A countermodel is a definitive no (the kernel is sound for these
    models); the yes answer asserts only that no countermodel exists
    within the bound, which is complete for propositional coherent
    theories once the bound is at least zero."""

    def __init__(self, bound=2):
        _Oracle.__init__(self)
        self.bound = bound

    def _decide(self, theory, seq):
        for st in enumerate_models(theory, self.bound):
            if not model_check(st, seq):
                return NO
        return YES


class ProofSearchOracle(_Oracle):
    """Bounded forward saturation through the kernel rules.

    Seeds identities, axiom instances, equality and quantifier facts,
    then closes under cut and the lattice rules until the goal appears or
    the budget runs out. Every yes is backed by a proof object that the
    kernel re-checks, so a yes is never wrong; anything unreached is
    reported unknown."""

    def __init__(self, budget=1500, instance_cap=64):
        _Oracle.__init__(self)
        self.budget = budget
        self.instance_cap = instance_cap
        self.certificates = {}

    def _decide(self, theory, seq):
        proof = self._search(theory, seq)
        if proof is None:
            return UNKNOWN
        report = check_proof(proof, theory)
        if not report.ok:
            return UNKNOWN
        self.certificates[(self._theory_key(theory), seq)] = proof
        return YES

    def _search(self, theory, seq):
        ctx = tuple(seq.context)
        scope = {v.name: v.sort for v in ctx}
        goal = (seq.lhs, seq.rhs)

        def in_scope(phi):
            return all(scope.get(n) == v.sort for n, v in free_vars(phi).items())

        universe = {}

        def admit(phi):
            if phi not in universe and in_scope(phi):
                universe[phi] = True

        for phi in _closure((seq.lhs, seq.rhs)):
            admit(phi)

        derived = {}
        by_lhs = {}
        by_rhs = {}
        queue = []

        def record(key, proof):
            if key in derived or len(derived) >= self.budget:
                return
            derived[key] = proof
            by_lhs.setdefault(key[0], []).append(key)
            by_rhs.setdefault(key[1], []).append(key)
            queue.append(key)
            admit(key[0])
            admit(key[1])

        for p in self._seeds(theory, ctx, scope, universe):
            c = p.conclusion
            if c.context == ctx:
                record((c.lhs, c.rhs), p)

        def close_structural():
            """Introduction steps aimed at every known connective."""
            added = False
            for psi in list(universe):
                if isinstance(psi, And) and psi.parts:
                    for theta in list(by_lhs):
                        key = (theta, psi)
                        if key in derived:
                            continue
                        kids = [derived.get((theta, part)) for part in psi.parts]
                        if all(k is not None for k in kids):
                            record(key, conj_intro(ctx, theta, kids))
                            added = True
                elif isinstance(psi, Or) and psi.parts:
                    for theta in list(by_rhs):
                        key = (psi, theta)
                        if key in derived:
                            continue
                        kids = [derived.get((part, theta)) for part in psi.parts]
                        if all(k is not None for k in kids):
                            record(key, disj_elim(ctx, theta, kids))
                            added = True
            return added

        if isinstance(seq.rhs, Imp):
            admit(And((seq.lhs, seq.rhs.lhs)))

        while queue or close_structural():
            if goal in derived:
                break
            if not queue:
                continue
            a, b = key = queue.pop(0)
            p = derived[key]
            for key2 in list(by_lhs.get(b, ())):
                record((a, key2[1]), cut2(p, derived[key2]))
            for key2 in list(by_rhs.get(a, ())):
                record((key2[0], b), cut2(derived[key2], p))
            if isinstance(b, Imp) and And((a, b.lhs)) in universe:
                record((And((a, b.lhs)), b.rhs), rule_node("imp_up", (p,)))
            if isinstance(a, And) and len(a.parts) == 2:
                out = Imp(a.parts[1], b)
                if out in universe:
                    record((a.parts[0], out), rule_node("imp_down", (p,)))
            if len(derived) >= self.budget:
                break

        return derived.get(goal)

    def _seeds(self, theory, ctx, scope, universe):
        out = []
        for phi in list(universe):
            out.append(identity(ctx, phi))
            out.append(true_intro(ctx, phi))
            out.append(false_elim(ctx, phi))
            if isinstance(phi, And):
                for j in range(len(phi.parts)):
                    out.append(proj(ctx, phi.parts, j))
            elif isinstance(phi, Or):
                for j in range(len(phi.parts)):
                    out.append(inj(ctx, phi.parts, j))
            elif isinstance(phi, Imp):
                # modus ponens shape: (p -> q) and p together give q
                out.append(rule_node("imp_up", (identity(ctx, phi),)))
            elif isinstance(phi, Exists):
                out.extend(self._instantiations(ctx, phi, "ex_up"))
            elif isinstance(phi, Forall):
                out.extend(self._instantiations(ctx, phi, "all_up"))
        for i, ax in enumerate(theory.axioms):
            for sub in self._context_maps(ax.context, ctx):
                leaf = axiom_leaf(theory, i)
                out.append(rule_node("sub", (leaf,), context=ctx, sub=sub))
        for v in ctx:
            refl = rule_node("eq_refl", var=v)
            out.append(rule_node("sub", (refl,), context=ctx, sub={}))
        atoms = [phi for phi in universe if isinstance(phi, (Rel, Eq))]
        taken = {v.name for v in ctx}
        for a in ctx:
            for b in ctx:
                if a.name == b.name or a.sort != b.sort:
                    continue
                for phi in atoms:
                    out.append(rule_node(
                        "eq_sub", context=ctx, xs=(a,), ys=(b,), phi=phi))
                # symmetry: substitute into a spare slot, then collapse it
                spare = Var(_fresh_name("v", taken), a.sort)
                flip = rule_node("eq_sub", context=ctx + (spare,),
                                 xs=(a,), ys=(b,), phi=Eq(a, spare))
                out.append(rule_node("sub", (flip,), context=ctx,
                                     sub={spare.name: a}))
        return out

    def _instantiations(self, ctx, phi, rule):
        """Open a quantifier block with fresh names, then substitute
        context variables for them: the witnessed and the instantiated
        sequents, one per assignment."""
        taken = {v.name for v in ctx}
        names = []
        while len(names) < len(phi.block):
            names.append(_fresh_name("o", taken | set(names)))
        start = identity(ctx, phi)
        opened = rule_node(rule, (start,), names=tuple(names))
        out = []
        for sub in self._context_maps(
                tuple(Var(n, v.sort) for n, v in zip(names, phi.block)), ctx):
            out.append(rule_node("sub", (opened,), context=ctx, sub=sub))
        return out

    def _context_maps(self, src, ctx):
        """Sort-respecting assignments of the source context into ctx."""
        pools = [[v for v in ctx if v.sort == w.sort] for w in src]
        if any(not pool for pool in pools) and src:
            return
        count = 0
        for combo in itertools.product(*pools):
            yield {w.name: v for w, v in zip(src, combo)}
            count += 1
            if count >= self.instance_cap:
                return


class CombinedOracle(_Oracle):
    """Proof search first (a certified yes), then the semantic sweep (a
    countermodel is a definitive no, a clean sweep a bounded yes)."""

    def __init__(self, bound=2, budget=400):
        _Oracle.__init__(self)
        self.search = ProofSearchOracle(budget)
        self.semantic = SemanticOracle(bound)

    def _decide(self, theory, seq):
        if self.search.decide(theory, seq) == YES:
            return YES
        return self.semantic.decide(theory, seq)


def _closure(formulas):
    """Subformulas, outermost first, deduplicated."""
    out = {}
    stack = list(formulas)
    while stack:
        phi = stack.pop(0)
        if phi in out:
            continue
        out[phi] = True
        if isinstance(phi, (And, Or)):
            stack.extend(phi.parts)
        elif isinstance(phi, Imp):
            stack.extend((phi.lhs, phi.rhs))
        elif isinstance(phi, (Exists,)) or hasattr(phi, "body"):
            stack.append(phi.body)
    return list(out)


# ---------------------------------------------------- objects and morphisms


class SynObject:
    """A formula in context, with the context renamed to x0, x1, ...
    Bound variables normalize themselves, so equality of SynObjects is
    alpha-equivalence."""

    def __init__(self, context, formula):
        self.context = tuple(context)
        self.formula = formula

    def __eq__(self, other):
        return (isinstance(other, SynObject)
                and self.context == other.context
                and self.formula == other.formula)

    def __hash__(self):
        return hash((self.context, self.formula))

    def __repr__(self):
        return "[%s, %r]" % (
            " ".join("%s:%s" % (v.name, v.sort) for v in self.context),
            self.formula)

    def sorts(self):
        return tuple(v.sort for v in self.context)


def syn_object(context, phi):
    """Normalize (context, phi) into a SynObject."""
    context = tuple(context)
    names = [v.name for v in context]
    if len(set(names)) != len(names):
        raise SyncatError("repeated variable in context: %s" % names)
    have = {v.name: v.sort for v in context}
    for n, v in free_vars(phi).items():
        if have.get(n) != v.sort:
            raise SyncatError("free variable %s:%s outside the context" % (n, v.sort))
    ren = {v.name: Var("x%d" % i, v.sort) for i, v in enumerate(context)}
    ctx = tuple(ren[v.name] for v in context)
    return SynObject(ctx, substitute(phi, ren))


def target_vars(obj):
    """The same context under target names y0, y1, ..."""
    return tuple(Var("y%d" % i, v.sort) for i, v in enumerate(obj.context))


class SynMorphism:
    """A candidate arrow: a formula over the source variables x0, x1, ...
    and the target variables y0, y1, ... It only counts as a morphism
    once verify_morphism signs off."""

    def __init__(self, source, target, theta):
        self.source = source
        self.target = target
        self.theta = theta

    def __eq__(self, other):
        return (isinstance(other, SynMorphism)
                and self.source == other.source
                and self.target == other.target
                and self.theta == other.theta)

    def __hash__(self):
        return hash((self.source, self.target, self.theta))

    def __repr__(self):
        return "%r --[%r]--> %r" % (self.source, self.theta, self.target)


def morphism(source, target, theta):
    allowed = {v.name: v.sort for v in source.context}
    allowed.update({v.name: v.sort for v in target_vars(target)})
    for n, v in free_vars(theta).items():
        if allowed.get(n) != v.sort:
            raise SyncatError(
                "variable %s:%s is neither a source nor a target variable" % (n, v.sort))
    return SynMorphism(source, target, theta)


def _retarget(obj):
    """The target formula over y-names."""
    ren = {v.name: y for v, y in zip(obj.context, target_vars(obj))}
    return substitute(obj.formula, ren)


def functionality_sequents(m):
    """The three sequents a formula must satisfy to be a morphism: it
    restricts source and target, every source point has an image, and
    the image is unique."""
    x = m.source.context
    y = target_vars(m.target)
    phi = m.source.formula
    psi = _retarget(m.target)
    z = tuple(Var("z%d" % i, v.sort) for i, v in enumerate(y))
    theta_z = substitute(m.theta, {a.name: b for a, b in zip(y, z)})
    return (
        Sequent(x + y, m.theta, And((phi, psi))),
        Sequent(x, phi, mk_exists(y, m.theta)),
        Sequent(x + y + z, And((m.theta, theta_z)), tuple_eq(y, z)),
    )


def verify_morphism(theory, oracle, m):
    """yes/no/unknown for the three functionality sequents together."""
    scope = {v.name: v.sort for v in m.source.context}
    scope.update({v.name: v.sort for v in target_vars(m.target)})
    check_formula(m.theta, theory.signature, scope)
    return _combine(oracle.decide(theory, s) for s in functionality_sequents(m))


def identity_morphism(obj):
    x = obj.context
    y = target_vars(obj)
    parts = (obj.formula,) + ((tuple_eq(x, y),) if x else ())
    return SynMorphism(obj, obj, mk_and(parts))


def compose(m1, m2):
    """The composite relation: some middle point satisfies both graphs.
    The shared middle context is renamed out of the way first."""
    if m1.target != m2.source:
        raise SyncatError("morphisms do not compose: %r vs %r" % (m1.target, m2.source))
    w = tuple(Var("w%d" % i, v.sort) for i, v in enumerate(m1.target.context))
    theta1 = substitute(m1.theta, {v.name: wv for v, wv in zip(target_vars(m1.target), w)})
    theta2 = substitute(m2.theta, {v.name: wv for v, wv in zip(m2.source.context, w)})
    return SynMorphism(m1.source, m2.target, mk_exists(w, And((theta1, theta2))))


def transpose(m):
    """The same formula read backwards, from target to source."""
    swap = {}
    for v, y in zip(m.source.context, target_vars(m.source)):
        swap[v.name] = y
    for y, v in zip(target_vars(m.target), m.target.context):
        swap[y.name] = v
    return SynMorphism(m.target, m.source, substitute(m.theta, swap))


def equal_morphisms(theory, oracle, m1, m2):
    """Mutual entailment of the two representing formulas."""
    if m1.source != m2.source or m1.target != m2.target:
        raise SyncatError("morphisms with different ends are never equal")
    ctx = m1.source.context + target_vars(m1.target)
    return _combine((
        oracle.decide(theory, Sequent(ctx, m1.theta, m2.theta)),
        oracle.decide(theory, Sequent(ctx, m2.theta, m1.theta)),
    ))


def classify(theory, oracle, m):
    """Iso and mono status. Iso: the transposed formula is itself a
    morphism. Mono: two source points with the same image coincide."""
    x = m.source.context
    y = target_vars(m.target)
    z = tuple(Var("z%d" % i, v.sort) for i, v in enumerate(x))
    theta_z = substitute(m.theta, {a.name: b for a, b in zip(x, z)})
    mono_seq = Sequent(x + y + z, And((m.theta, theta_z)), tuple_eq(x, z))
    return {
        "iso": verify_morphism(theory, oracle, transpose(m)),
        "mono": oracle.decide(theory, mono_seq),
    }


def subobject_normal_form(m):
    """A mono into [y, phi], rewritten as the subobject [y, exists x theta]."""
    y = target_vars(m.target)
    return syn_object(y, mk_exists(m.source.context, m.theta))


def subobject_leq(theory, oracle, a, b):
    """Subobject order over a shared ambient context: plain entailment."""
    if a.sorts() != b.sorts():
        raise SyncatError("subobjects of different ambients are incomparable")
    return oracle.decide(theory, Sequent(a.context, a.formula, b.formula))


def inclusion(sub, ambient):
    """The canonical mono from a subobject into its ambient object."""
    if sub.sorts() != ambient.sorts():
        raise SyncatError("not a subobject of that ambient")
    x = sub.context
    y = target_vars(ambient)
    parts = (sub.formula,) + ((tuple_eq(x, y),) if x else ())
    return SynMorphism(sub, ambient, mk_and(parts))


# ------------------------------------------------------------ constructions


def product(objs):
    """Concatenate contexts and conjoin formulas; projections select the
    matching slice. The empty product is the terminal object."""
    objs = tuple(objs)
    context = []
    parts = []
    offsets = []
    for obj in objs:
        offsets.append(len(context))
        ren = {v.name: Var("x%d" % (len(context) + i), v.sort)
               for i, v in enumerate(obj.context)}
        context.extend(ren[v.name] for v in obj.context)
        parts.append(substitute(obj.formula, ren))
    prod = SynObject(tuple(context), mk_and(parts))
    projections = []
    for obj, off in zip(objs, offsets):
        slice_vars = prod.context[off:off + len(obj.context)]
        eqs = ((tuple_eq(slice_vars, target_vars(obj)),) if obj.context else ())
        projections.append(SynMorphism(prod, obj, mk_and((prod.formula,) + eqs)))
    return prod, tuple(projections)


def product_mediator(legs, source=None):
    """The induced morphism into the product of the legs' targets."""
    legs = tuple(legs)
    if not legs:
        if source is None:
            raise SyncatError("a mediator with no legs needs its source spelled out")
        prod, _ = product(())
        return SynMorphism(source, prod, source.formula)
    source = legs[0].source
    if any(m.source != source for m in legs):
        raise SyncatError("product legs must share a source")
    prod, _ = product(tuple(m.target for m in legs))
    parts = []
    off = 0
    for m in legs:
        ren = {v.name: Var("y%d" % (off + i), v.sort)
               for i, v in enumerate(target_vars(m.target))}
        parts.append(substitute(m.theta, ren))
        off += len(m.target.context)
    return SynMorphism(source, prod, mk_and(parts))


def equalizer(m1, m2):
    """The subobject of the shared source where both graphs agree, with
    its inclusion."""
    if m1.source != m2.source or m1.target != m2.target:
        raise SyncatError("equalizer needs a parallel pair")
    src = m1.source
    y = target_vars(m1.target)
    eq_obj = SynObject(src.context, mk_exists(y, And((m1.theta, m2.theta))))
    w = tuple(Var("w%d" % i, v.sort) for i, v in enumerate(y))
    ren = {a.name: b for a, b in zip(y, w)}
    inner = [substitute(m1.theta, ren), substitute(m2.theta, ren)]
    if src.context:
        inner.append(tuple_eq(src.context, target_vars(src)))
    incl = SynMorphism(eq_obj, src, mk_exists(w, mk_and(inner)))
    return eq_obj, incl


def equalizer_mediator(eq_obj, cone):
    """A cone through the parallel pair factors by reusing its own
    formula, now aimed at the equalizer object."""
    if cone.target.sorts() != eq_obj.sorts():
        raise SyncatError("cone target does not match the equalizer ambient")
    return SynMorphism(cone.source, eq_obj, cone.theta)


def image(m):
    """Factor m through [y, exists x theta]: a cover followed by the
    canonical inclusion."""
    img = subobject_normal_form(m)
    cover = SynMorphism(m.source, img, m.theta)
    return img, cover, inclusion(img, m.target)


def union(subs, context=None):
    """Disjunction of subobjects over a shared ambient context. The
    empty union needs the context spelled out and lands on false."""
    subs = tuple(subs)
    if not subs:
        if context is None:
            raise SyncatError("an empty union needs its context spelled out")
        return syn_object(context, Or(()))
    first = subs[0].sorts()
    if any(s.sorts() != first for s in subs):
        raise SyncatError("union of subobjects over different ambients")
    return SynObject(subs[0].context, mk_or(tuple(s.formula for s in subs)))


def forall_along(theory, m, sub):
    """Universal quantification of a subobject of the source along m,
    landing in the subobjects of the target."""
    if sub.sorts() != m.source.sorts():
        raise SyncatError("not a subobject of the morphism's source")
    psi = _retarget(m.target)
    body = mk_and((psi, mk_forall(m.source.context, Imp(m.theta, sub.formula))))
    bad = formula_fragment_violation(body, theory.fragment)
    if bad:
        raise SyncatError(
            "universal quantification falls outside the %s fragment: %s"
            % (theory.fragment, bad))
    return syn_object(target_vars(m.target), body)


def construct(kind, args, theory=None):
    """Dispatcher over the construction kinds, for driving from reports."""
    if kind == "product":
        return product(args)
    if kind == "equalizer":
        m1, m2 = args
        return equalizer(m1, m2)
    if kind == "image":
        (m,) = args
        return image(m)
    if kind == "union":
        return union(args)
    if kind == "forall":
        m, sub = args
        if theory is None:
            raise SyncatError("forall needs the theory for its fragment gate")
        return forall_along(theory, m, sub)
    raise SyncatError("unknown construction %r" % kind)
