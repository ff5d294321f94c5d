"""Category, presheaf, and subfunctor semantics tests."""

import itertools

import pytest

from kappafol.presheaf import (
    CatError, CatStructure, FinCat, Presheaf, SubHeyting, Subfunctor,
    catstructure_holds, check_natural, constant_presheaf, diaconescu,
    enumerate_subfunctors, interpret, kj_force, largest_subfunctor_inside,
    poset_category, product_presheaf, sub_heyting, terminal_presheaf,
    transport_natural, tree_category,
)
from kappafol.syntax import (
    And, Eq, Exists, Forall, Imp, Not, Or, Rel, Sequent, Signature, Var,
)

PROP = Signature((), {}, {"p": (), "q": ()})
p, q = Rel("p", ()), Rel("q", ())

ONE_SORT = Signature(("D",), {}, {"S": ("D",), "p": ()})
x = Var("x", "D")
Sx = Rel("S", (x,))


def two_chain():
    """Root r with one later stage k."""
    return tree_category({"r": None, "k": "r"})


class TestFinCat:
    def test_poset_chain(self):
        C = poset_category([0, 1, 2], lambda a, b: a <= b)
        assert len(C.nonidentity) == 3
        assert C.hom(0, 2) == (("le", 0, 2),)
        assert C.hom(2, 0) == ()
        assert C.compose(("le", 1, 2), ("le", 0, 1)) == ("le", 0, 2)
        assert C.is_acyclic()

    def test_missing_composite_rejected(self):
        with pytest.raises(CatError):
            FinCat(["a", "b", "c"], {"u": ("b", "a"), "v": ("c", "b")}, {})

    def test_junk_table_entry_rejected(self):
        with pytest.raises(CatError):
            FinCat(["a", "b"], {"u": ("b", "a")}, {("u", "u"): "u"})

    def test_associativity_enforced(self):
        arrows = {
            "f": ("x", "w"), "g": ("y", "x"), "h": ("z", "y"),
            "fg": ("y", "w"), "gh": ("z", "x"), "p": ("z", "w"), "q": ("z", "w"),
        }
        table = {("f", "g"): "fg", ("g", "h"): "gh", ("f", "gh"): "p", ("fg", "h"): "q"}
        with pytest.raises(CatError, match="associative"):
            FinCat(["w", "x", "y", "z"], arrows, table)

    def test_iso_pair_is_cyclic(self):
        arrows = {"u": ("a", "b"), "v": ("b", "a")}
        table = {("u", "v"): ("id", "b"), ("v", "u"): ("id", "a")}
        C = FinCat(["a", "b"], arrows, table)
        assert not C.is_acyclic()

    def test_tree_category(self):
        C = tree_category({"r": None, "a": "r", "b": "r", "c": "a"})
        assert len(C.arrows_into("r")) == 4
        assert C.hom("c", "r") and not C.hom("r", "c")
        assert C.compose(("le", "a", "r"), ("le", "c", "a")) == ("le", "c", "r")

    def test_tree_needs_one_root(self):
        with pytest.raises(CatError):
            tree_category({"r": None, "s": None})


class TestPresheaf:
    def test_constant_and_terminal(self):
        C = two_chain()
        F = constant_presheaf(C, [0, 1])
        f = ("le", "k", "r")
        assert F.restrict(f, 1) == 1
        T = terminal_presheaf(C)
        assert T.sets["r"] == ((),)

    def test_functoriality_enforced(self):
        C = poset_category([0, 1, 2], lambda a, b: a <= b)
        sets = {0: (0, 1), 1: (0, 1), 2: (0, 1)}
        ident = {0: 0, 1: 1}
        swap = {0: 1, 1: 0}
        maps = {("le", 0, 1): ident, ("le", 1, 2): ident, ("le", 0, 2): swap}
        with pytest.raises(ValueError, match="functorial"):
            Presheaf(C, sets, maps)

    def test_partial_map_rejected(self):
        C = two_chain()
        with pytest.raises(ValueError, match="total"):
            Presheaf(C, {"r": (0, 1), "k": (0, 1)}, {("le", "k", "r"): {0: 0}})

    def test_product(self):
        C = two_chain()
        F = constant_presheaf(C, [0, 1])
        P = product_presheaf(C, [F, F])
        assert len(P.sets["r"]) == 4
        assert P.restrict(("le", "k", "r"), (0, 1)) == (0, 1)

    def test_natural_check(self):
        C = two_chain()
        F = constant_presheaf(C, [0, 1])
        good = {c: {0: 1, 1: 0} for c in C.objects}
        check_natural(F, F, good)
        bad = {"r": {0: 1, 1: 0}, "k": {0: 0, 1: 1}}
        with pytest.raises(ValueError, match="natural"):
            check_natural(F, F, bad)


class TestSubfunctors:
    def setup_method(self):
        self.C = two_chain()
        self.F = constant_presheaf(self.C, [0, 1])
        self.H = sub_heyting(self.F)

    def test_closure_enforced(self):
        Subfunctor(self.F, {"r": {0}, "k": {0}}).validate()
        with pytest.raises(ValueError, match="closed"):
            Subfunctor(self.F, {"r": {0}, "k": set()}).validate()

    def test_enumeration_count(self):
        subs = enumerate_subfunctors(self.F)
        assert len(subs) == 9
        for s in subs:
            s.validate()

    def test_lattice_and_adjunction(self):
        subs = enumerate_subfunctors(self.F)
        H = self.H
        for a, b in itertools.product(subs, repeat=2):
            assert H.meet(a, b).leq(a) and a.leq(H.join(a, b))
        for a, b, c in itertools.product(subs, repeat=3):
            assert H.leq(H.meet(c, a), b) == H.leq(c, H.imp(a, b))

    def test_largest_inside(self):
        got = largest_subfunctor_inside(self.F, {"r": {0}, "k": set()})
        assert got.parts["r"] == frozenset() and got.parts["k"] == frozenset()

    def test_double_negation_is_not_identity(self):
        # A holds only at the later stage; its double negation holds everywhere.
        A = Subfunctor(self.F, {"r": set(), "k": {0, 1}}).validate()
        H = self.H
        nn = H.neg(H.neg(A))
        assert H.neg(A) == H.bottom()
        assert nn == H.top()
        assert nn != A and A.leq(nn)

    def test_forall_matches_search(self):
        src = product_presheaf(self.C, [self.F, self.F])
        proj = {c: {t: t[0] for t in src.sets[c]} for c in self.C.objects}
        check_natural(src, self.F, proj)
        H = self.H
        for sub in enumerate_subfunctors(src):
            fast = H.forall_along(proj, src, sub)
            slow = H.forall_by_search(proj, src, sub)
            assert fast == slow
            assert H.exists_along(proj, sub).validate()


def prop_structure():
    """p holds only at the later stage of a 2-chain, q nowhere."""
    C = two_chain()
    M = CatStructure(PROP, C, {}, rels={"p": {"k": {()}, "r": set()}})
    return M.validate()


def sorted_structure():
    """One sort growing from {0} to {0, 1}; S holds of 0 at the later
    stage only."""
    C = two_chain()
    D = Presheaf(
        C,
        {"r": (0,), "k": (0, 1)},
        {("le", "k", "r"): {0: 0}},
    )
    M = CatStructure(
        ONE_SORT, C, {"D": D},
        rels={"S": {"k": {(0,)}, "r": set()}, "p": {"k": set(), "r": set()}},
    )
    return M.validate()


class TestCatStructure:
    def test_validation_catches_unnatural_function(self):
        C = two_chain()
        D = constant_presheaf(C, [0, 1])
        sig = Signature(("D",), {"f": (("D",), "D")}, {})
        funcs = {"f": {"r": {(0,): 0, (1,): 1}, "k": {(0,): 1, (1,): 0}}}
        with pytest.raises(ValueError, match="natural"):
            CatStructure(sig, C, {"D": D}, funcs=funcs).validate()

    def test_validation_catches_open_relation(self):
        C = two_chain()
        D = constant_presheaf(C, [0, 1])
        M = CatStructure(ONE_SORT, C, {"D": D}, rels={"S": {"r": {(0,)}, "k": set()}})
        with pytest.raises(ValueError, match="closed"):
            M.validate()


class TestForcing:
    def test_excluded_middle_fails_at_root(self):
        M = prop_structure()
        em = Or((p, Not(p)))
        assert not kj_force(M, "r", (), em, ())
        assert kj_force(M, "k", (), em, ())

    def test_double_negation_shift_fails(self):
        M = prop_structure()
        assert kj_force(M, "r", (), Not(Not(p)), ())
        assert not kj_force(M, "r", (), p, ())
        assert not catstructure_holds(M, Sequent((), Not(Not(p)), p))

    def test_ex_falso_holds(self):
        M = prop_structure()
        assert catstructure_holds(M, Sequent((), Or(()), q))

    def test_quantifier_clauses(self):
        M = sorted_structure()
        ex = Exists((x,), Sx)
        assert not kj_force(M, "r", (), ex, ())
        assert kj_force(M, "k", (), ex, ())
        fa = Forall((x,), Or((Sx, Not(Sx))))
        assert not kj_force(M, "r", (), fa, ())

    @pytest.mark.parametrize("structure", [prop_structure, sorted_structure])
    def test_interpret_agrees_with_forcing(self, structure):
        M = structure()
        sig = M.signature
        if sig is PROP:
            formulas = [
                (p, ()), (q, ()), (Or((p, q)), ()), (And((p, q)), ()),
                (Imp(p, q), ()), (Not(p), ()), (Not(Not(p)), ()),
                (Imp(Not(Not(p)), p), ()), (Or((p, Not(p))), ()),
            ]
        else:
            y = Var("y", "D")
            formulas = [
                (Sx, (x,)), (Not(Sx), (x,)), (Exists((x,), Sx), ()),
                (Forall((x,), Or((Sx, Not(Sx)))), ()),
                (Imp(Sx, Exists((y,), Rel("S", (y,)))), (x,)),
                (Forall((y,), Eq(x, y)), (x,)),
                (Exists((y,), And((Sx, Rel("S", (y,))))), (x,)),
            ]
        for phi, ctx in formulas:
            den = interpret(M, phi, ctx)
            P = den.parent
            for c in M.cat.objects:
                for alpha in P.sets[c]:
                    assert den.has(c, alpha) == kj_force(M, c, alpha, phi, ctx), (phi, c, alpha)

    def test_soundness_samples(self):
        # Sequents with kernel derivations must hold in every structure.
        M = prop_structure()
        theorems = [
            Sequent((), p, p),
            Sequent((), And((p, q)), q),
            Sequent((), p, Or((q, p))),
            Sequent((), And((p, Imp(p, q))), q),
            Sequent((), Or(()), q),
        ]
        for seq in theorems:
            assert catstructure_holds(M, seq), seq


class TestChainPoset:
    def test_single_arrow(self):
        M = FinCat(["a", "b"], {"u": ("a", "b")}, {})
        P, (e_obj, e_arr), transport = diaconescu(M)
        assert len(P.objects) == 3
        assert set(e_obj.values()) == {"a", "b"}
        assert set(e_arr.values()) == {"u"}
        assert P.is_acyclic()

    def test_composite_chain_count(self):
        M = FinCat(
            ["a", "b", "c"],
            {"u": ("a", "b"), "v": ("b", "c"), "w": ("a", "c")},
            {("v", "u"): "w"},
        )
        P, (e_obj, e_arr), transport = diaconescu(M)
        assert len(P.objects) == 7
        # E hits every object and every nonidentity arrow.
        assert set(e_obj.values()) == set(M.objects)
        assert set(e_arr.values()) == set(M.nonidentity)

    def test_cyclic_rejected(self):
        arrows = {"u": ("a", "b"), "v": ("b", "a")}
        table = {("u", "v"): ("id", "b"), ("v", "u"): ("id", "a")}
        with pytest.raises(CatError):
            diaconescu(FinCat(["a", "b"], arrows, table))

    def test_transport_is_conservative_and_heyting(self):
        M = FinCat(["a", "b"], {"u": ("a", "b")}, {})
        P, (e_obj, e_arr), transport = diaconescu(M)
        F = constant_presheaf(M, [0, 1])
        FP = transport(F)
        FP.validate()
        H = sub_heyting(F)
        HP = sub_heyting(FP)
        subs = enumerate_subfunctors(F)

        def t(a):
            return Subfunctor(FP, transport(a).parts)

        for a, b in itertools.product(subs, repeat=2):
            assert (t(a) == t(b)) == (a == b)
            assert t(a).leq(t(b)) == a.leq(b)
            assert t(H.meet(a, b)) == HP.meet(t(a), t(b))
            assert t(H.join(a, b)) == HP.join(t(a), t(b))
            assert t(H.imp(a, b)) == HP.imp(t(a), t(b))

    def test_transport_commutes_with_quantifiers(self):
        M = FinCat(["a", "b"], {"u": ("a", "b")}, {})
        P, (e_obj, e_arr), transport = diaconescu(M)
        F = constant_presheaf(M, [0, 1])
        src = product_presheaf(M, [F, F])
        proj = {c: {tup: tup[0] for tup in src.sets[c]} for c in M.objects}
        FP = transport(F)
        srcP = transport(src)
        projP = transport_natural(P, e_obj, proj)
        H = sub_heyting(F)
        HP = sub_heyting(FP)
        for sub in enumerate_subfunctors(src):
            tsub = Subfunctor(srcP, transport(sub).parts)
            ex = transport(H.exists_along(proj, sub))
            fa = transport(H.forall_along(proj, src, sub))
            assert ex.parts == HP.exists_along(projP, tsub).parts
            assert fa.parts == HP.forall_along(projP, srcP, tsub).parts
