"""Kripke/Beth evaluator, search, smash, and Beth-builder tests."""

import itertools

import pytest

from kappafol.forcing import (
    BethModel, ForcingError, KripkeModel, _unpair, beth_build,
    beth_build_linear, beth_force, beth_sequent_holds, countermodel_search,
    enumerate_kripke_models, kripke_force, kripke_sequent_holds,
    kripke_theory_holds, kripke_to_beth, kripke_to_catstructure, smash,
    subformula_closure,
)
from kappafol.lattice import FinLattice, boolean_square, chain, pairing
from kappafol.presheaf import CatStructure, Presheaf, kj_force, poset_category
from kappafol.setmodels import FinStructure
from kappafol.sheaf import Site, SiteError, lattice_site
from kappafol.syntax import (
    FALSE, TRUE, And, Eq, Exists, Forall, Imp, Not, Or, Rel, Sequent,
    Signature, Theory, Var,
)

PROP = Signature((), {}, {"p": (), "q": ()})
p, q = Rel("p", ()), Rel("q", ())

SIG1 = Signature(("D",), {}, {"S": ("D",)})
x = Var("x", "D")
Sx = Rel("S", (x,))

SIGF = Signature(("D",), {"c": ((), "D"), "f": (("D",), "D")}, {"S": ("D",)})


def prop_model(parent, atoms):
    structures = {
        n: FinStructure(PROP, {}, {}, {a: {()} for a in atoms.get(n, ())})
        for n in parent
    }
    return KripkeModel(parent, structures, {}, name="prop")


def two_chain(top_atoms=("p",)):
    return prop_model({"r": None, "t": "r"}, {"t": tuple(top_atoms)}).validate()


def growing_chain():
    """Domain {0} at the root grows to {0, 1} at the top; S is empty at
    the root and holds of everything at the top."""
    structures = {
        "r": FinStructure(SIG1, {"D": (0,)}, {}, {"S": set()}),
        "t": FinStructure(SIG1, {"D": (0, 1)}, {}, {"S": {(0,), (1,)}}),
    }
    return KripkeModel({"r": None, "t": "r"}, structures,
                       {"t": {"D": {0: 0}}}, name="grow").validate()


def beth_fork(left=("p",), right=("q",), exploding=()):
    parent = {"r": None, "a": "r", "b": "r"}
    table = {"a": left, "b": right}
    structures = {
        n: FinStructure(PROP, {}, {}, {a: {()} for a in table.get(n, ())},
                        exploding=n in exploding)
        for n in parent
    }
    return BethModel(parent, structures, {}, name="fork").validate()


class TestModelValidation:
    def test_two_roots_rejected(self):
        with pytest.raises(ForcingError, match="root"):
            prop_model({"r": None, "s": None}, {})

    def test_cycle_rejected(self):
        with pytest.raises(ForcingError, match="ancestor"):
            prop_model({"r": None, "a": "b", "b": "a"}, {})

    def test_atom_monotonicity_enforced(self):
        bad = prop_model({"r": None, "t": "r"}, {"r": ("p",)})
        with pytest.raises(ForcingError, match="monotone"):
            bad.validate()

    def test_transition_must_be_total(self):
        structures = {
            "r": FinStructure(SIG1, {"D": (0,)}),
            "t": FinStructure(SIG1, {"D": (0,)}),
        }
        K = KripkeModel({"r": None, "t": "r"}, structures, {"t": {"D": {}}})
        with pytest.raises(ForcingError, match="total"):
            K.validate()

    def test_function_transition_must_commute(self):
        structures = {
            "r": FinStructure(SIGF, {"D": (0,)},
                              {"c": {(): 0}, "f": {(0,): 0}}),
            "t": FinStructure(SIGF, {"D": (0, 1)},
                              {"c": {(): 0}, "f": {(0,): 1, (1,): 1}}),
        }
        K = KripkeModel({"r": None, "t": "r"}, structures,
                        {"t": {"D": {0: 0}}})
        with pytest.raises(ForcingError, match="commute"):
            K.validate()

    def test_kripke_rejects_exploding(self):
        structures = {"r": FinStructure(PROP, {}, {}, {}, exploding=True)}
        with pytest.raises(ForcingError, match="explod"):
            KripkeModel({"r": None}, structures, {}).validate()

    def test_beth_needs_uniform_height(self):
        parent = {"r": None, "a": "r", "b": "a", "c": "r"}
        structures = {n: FinStructure(PROP, {}, {}, {}) for n in parent}
        with pytest.raises(ForcingError, match="uniform"):
            BethModel(parent, structures, {}).validate()

    def test_beth_exploding_is_monotone(self):
        parent = {"r": None, "t": "r"}
        structures = {
            "r": FinStructure(PROP, {}, {}, {}, exploding=True),
            "t": FinStructure(PROP, {}, {}, {}),
        }
        with pytest.raises(ForcingError, match="exploding"):
            BethModel(parent, structures, {}).validate()

    def test_beth_allows_exploding_leaves(self):
        assert beth_fork(exploding=("a", "b")).validate()


class TestKripkeForce:
    def test_excluded_middle_fails_at_root(self):
        K = two_chain()
        assert not kripke_force(K, "r", (), Or((p, Not(p))))
        assert kripke_force(K, "t", (), Or((p, Not(p))))

    def test_double_negation_at_root(self):
        K = two_chain()
        assert kripke_force(K, "r", (), Not(Not(p)))
        assert not kripke_force(K, "r", (), p)

    def test_peirce_fails_at_root(self):
        K = two_chain()
        peirce = Imp(Imp(Imp(p, q), p), p)
        assert not kripke_force(K, "r", (), peirce)

    def test_top_is_forced_everywhere(self):
        K = two_chain()
        for n in K.nodes:
            assert kripke_force(K, n, (), TRUE)
            assert not kripke_force(K, n, (), FALSE)

    def test_quantifiers_over_growing_domain(self):
        K = growing_chain()
        assert not kripke_force(K, "r", (), Exists((x,), Sx))
        assert kripke_force(K, "t", (), Exists((x,), Sx))
        assert kripke_force(K, "r", (), Not(Not(Exists((x,), Sx))))
        assert not kripke_force(K, "r", (), Forall((x,), Or((Sx, Not(Sx)))))

    def test_env_outside_domain_rejected(self):
        K = growing_chain()
        with pytest.raises(ForcingError, match="not in sort"):
            kripke_force(K, "r", (1,), Sx, (x,))

    def test_monotone_along_order(self):
        models = [two_chain(), two_chain(("p", "q")),
                  prop_model({"r": None, "a": "r", "b": "r"},
                             {"a": ("p",), "b": ("q",)}).validate()]
        formulas = [p, q, Not(p), Not(Not(p)), Or((p, q)), Imp(p, q),
                    And((p, Not(q)))]
        for K in models:
            for phi in formulas:
                for k in K.nodes:
                    if kripke_force(K, k, (), phi):
                        assert all(kripke_force(K, l, (), phi)
                                   for l in K.descendants(k))

    def test_sequent_helpers(self):
        K = two_chain()
        assert kripke_sequent_holds(K, Sequent((), And((p, q)), p))
        assert not kripke_sequent_holds(K, Sequent((), TRUE, Or((p, Not(p)))))
        assert kripke_theory_holds(K, Theory(PROP, ()))


class TestKripkePresheafAgreement:
    def test_membership_matches_forcing(self):
        prop_formulas = [p, q, Or((p, q)), Imp(p, q), Not(p), Not(Not(p)),
                         Or((p, Not(p))), FALSE, And((p, q))]
        for K in [two_chain(), two_chain(("p", "q")),
                  prop_model({"r": None, "a": "r", "b": "r", "c": "a"},
                             {"a": ("p",), "c": ("p", "q")}).validate()]:
            M = kripke_to_catstructure(K)
            for phi in prop_formulas:
                for k in K.nodes:
                    assert kripke_force(K, k, (), phi) == \
                        kj_force(M, k, (), phi, ()), (phi, k)

    def test_sorted_agreement(self):
        K = growing_chain()
        M = kripke_to_catstructure(K)
        sentences = [Exists((x,), Sx), Forall((x,), Sx),
                     Not(Exists((x,), Sx)), Forall((x,), Or((Sx, Not(Sx))))]
        for phi in sentences:
            for k in K.nodes:
                assert kripke_force(K, k, (), phi) == kj_force(M, k, (), phi, ())
        for k in K.nodes:
            for e in K.structures[k].sorts["D"]:
                assert kripke_force(K, k, (e,), Sx, (x,)) == \
                    kj_force(M, k, (e,), Sx, (x,))


class TestBethForce:
    def test_atom_through_a_bar(self):
        B = beth_fork(left=("p",), right=("p",))
        assert beth_force(B, "r", (), p)
        assert not beth_force(beth_fork(left=("p",), right=()), "r", (), p)

    def test_disjunction_separates_beth_from_kripke(self):
        B = beth_fork()
        assert beth_force(B, "r", (), Or((p, q)))
        assert not beth_force(B, "r", (), p)
        assert not beth_force(B, "r", (), q)
        K = prop_model({"r": None, "a": "r", "b": "r"},
                       {"a": ("p",), "b": ("q",)}).validate()
        assert not kripke_force(K, "r", (), Or((p, q)))

    def test_false_needs_an_exploding_bar(self):
        assert beth_force(beth_fork(exploding=("a", "b")), "r", (), FALSE)
        assert not beth_force(beth_fork(exploding=("a",)), "r", (), FALSE)
        assert beth_force(beth_fork(exploding=("a",)), "a", (), FALSE)

    def test_existential_witness_at_the_bar(self):
        structures = {
            "r": FinStructure(SIG1, {"D": ()}),
            "t": FinStructure(SIG1, {"D": (0,)}, {}, {"S": {(0,)}}),
        }
        B = BethModel({"r": None, "t": "r"}, structures,
                      {"t": {"D": {}}}).validate()
        assert beth_force(B, "r", (), Exists((x,), Sx))

    def test_kripke_reread_with_offset_zero_is_unchanged(self):
        formulas = [p, q, Or((p, q)), Not(p), Imp(p, q), Or((p, Not(p))),
                    Not(Not(p)), FALSE]
        for K in [two_chain(), beth_like_kripke()]:
            B = kripke_to_beth(K)
            for phi in formulas:
                for k in K.nodes:
                    assert beth_force(B, k, (), phi) == \
                        kripke_force(K, k, (), phi), (phi, k)

    def test_kripke_to_beth_wants_uniform_height(self):
        K = prop_model({"r": None, "a": "r", "b": "a", "c": "r"}, {}).validate()
        with pytest.raises(ForcingError, match="uniform"):
            kripke_to_beth(K)

    def test_bar_stability(self):
        formulas = [p, q, Or((p, q)), Not(p), Imp(p, q), Not(Not(p)), FALSE,
                    And((p, q))]
        for B in [beth_fork(), beth_fork(left=("p",), right=("p", "q")),
                  beth_fork(exploding=("b",), right=())]:
            for phi in formulas:
                for k in B.nodes:
                    direct = beth_force(B, k, (), phi)
                    barred = any(
                        all(beth_force(B, l, (), phi)
                            for l in B.descendants_at(k, B.level(k) + off))
                        for off in B.offsets(k))
                    assert direct == barred, (phi, k)

    def test_beth_monotone(self):
        B = beth_fork(exploding=("b",), right=())
        formulas = [p, q, Or((p, q)), Not(p), FALSE, Not(Not(p))]
        for phi in formulas:
            for k in B.nodes:
                if beth_force(B, k, (), phi):
                    assert all(beth_force(B, l, (), phi)
                               for l in B.descendants(k))

    def test_intuitionistic_theorems_hold(self):
        B = beth_fork()
        theorems = [Imp(p, p), Not(Not(Or((p, Not(p))))),
                    Imp(And((p, q)), p), Imp(p, Or((p, q))),
                    Imp(FALSE, q)]
        for phi in theorems:
            assert beth_sequent_holds(B, Sequent((), TRUE, phi)), phi


def beth_like_kripke():
    """Uniform fork usable under both readings."""
    return prop_model({"r": None, "a": "r", "b": "r"},
                      {"a": ("p",), "b": ("p", "q")}).validate()


class TestCountermodelSearch:
    def test_excluded_middle_two_chain(self):
        rep = countermodel_search(Theory(PROP, ()), Sequent((), TRUE, Or((p, Not(p)))))
        assert rep.found and len(rep.model.nodes) == 2
        K = rep.model
        assert not kripke_force(K, K.root, (), Or((p, Not(p))))
        top = K.children[K.root][0]
        assert K.structures[K.root].rels.get("p", set()) == set()
        assert () in K.structures[top].rels["p"]

    def test_double_negation_two_chain(self):
        rep = countermodel_search(Theory(PROP, ()), Sequent((), Not(Not(p)), p))
        assert rep.found and len(rep.model.nodes) == 2
        K = rep.model
        assert kripke_force(K, K.root, (), Not(Not(p)))
        assert not kripke_force(K, K.root, (), p)

    def test_peirce_two_chain(self):
        peirce = Imp(Imp(Imp(p, q), p), p)
        rep = countermodel_search(Theory(PROP, ()), Sequent((), TRUE, peirce))
        assert rep.found and len(rep.model.nodes) == 2
        assert not kripke_force(rep.model, rep.model.root, (), peirce)

    def test_exhaustion_on_theorems(self):
        theorems = [Sequent((), TRUE, TRUE), Sequent((), TRUE, Imp(p, p)),
                    Sequent((), p, p), Sequent((), And((p, q)), p),
                    Sequent((), FALSE, q)]
        for goal in theorems:
            rep = countermodel_search(Theory(PROP, ()), goal, max_nodes=3)
            assert not rep.found, goal
            assert "exhausted" in rep.line()

    def test_theory_constrains_the_search(self):
        T = Theory(PROP, (Sequent((), TRUE, p),))
        rep = countermodel_search(T, Sequent((), TRUE, p))
        assert not rep.found
        rep2 = countermodel_search(T, Sequent((), TRUE, q))
        assert rep2.found
        assert kripke_theory_holds(rep2.model, T)

    def test_first_order_search_finds_empty_witness_gap(self):
        rep = countermodel_search(Theory(SIG1, ()),
                                  Sequent((), TRUE, Exists((x,), Sx)),
                                  max_nodes=2, max_card=1)
        assert rep.found and len(rep.model.nodes) == 1
        assert rep.model.structures[rep.model.root].sorts["D"] == ()

    def test_first_order_search_with_context(self):
        rep = countermodel_search(Theory(SIG1, ()),
                                  Sequent((x,), TRUE, Sx),
                                  max_nodes=2, max_card=1)
        assert rep.found
        st = rep.model.structures[rep.model.root]
        assert st.sorts["D"] == (0,) and st.rels["S"] == set()

    def test_first_order_exhaustion(self):
        rep = countermodel_search(Theory(SIG1, ()), Sequent((x,), Sx, Sx),
                                  max_nodes=2, max_card=1)
        assert not rep.found and rep.frames == 2

    def test_search_is_deterministic(self):
        goal = Sequent((), Not(Not(p)), p)
        a = countermodel_search(Theory(PROP, ()), goal)
        b = countermodel_search(Theory(PROP, ()), goal)
        assert a.model.parent == b.model.parent
        assert {n: a.model.structures[n].rels for n in a.model.nodes} == \
            {n: b.model.structures[n].rels for n in b.model.nodes}


class TestEnumeration:
    def test_propositional_count_single_node(self):
        models = list(enumerate_kripke_models(Theory(PROP, ()), max_nodes=1))
        assert len(models) == 4

    def test_respects_theory(self):
        T = Theory(PROP, (Sequent((), TRUE, p),))
        models = list(enumerate_kripke_models(T, max_nodes=2))
        assert models
        assert all(kripke_force(K, k, (), p)
                   for K in models for k in K.nodes)

    def test_atoms_monotone_in_enumerated_models(self):
        for K in enumerate_kripke_models(Theory(PROP, ()), max_nodes=2):
            K.validate()


class TestSmash:
    def test_two_countermodels_refute_the_disjunction(self):
        A = countermodel_search(Theory(PROP, ()), Sequent((), TRUE, p)).model
        B = countermodel_search(Theory(PROP, ()), Sequent((), TRUE, q)).model
        S = smash([A, B])
        assert not kripke_force(S, S.root, (), Or((p, q)))
        assert not kripke_force(S, S.root, (), p)
        assert not kripke_force(S, S.root, (), q)

    def test_root_forces_no_atom(self):
        S = smash([two_chain(), two_chain(("p", "q"))])
        assert S.structures[S.root].rels == {}

    def test_original_forcing_preserved(self):
        models = [two_chain(), beth_like_kripke()]
        S = smash(models)
        formulas = [p, q, Or((p, q)), Not(p), Imp(p, q), Not(Not(p))]
        for i, m in enumerate(models):
            for n in m.nodes:
                for phi in formulas:
                    assert kripke_force(S, (i, n), (), phi) == \
                        kripke_force(m, n, (), phi)

    def test_smash_of_zero_models(self):
        S = smash([], signature=PROP)
        assert len(S.nodes) == 1
        assert not kripke_force(S, S.root, (), p)
        with pytest.raises(ForcingError, match="signature"):
            smash([])

    def test_constants_populate_the_root(self):
        sig = Signature(("D",), {"c": ((), "D"), "d": ((), "D")}, {"S": ("D",)})
        top = FinStructure(sig, {"D": (0,)},
                           {"c": {(): 0}, "d": {(): 0}}, {"S": {(0,)}})
        m = KripkeModel({"n": None}, {"n": top}, {}).validate()
        S = smash([m])
        assert set(S.structures[S.root].sorts["D"]) == {"c", "d"}
        assert S.structures[S.root].rels.get("S", set()) == set()
        y = Var("y", "D")
        assert not kripke_force(S, S.root, (), Exists((y,), Rel("S", (y,))))
        assert kripke_force(S, (0, "n"), (), Exists((y,), Rel("S", (y,))))

    def test_sort_without_constants_gets_empty_root_domain(self):
        m = KripkeModel({"n": None}, {"n": FinStructure(SIG1, {"D": (0,)})},
                        {}).validate()
        S = smash([m])
        assert S.structures[S.root].sorts["D"] == ()

    def test_function_symbols_with_arguments_rejected(self):
        m = KripkeModel(
            {"n": None},
            {"n": FinStructure(SIGF, {"D": (0,)},
                               {"c": {(): 0}, "f": {(0,): 0}})},
            {}).validate()
        with pytest.raises(ForcingError, match="constants-only"):
            smash([m])


class TestPairingInverse:
    def test_round_trip(self):
        for b in range(21):
            for g in range(21):
                assert _unpair(pairing(b, g)) == (b, g)

    def test_subformula_closure(self):
        phi = Imp(p, Or((q, And((p, q)))))
        got = subformula_closure([phi])
        assert got[0] == phi
        assert set(got) == {phi, p, Or((q, And((p, q)))), q, And((p, q))}


def square_disjunction_instance():
    """p holds below one coatom, q below the other."""
    L = boolean_square()
    site = lattice_site(L)
    M = CatStructure(PROP, site.cat, {}, rels={
        "p": {c: ({()} if L.leq(c, 1) else set()) for c in site.cat.objects},
        "q": {c: ({()} if L.leq(c, 2) else set()) for c in site.cat.objects},
    }).validate()
    return site, M


def dense_arrow_site():
    """Two-point poset a <= one where the single arrow is declared to
    cover; pullbacks designated for the cospans the builder meets."""
    cat = poset_category(["a", "one"], lambda s, t: s == t or t == "one",
                         name="dense")
    f = ("le", "a", "one")
    ida, idone = ("id", "a"), ("id", "one")
    covers = {"one": ((f,),)}
    pullbacks = {
        (f, f): (ida, ida), (f, idone): (ida, f), (idone, f): (f, ida),
        (idone, idone): (idone, idone), (ida, ida): (ida, ida),
    }
    return Site(cat, covers, pullbacks, name="dense"), cat, f


class TestBethBuild:
    def test_boolean_square_splits_the_disjunction(self):
        site, M = square_disjunction_instance()
        rep = beth_build(site, M, 3, [Or((p, q))], 1)
        assert rep.exhausted, rep.line()
        model = rep.model
        assert rep.objects[(0,)] == 1 and rep.objects[(1,)] == 2
        assert () in model.structures[(0,)].rels["p"]
        assert () in model.structures[(1,)].rels["q"]
        assert beth_force(model, (), (), Or((p, q)))
        assert not beth_force(model, (), (), p)

    def test_agreement_on_stabilized_instance(self):
        site, M = square_disjunction_instance()
        S = subformula_closure([Or((p, q))])
        rep = beth_build(site, M, 3, S, 2)
        assert rep.exhausted
        from kappafol.sheaf import sheaf_force
        for n in rep.model.nodes:
            for phi in S:
                assert beth_force(rep.model, n, (), phi) == \
                    sheaf_force(site, M, rep.objects[n], (), phi, ()), (n, phi)

    def test_decided_root_gives_a_bamboo(self):
        L = chain(2)
        site = lattice_site(L)
        M = CatStructure(PROP, site.cat, {}, rels={
            "p": {c: {()} for c in site.cat.objects},
            "q": {c: set() for c in site.cat.objects},
        }).validate()
        rep = beth_build(site, M, 1, [Or((p, q))], 3)
        assert rep.exhausted
        assert len(rep.model.nodes) == 4
        assert all(obj == 1 for obj in rep.objects.values())
        assert all(len(rep.model.children[n]) <= 1 for n in rep.model.nodes)

    def test_existential_witness_after_one_cover(self):
        site, cat, f = dense_arrow_site()
        sig = Signature(("D",), {}, {"R": ("D",)})
        D = Presheaf(cat, {"one": (), "a": ("c",)}, {f: {}})
        M = CatStructure(sig, cat, {"D": D}, rels={
            "R": {"one": set(), "a": {("c",)}}}).validate()
        y = Var("y", "D")
        S = [Exists((y,), Rel("R", (y,)))]
        rep = beth_build_linear(site, M, "one", S, 1)
        assert rep.exhausted
        assert len(rep.model.nodes) == 2
        top = rep.model.children[()][0]
        assert rep.objects[top] == "a"
        assert ("c",) in rep.model.structures[top].rels["R"]
        assert beth_force(rep.model, (), (), S[0])

    def test_linear_matches_general_builder_on_singleton_covers(self):
        site, cat, f = dense_arrow_site()
        sig = Signature(("D",), {}, {"R": ("D",)})
        D = Presheaf(cat, {"one": (), "a": ("c",)}, {f: {}})
        M = CatStructure(sig, cat, {"D": D}, rels={
            "R": {"one": set(), "a": {("c",)}}}).validate()
        y = Var("y", "D")
        S = [Exists((y,), Rel("R", (y,)))]
        a = beth_build(site, M, "one", S, 2)
        b = beth_build_linear(site, M, "one", S, 2)
        assert a.model.parent == b.model.parent
        assert a.objects == b.objects
        assert {n: a.model.structures[n] for n in a.model.nodes} == \
            {n: b.model.structures[n] for n in b.model.nodes}

    def test_linear_gate_rejects_disjunction(self):
        site, M = square_disjunction_instance()
        with pytest.raises(ForcingError, match="fragment"):
            beth_build_linear(site, M, 3, [Or((p, q))], 1)

    def test_linear_needs_singleton_covers(self):
        # the square's splitting cover has two arrows, so no singleton
        # family can witness the disjunction at the top
        site, M = square_disjunction_instance()
        from kappafol.forcing import _witnessing_covers
        with pytest.raises(ForcingError, match="singleton"):
            _witnessing_covers(site, M, 3, [Or((p, q))], True)

    def test_missing_pullback_surfaces(self):
        cat = poset_category(["a", "b", "one"],
                             lambda s, t: s == t or t == "one", name="fork")
        fa, fb = ("le", "a", "one"), ("le", "b", "one")
        site = Site(cat, {"one": ((fa, fb),)}, name="fork")
        M = CatStructure(PROP, cat, {}, rels={
            "p": {"a": {()}, "b": set(), "one": set()},
            "q": {"a": set(), "b": {()}, "one": set()},
        }).validate()
        with pytest.raises(SiteError, match="missing designated pullback"):
            beth_build(site, M, "one", [Or((p, q))], 1)

    def test_pending_covers_reported(self):
        # powerset lattice of three atoms, elements read as bitmasks; the
        # two disjunctions need different splitting covers of the top, and
        # height 1 only schedules the first
        cube = FinLattice(8, [(a, b) for a in range(8) for b in range(8)
                              if a != b and a & b == a])
        site = lattice_site(cube)
        sig = Signature((), {}, {"p": (), "q": (), "r": (), "s": ()})
        r_, s_ = Rel("r", ()), Rel("s", ())

        def below(c):
            return {x: ({()} if cube.leq(x, c) else set()) for x in range(8)}

        M = CatStructure(sig, site.cat, {}, rels={
            "p": below(3), "q": below(4), "r": below(5), "s": below(2),
        }).validate()
        S = [Or((p, q)), Or((r_, s_))]
        rep = beth_build(site, M, 7, S, 1)
        assert not rep.exhausted
        assert ((), 1) in rep.pending
        assert "pending" in rep.line()
        # the unscheduled cover is exactly why Beth forcing lags behind
        # site forcing here
        from kappafol.sheaf import sheaf_force
        assert sheaf_force(site, M, 7, (), Or((r_, s_)), ())
        assert not beth_force(rep.model, (), (), Or((r_, s_)))
        # with enough height the second cover is scheduled too and the
        # lag disappears
        rep2 = beth_build(site, M, 7, S, 3)
        assert rep2.exhausted
        assert beth_force(rep2.model, (), (), Or((r_, s_)))

    def test_exploding_objects_become_exploding_nodes(self):
        site, M = square_disjunction_instance()
        rep = beth_build(site, M, 3, [FALSE], 1)
        assert not rep.model.structures[()].exploding
        # bottom of the square is covered by the empty family
        rep2 = beth_build(site, M, 0, [FALSE], 1)
        assert rep2.model.structures[()].exploding
        assert beth_force(rep2.model, (), (), FALSE)
