import pytest
from hypothesis import given, settings, strategies as st

from kappafol import syntax as sx
from kappafol.syntax import (
    And, App, Eq, Exists, FALSE, Forall, Imp, Not, Or, Rel, Sequent, Signature, Theory,
    TRUE, Var, canonical_context, free_vars, parse_formula, parse_sequent, parse_theory,
    print_formula, print_sequent, print_theory, subformula_set, substitute,
)

SIG = Signature(
    sorts=("A", "B"),
    funcs={"c": ((), "A"), "f": (("A",), "A"), "g": (("A", "B"), "B")},
    rels={"R": ("A",), "S": ("A", "B"), "p": (), "q": (), "r": ()},
)

xA = Var("x", "A")
yA = Var("y", "A")
zB = Var("z", "B")


def test_parse_print_round_trip_examples():
    for text in [
        "(and p q)",
        "(seq (x:A) (rel R x) (ex (y:A) (eq x y)))",
        "(or)",
        "(seq () true (or p (not p)))",
        "(all (x:A) (imp (rel R x) (ex (y:A) (eq (f x) y))))",
        "(rel S (f (c)) z)",
    ]:
        if text.startswith("(seq"):
            obj = parse_sequent(text, SIG)
            again = parse_sequent(print_sequent(obj), SIG)
        else:
            ctx = (zB,)
            obj = parse_formula(text, SIG, ctx)
            again = parse_formula(print_formula(obj), SIG, ctx)
        assert obj == again


def test_empty_connectives_are_truth_values():
    assert parse_formula("(or)") == FALSE
    assert parse_formula("(and)") == TRUE
    assert parse_formula("true") == TRUE
    assert print_formula(FALSE) == "false"
    assert print_formula(Not(Rel("p"))) == "(not p)"


def test_alpha_equivalence_is_equality():
    a = parse_formula("(ex (y:A) (eq x y))", SIG, (xA,))
    b = parse_formula("(ex (w:A) (eq x w))", SIG, (xA,))
    assert a == b
    assert hash(a) == hash(b)
    c = parse_formula("(ex (w:A) (eq w x))", SIG, (xA,))
    assert a != c


def test_nested_binders_get_distinct_names():
    phi = parse_formula("(ex (x:A) (all (y:A) (rel S x z)))", SIG, (zB,))
    names = {phi.block[0].name, phi.body.block[0].name}
    assert len(names) == 2
    for n in names:
        assert n.startswith("?")


def test_substitution_capture_avoidance():
    # substituting x for y in (ex x. x = y) must not capture
    phi = Exists((xA,), Eq(xA, yA))
    out = substitute(phi, {"y": xA})
    assert out == Exists((Var("w", "A"),), Eq(Var("w", "A"), xA))
    assert list(free_vars(out)) == ["x"]


def test_substitution_ignores_bound_occurrences():
    phi = Exists((xA,), Eq(xA, xA))
    assert substitute(phi, {"x": App("c", (), "A")}) == phi


@st.composite
def formulas(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        kind = draw(st.sampled_from(["rel", "eq", "prop"]))
        if kind == "rel":
            return Rel("R", (draw(st.sampled_from([xA, yA, App("c", (), "A")])),))
        if kind == "eq":
            return Eq(draw(st.sampled_from([xA, yA])), draw(st.sampled_from([xA, App("f", (xA,), "A")])))
        return Rel(draw(st.sampled_from(["p", "q"])))
    kind = draw(st.sampled_from(["and", "or", "imp", "ex", "all"]))
    if kind in ("and", "or"):
        parts = tuple(draw(st.lists(formulas(depth=depth - 1), max_size=3)))
        return And(parts) if kind == "and" else Or(parts)
    if kind == "imp":
        return Imp(draw(formulas(depth=depth - 1)), draw(formulas(depth=depth - 1)))
    body = draw(formulas(depth=depth - 1))
    cls = Exists if kind == "ex" else Forall
    return cls((draw(st.sampled_from([xA, yA])),), body)


@settings(max_examples=120, deadline=None)
@given(formulas())
def test_round_trip_random(phi):
    ctx = canonical_context(phi)
    assert parse_formula(print_formula(phi), SIG, ctx) == phi


@settings(max_examples=120, deadline=None)
@given(formulas())
def test_substitution_composition(phi):
    # phi[f(y)/x][c/y]  ==  phi[f(c)/x, c/y]
    c = App("c", (), "A")
    s1 = {"x": App("f", (yA,), "A")}
    s2 = {"y": c}
    lhs = substitute(substitute(phi, s1), s2)
    rhs = substitute(phi, {"x": App("f", (c,), "A"), "y": c})
    assert lhs == rhs


def test_subformula_set_disjunction():
    th = Theory(SIG, [parse_sequent("(seq () true (or p q))", SIG)], "coherent")
    assert subformula_set(th) == [TRUE, Or((Rel("p"), Rel("q"))), Rel("p"), Rel("q")]


def test_subformula_set_opens_binders():
    th = Theory(SIG, [parse_sequent("(seq () true (ex (x:A) (rel R x)))", SIG)], "coherent")
    subs = subformula_set(th)
    assert subs[0] == TRUE
    assert subs[2] == Rel("R", (Var("v0", "A"),))


def test_subformula_set_dedupes_alpha_variants():
    th = Theory(
        SIG,
        [
            parse_sequent("(seq () (ex (x:A) (rel R x)) (ex (u:A) (rel R u)))", SIG),
        ],
        "coherent",
    )
    subs = subformula_set(th)
    assert len(subs) == 2  # the existential and its opened body


def test_sort_errors_name_the_symbol():
    with pytest.raises(sx.SortError) as e:
        parse_formula("(rel R z)", SIG, (zB,))
    assert "R" in str(e.value)
    with pytest.raises(sx.ParseError):
        parse_formula("(rel R missing)", SIG)


def test_context_escape_rejected():
    with pytest.raises(ValueError):
        Sequent((), Rel("R", (xA,)), TRUE)


def test_empty_quantifier_block_rejected():
    with pytest.raises(ValueError):
        Exists((), Rel("p"))


def test_reserved_prefix_rejected_for_free_names():
    with pytest.raises(sx.ParseError):
        parse_sequent("(seq (?1_0:A) (rel R ?1_0) true)", SIG)


def test_fragments():
    assert sx.fragment_of(parse_formula("(and p (ex (x:A) (rel R x)))", SIG)) == "regular"
    assert sx.fragment_of(parse_formula("(or p q)")) == "coherent"
    assert sx.fragment_of(parse_formula("(not p)")) == "first-order"
    with pytest.raises(sx.FragmentError):
        Theory(SIG, [parse_sequent("(seq () p (not q))", SIG)], "coherent")


def test_canonical_context_sorted_and_stable():
    phi = parse_formula("(and (rel S y z) (rel R x))", SIG, (xA, yA, zB))
    assert canonical_context(phi) == (Var("x", "A"), Var("y", "A"), zB)
    assert canonical_context(phi, base=(zB,)) == (zB, Var("x", "A"), Var("y", "A"))


def test_theory_round_trip():
    th = Theory(SIG, [parse_sequent("(seq () p (or p q))", SIG)], "coherent", name="demo")
    th2 = parse_theory(print_theory(th))
    assert th2.signature == SIG
    assert th2.axioms == th.axioms
    assert th2.fragment == "coherent"
    assert th2.name == "demo"
