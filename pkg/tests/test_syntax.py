import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doctrines.syntax import (
    App,
    EqAtom,
    ParseError,
    RelAtom,
    Signature,
    TermTuple,
    Theory,
    TheoryMorphism,
    Var,
    conj,
    ctx_compose,
    ctx_identity,
    ctx_pair,
    ctx_product,
    equality_formula,
    horn,
    make_eq,
    morphism_to_text,
    parse_morphism,
    parse_theory,
    reindex_formula,
    render_formula,
    substitute,
    term_height,
    term_sort,
    terms_of_sort,
    theory_to_text,
    top_formula,
    translate,
    translate_term,
)

MONOID_SRC = """\
sort elem
op e : -> elem
op mul : elem elem -> elem
ax mul(e, x1) = x1
ax mul(x1, e) = x1
ax mul(mul(x1, x2), x3) = mul(x1, mul(x2, x3))
"""

POSET_SRC = """\
sort elem
rel leq : elem elem
ax leq(x1, x1)
ax leq(x1, x2) & leq(x2, x3) => leq(x1, x3)
ax leq(x1, x2) & leq(x2, x1) => x1 = x2
"""

SEMILATTICE_SRC = """\
sort elem
op top : -> elem
op meet : elem elem -> elem
ax meet(x1, x1) = x1
ax meet(x1, x2) = meet(x2, x1)
ax meet(meet(x1, x2), x3) = meet(x1, meet(x2, x3))
ax meet(x1, top) = x1
"""


def monoid():
    return parse_theory(MONOID_SRC, name="monoid")


# -- parsing ------------------------------------------------------------------


def test_parse_monoid():
    t = monoid()
    assert t.signature.sorts == ("elem",)
    assert set(t.signature.ops) == {"e", "mul"}
    assert len(t.sequents) == 3
    assert all(s.premise.is_top for s in t.sequents)


def test_parse_empty_theory_one_sort():
    t = parse_theory("sort thing\n")
    assert t.signature.sorts == ("thing",)
    assert t.sequents == ()


def test_implicit_sort():
    t = parse_theory("op c : -> elem\n")
    assert t.signature.sorts == ("elem",)


def test_undeclared_symbol_reported_with_location():
    with pytest.raises(ParseError) as exc:
        parse_theory("sort elem\nax mul(x1, x1) = x1\n")
    assert exc.value.line == 2


def test_parse_quasi_identity():
    t = parse_theory(POSET_SRC)
    assert len(t.sequents) == 3
    assert not t.sequents[1].premise.is_top


def test_two_sorted_inference():
    src = """\
sort m
sort x
op e : -> m
op act : m x -> x
ax act(e, x1) = x1
"""
    t = parse_theory(src)
    assert t.sequents[0].ctx == ("x",)


def test_ambiguous_sort_needs_annotation():
    src = "sort a\nsort b\nax x1 = x1\n"
    with pytest.raises(ParseError):
        parse_theory(src)
    t = parse_theory("sort a\nsort b\nax [x1:b] x1 = x1\n")
    assert t.sequents[0].ctx == ("b",)


def test_round_trip_is_fixpoint():
    for src in (MONOID_SRC, POSET_SRC, SEMILATTICE_SRC):
        t = parse_theory(src)
        out = theory_to_text(t)
        assert parse_theory(out) == t
        assert theory_to_text(parse_theory(out)) == out


# -- substitution and the context category ------------------------------------


def test_substitute_variable():
    s = App("e")
    assert substitute(Var(0), (s,)) == s


def test_substitute_in_monoid_term():
    t = App("mul", (Var(0), Var(1)))
    got = substitute(t, (App("e"), Var(0)))
    assert got == App("mul", (App("e"), Var(0)))


def test_ctx_identity_composition():
    sig = monoid().signature
    ctx = ("elem", "elem")
    f = TermTuple(ctx, ("elem",), (App("mul", (Var(0), Var(1))),))
    assert ctx_compose(f, ctx_identity(ctx)) == f
    assert ctx_compose(ctx_identity(("elem",)), f) == f


def test_ctx_product_projections():
    p = ctx_product(("elem",), ("elem", "elem"))
    assert p.obj == ("elem", "elem", "elem")
    f = TermTuple(("elem",), ("elem",), (Var(0),))
    g = TermTuple(("elem",), ("elem", "elem"), (App("e"), Var(0)))
    both = ctx_pair(f, g)
    assert ctx_compose(p.pr1, both) == f
    assert ctx_compose(p.pr2, both) == g


@st.composite
def ground_terms(draw, max_depth=3):
    if max_depth == 1 or draw(st.booleans()):
        return App("e")
    return App("mul", (draw(ground_terms(max_depth=max_depth - 1)),
                       draw(ground_terms(max_depth=max_depth - 1))))


@st.composite
def open_terms(draw, nvars=2, max_depth=3):
    if max_depth == 1 or draw(st.integers(0, 2)) == 0:
        if draw(st.booleans()):
            return Var(draw(st.integers(0, nvars - 1)))
        return App("e")
    return App("mul", (draw(open_terms(nvars, max_depth - 1)),
                       draw(open_terms(nvars, max_depth - 1))))


@settings(max_examples=60)
@given(t=open_terms(), u1=open_terms(), u2=open_terms(), v1=ground_terms(), v2=ground_terms())
def test_substitution_composes(t, u1, u2, v1, v2):
    us = (u1, u2)
    vs = (v1, v2)
    lhs = substitute(substitute(t, us), vs)
    rhs = substitute(t, tuple(substitute(u, vs) for u in us))
    assert lhs == rhs


@settings(max_examples=60)
@given(a=open_terms(), b=open_terms(), c=open_terms(), d=open_terms())
def test_ctx_composition_associative(a, b, c, d):
    ctx2 = ("elem", "elem")
    f = TermTuple(ctx2, ctx2, (a, b))
    g = TermTuple(ctx2, ctx2, (c, d))
    h = TermTuple(ctx2, ctx2, (b, a))
    assert ctx_compose(ctx_compose(h, g), f) == ctx_compose(h, ctx_compose(g, f))


# -- formulas -----------------------------------------------------------------


def test_canonicalization_idempotent():
    atoms = [EqAtom(Var(1), Var(0)), EqAtom(Var(0), Var(1)), RelAtom("leq", (Var(0), Var(1)))]
    phi = horn(("elem", "elem"), atoms)
    again = horn(phi.ctx, phi.atoms)
    assert phi == again
    assert len(phi.atoms) == 2  # the two equations coincide after orientation


def test_reindex_top():
    tt = TermTuple(("elem",), ("elem", "elem"), (Var(0), App("e")))
    assert reindex_formula(top_formula(("elem", "elem")), tt) == top_formula(("elem",))


def test_reindex_equality_gives_term_equation():
    # pulling (y1 = y2) back along (t1, t2) yields (t1 = t2)
    t1 = App("mul", (Var(0), Var(1)))
    t2 = Var(0)
    tt = TermTuple(("elem", "elem"), ("elem", "elem"), (t1, t2))
    eq = horn(("elem", "elem"), [make_eq(Var(0), Var(1))])
    assert reindex_formula(eq, tt) == horn(("elem", "elem"), [make_eq(t1, t2)])


def test_reindex_variable_renaming():
    tt = TermTuple(("elem", "elem"), ("elem",), (Var(1),))
    phi = horn(("elem",), [RelAtom("leq", (Var(0), Var(0)))])
    got = reindex_formula(phi, tt)
    assert got == horn(("elem", "elem"), [RelAtom("leq", (Var(1), Var(1)))])


def test_equality_formula_shape():
    phi = equality_formula(("elem", "elem"))
    assert phi.ctx == ("elem",) * 4
    assert phi.atoms == frozenset([make_eq(Var(0), Var(2)), make_eq(Var(1), Var(3))])


# -- morphisms and translation ------------------------------------------------


def theories():
    return {
        "monoid.thy": monoid(),
        "poset.thy": parse_theory(POSET_SRC, name="poset"),
        "semilattice.thy": parse_theory(SEMILATTICE_SRC, name="semilattice"),
    }


def test_identity_translation():
    t = monoid()
    m = TheoryMorphism(t, t)
    phi = horn(("elem",), [make_eq(App("mul", (Var(0), App("e"))), Var(0))])
    assert translate(m, phi) == phi


def test_poset_to_semilattice_translation():
    mor_text = "source poset.thy\ntarget semilattice.thy\nrel leq -> meet(x1, x2) = x1\n"
    m = parse_morphism(mor_text, theories().__getitem__)
    phi = horn(("elem", "elem"), [RelAtom("leq", (Var(0), Var(1)))])
    got = translate(m, phi)
    assert got == horn(("elem", "elem"),
                       [make_eq(App("meet", (Var(0), Var(1))), Var(0))])


def test_scalar_style_translation():
    # one unary scalar symbol mapped to another, applied under substitution
    src = parse_theory("op s3 : elem -> elem\n", name="src")
    tgt = parse_theory("op s1 : elem -> elem\n", name="tgt")
    m = TheoryMorphism(src, tgt, op_map={"s3": App("s1", (Var(0),))})
    phi = horn(("elem", "elem"), [make_eq(App("s3", (Var(0),)), Var(1))])
    assert translate(m, phi) == horn(("elem", "elem"),
                                     [make_eq(App("s1", (Var(0),)), Var(1))])


def test_translate_commutes_with_reindexing():
    ths = theories()
    m = parse_morphism(
        "source poset.thy\ntarget semilattice.thy\nrel leq -> meet(x1, x2) = x1\n",
        ths.__getitem__,
    )
    phi = horn(("elem", "elem"), [RelAtom("leq", (Var(0), Var(1)))])
    tt = TermTuple(("elem",), ("elem", "elem"), (Var(0), Var(0)))
    lhs = translate(m, reindex_formula(phi, tt))
    tt_translated = TermTuple(
        m.map_ctx(tt.src), m.map_ctx(tt.dst),
        tuple(translate_term(m, t) for t in tt.terms),
    )
    rhs = reindex_formula(translate(m, phi), tt_translated)
    assert lhs == rhs


def test_morphism_round_trip():
    ths = theories()
    text = "source poset.thy\ntarget semilattice.thy\nrel leq -> meet(x1, x2) = x1\n"
    m = parse_morphism(text, ths.__getitem__)
    out = morphism_to_text(m)
    again = parse_morphism(out, ths.__getitem__)
    assert morphism_to_text(again) == out
    assert again.rel_map == m.rel_map and again.op_map == m.op_map


def test_morphism_missing_symbol_rejected():
    ths = theories()
    with pytest.raises(ParseError):
        parse_morphism("source poset.thy\ntarget monoid.thy\n", ths.__getitem__)


# -- bounded term enumeration --------------------------------------------------


def test_terms_of_sort_heights():
    sig = monoid().signature
    ts1 = terms_of_sort(sig, ("elem",), "elem", 1)
    assert ts1 == [Var(0), App("e")]
    ts2 = terms_of_sort(sig, ("elem",), "elem", 2)
    assert App("mul", (Var(0), App("e"))) in ts2
    assert all(term_height(t) <= 2 for t in ts2)
