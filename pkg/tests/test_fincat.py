from doctrines.fincat import (
    FinCategory,
    FinFunctor,
    FinNatTrans,
    Product,
    arrow_category,
    compose_functors,
    discrete_category,
    identity_functor,
    terminal_category,
    validate_category,
    validate_functor,
    validate_nat_trans,
    vertical_compose,
)


def test_terminal_category_valid():
    assert validate_category(terminal_category()).ok


def test_broken_composition_reported():
    c = FinCategory(
        objects=["a", "b"],
        arrows={"ia": ("a", "a"), "ib": ("b", "b"), "f": ("a", "b")},
        identities={"a": "ia", "b": "ib"},
        composition={
            ("ia", "ia"): "ia",
            ("ib", "ib"): "ib",
            ("f", "ia"): "f",
            ("ib", "f"): "ia",  # wrong target
        },
    )
    rep = validate_category(c)
    assert not rep.ok
    assert any(v.rule == "composition-endpoints" for v in rep.violations)


def test_arrow_category_with_products_valid():
    rep = validate_category(arrow_category())
    assert rep.ok, str(rep)


def test_pair_projection_identity():
    c = arrow_category()
    # <pr1, pr2> on a declared product is the identity of the product object
    for (a, b), p in c.products.items():
        assert c.pair(p.pr1, p.pr2) == c.identity(p.obj)


def test_identity_functor_valid():
    c = arrow_category()
    assert validate_functor(identity_functor(c), check_products=True).ok


def test_constant_functor_to_terminal_products_ok():
    d2 = discrete_category(2)
    # discrete 2 has trivial products on the diagonal only; declare none,
    # so product preservation is vacuous, then check the terminal target.
    t = terminal_category()
    f = FinFunctor(d2, t, {o: "*" for o in d2.objects}, {a: "id*" for a in d2.arrows})
    assert validate_functor(f, check_products=True).ok


def test_functor_product_not_preserved_reported():
    from doctrines.finset import FinMap, table_category

    # source: walking arrow, declaring only the product (0,1) |-> 0 with
    # projections (id0, a), which is valid since 1 is terminal.
    src = FinCategory(
        objects=["0", "1"],
        arrows={"id0": ("0", "0"), "id1": ("1", "1"), "a": ("0", "1")},
        identities={"0": "id0", "1": "id1"},
        composition={
            ("id0", "id0"): "id0",
            ("id1", "id1"): "id1",
            ("a", "id0"): "a",
            ("id1", "a"): "a",
        },
        products={("0", "1"): Product("0", "id0", "a")},
    )
    assert validate_category(src).ok
    # target: finite sets of sizes 1 and 2 with the product (1,2) |-> 2.
    tgt, name_of, _ = table_category([1, 2], product_pairs=[(1, 2)])
    assert validate_category(tgt).ok
    func = FinFunctor(
        src,
        tgt,
        {"0": 1, "1": 2},
        {
            "id0": name_of[FinMap(1, 1, (0,))],
            "id1": name_of[FinMap(2, 2, (0, 1))],
            "a": name_of[FinMap(1, 2, (0,))],
        },
    )
    assert validate_functor(func).ok
    # F maps the source product object to the singleton, but the target
    # product of the images is the pair: the comparison 1 -> 2 is the
    # constant map, which has no inverse.
    rep = validate_functor(func, check_products=True)
    assert any(v.rule == "product-not-preserved" for v in rep.violations)


def test_identity_nat_trans_valid():
    c = arrow_category()
    f = identity_functor(c)
    t = FinNatTrans(f, f, {o: c.identity(o) for o in c.objects})
    assert validate_nat_trans(t).ok


def test_nat_trans_between_constant_functors():
    d2 = discrete_category(2)
    c = arrow_category()
    f0 = FinFunctor(d2, c, {o: "0" for o in d2.objects}, {a: "id0" for a in d2.arrows})
    f1 = FinFunctor(d2, c, {o: "1" for o in d2.objects}, {a: "id1" for a in d2.arrows})
    t = FinNatTrans(f0, f1, {o: "a" for o in d2.objects})
    assert validate_nat_trans(t).ok


def test_non_commuting_square_reported():
    # two parallel functors from the walking arrow into a category with two
    # distinct parallel arrows; swapped components break naturality.
    arrows = {
        "i0": ("0", "0"),
        "i1": ("1", "1"),
        "u": ("0", "1"),
        "v": ("0", "1"),
    }
    comp = {
        ("i0", "i0"): "i0",
        ("i1", "i1"): "i1",
        ("u", "i0"): "u",
        ("i1", "u"): "u",
        ("v", "i0"): "v",
        ("i1", "v"): "v",
    }
    tgt = FinCategory(["0", "1"], arrows, {"0": "i0", "1": "i1"}, comp)
    src = arrow_category(with_products=False)
    fu = FinFunctor(src, tgt, {"0": "0", "1": "1"}, {"id0": "i0", "id1": "i1", "a": "u"})
    fv = FinFunctor(src, tgt, {"0": "0", "1": "1"}, {"id0": "i0", "id1": "i1", "a": "v"})
    assert validate_functor(fu).ok and validate_functor(fv).ok
    bad = FinNatTrans(fu, fv, {"0": "i0", "1": "i1"})
    rep = validate_nat_trans(bad)
    assert any(v.rule == "naturality" for v in rep.violations)


def test_functor_composition_preserves_validity():
    c = arrow_category()
    f = identity_functor(c)
    g = compose_functors(f, f)
    assert validate_functor(g).ok


def test_vertical_composition_valid():
    c = arrow_category()
    f = identity_functor(c)
    t = FinNatTrans(f, f, {o: c.identity(o) for o in c.objects})
    assert validate_nat_trans(vertical_compose(t, t)).ok
