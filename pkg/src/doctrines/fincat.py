"""Finite categories presented by explicit tables.

A category is given by object and arrow identifier lists, an identity
assignment, and a total composition table on composable pairs, optionally
with chosen binary products and a chosen terminal object.  Identifiers are
opaque hashable values (strings in hand-written presentations, sizes in
tabulated finite-set fragments); equality is identifier equality.  All
values are immutable after construction and all operations are pure.

Validators check every axiom exhaustively and report violations with
witnesses instead of raising, so broken presentations can be diagnosed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Tuple

from .report import ValidationReport


@dataclass(frozen=True)
class Product:
    """A chosen binary product: the object and its two projections."""
    obj: object
    pr1: object
    pr2: object


class FinCategory:
    def __init__(
        self,
        objects: Iterable[str],
        arrows: Dict[str, Tuple[str, str]],
        identities: Dict[str, str],
        composition: Dict[Tuple[str, str], str],
        products: Optional[Dict[Tuple[str, str], Product]] = None,
        terminal: Optional[str] = None,
        bang: Optional[Dict[str, str]] = None,
    ):
        self.objects: Tuple[str, ...] = tuple(objects)
        self.arrows: Dict[str, Tuple[str, str]] = dict(arrows)
        self.identities: Dict[str, str] = dict(identities)
        self.table: Dict[Tuple[str, str], str] = dict(composition)
        self.products: Dict[Tuple[str, str], Product] = dict(products or {})
        self.terminal = terminal
        self.bang_table: Dict[str, str] = dict(bang or {})
        self._pair_cache: Dict[Tuple[str, str], str] = {}

    def src(self, f: str) -> str:
        return self.arrows[f][0]

    def dst(self, f: str) -> str:
        return self.arrows[f][1]

    def identity(self, a: str) -> str:
        return self.identities[a]

    def compose(self, g: str, f: str) -> str:
        """g after f."""
        return self.table[(g, f)]

    def hom(self, a: str, b: str) -> Iterator[str]:
        for name, (s, t) in self.arrows.items():
            if s == a and t == b:
                yield name

    def arrow_names(self) -> Tuple[str, ...]:
        return tuple(self.arrows)

    def product(self, a: str, b: str) -> Product:
        return self.products[(a, b)]

    def pair(self, f: str, g: str) -> str:
        """The unique arrow <f,g> into the chosen product of the codomains."""
        key = (f, g)
        if key in self._pair_cache:
            return self._pair_cache[key]
        if self.src(f) != self.src(g):
            raise ValueError(f"pairing of non-parallel-domain arrows {f}, {g}")
        p = self.product(self.dst(f), self.dst(g))
        found = [
            h
            for h in self.hom(self.src(f), p.obj)
            if self.table.get((p.pr1, h)) == f and self.table.get((p.pr2, h)) == g
        ]
        if len(found) != 1:
            raise ValueError(f"pairing <{f},{g}> not unique or missing: {found}")
        self._pair_cache[key] = found[0]
        return found[0]

    def diagonal(self, a: str) -> str:
        i = self.identity(a)
        return self.pair(i, i)

    def bang(self, a: str) -> str:
        return self.bang_table[a]

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "arrows": {n: list(st) for n, st in sorted(self.arrows.items())},
            "identities": dict(sorted(self.identities.items())),
            "composition": {f"{g}.{f}": h for (g, f), h in sorted(self.table.items())},
            "products": {
                f"{a},{b}": [p.obj, p.pr1, p.pr2]
                for (a, b), p in sorted(self.products.items())
            },
            "terminal": self.terminal,
        }


class FinFunctor:
    def __init__(self, source: FinCategory, target, ob_map: Dict, ar_map: Dict):
        self.source = source
        self.target = target
        self.ob_map = dict(ob_map)
        self.ar_map = dict(ar_map)

    def ob(self, a):
        return self.ob_map[a]

    def ar(self, f):
        return self.ar_map[f]


class FinNatTrans:
    def __init__(self, source: FinFunctor, target: FinFunctor, components: Dict):
        self.source = source
        self.target = target
        self.components = dict(components)

    def at(self, a):
        return self.components[a]


def identity_functor(c: FinCategory) -> FinFunctor:
    return FinFunctor(c, c, {a: a for a in c.objects}, {f: f for f in c.arrows})


def compose_functors(g: FinFunctor, f: FinFunctor) -> FinFunctor:
    return FinFunctor(
        f.source,
        g.target,
        {a: g.ob(f.ob(a)) for a in f.source.objects},
        {n: g.ar(f.ar(n)) for n in f.source.arrows},
    )


def vertical_compose(t2: FinNatTrans, t1: FinNatTrans) -> FinNatTrans:
    """Component-wise composite of t1 : F => G and t2 : G => K."""
    cat = t1.source.target
    comps = {a: cat.compose(t2.at(a), t1.at(a)) for a in t1.source.source.objects}
    return FinNatTrans(t1.source, t2.target, comps)


def validate_category(c: FinCategory) -> ValidationReport:
    report = ValidationReport(subject="category")
    for f, (s, t) in c.arrows.items():
        if s not in c.objects or t not in c.objects:
            report.fail("arrow-endpoints", f, s, t)
    for a in c.objects:
        i = c.identities.get(a)
        if i is None or i not in c.arrows:
            report.fail("identity-missing", a)
        elif c.arrows[i] != (a, a):
            report.fail("identity-endpoints", a, i)
    if report.failed:
        return report

    names = list(c.arrows)
    composable = [
        (g, f) for g in names for f in names if c.src(g) == c.dst(f)
    ]
    composable_set = set(composable)
    for g, f in composable:
        h = c.table.get((g, f))
        if h is None:
            report.fail("composition-missing", g, f)
        elif h not in c.arrows:
            report.fail("composition-unknown-arrow", g, f, h)
        elif c.arrows[h] != (c.src(f), c.dst(g)):
            report.fail("composition-endpoints", g, f, h)
    for key in c.table:
        if key not in composable_set:
            report.fail("composition-spurious-entry", *key)
    if report.failed:
        return report

    for f in names:
        if c.compose(f, c.identity(c.src(f))) != f:
            report.fail("unit-right", f)
        if c.compose(c.identity(c.dst(f)), f) != f:
            report.fail("unit-left", f)
    for h in names:
        for g in names:
            if c.src(h) != c.dst(g):
                continue
            for f in names:
                if c.src(g) != c.dst(f):
                    continue
                if c.compose(c.compose(h, g), f) != c.compose(h, c.compose(g, f)):
                    report.fail("associativity", h, g, f)

    for (a, b), p in c.products.items():
        if p.obj not in c.objects:
            report.fail("product-object", a, b, p.obj)
            continue
        if c.arrows.get(p.pr1) != (p.obj, a) or c.arrows.get(p.pr2) != (p.obj, b):
            report.fail("product-projections", a, b)
            continue
        for x in c.objects:
            for f in c.hom(x, a):
                for g in c.hom(x, b):
                    mediating = [
                        h
                        for h in c.hom(x, p.obj)
                        if c.compose(p.pr1, h) == f and c.compose(p.pr2, h) == g
                    ]
                    if len(mediating) == 0:
                        report.fail("pairing-missing", a, b, f, g)
                    elif len(mediating) > 1:
                        report.fail("pairing-not-unique", a, b, f, g, tuple(mediating))

    if c.terminal is not None:
        if c.terminal not in c.objects:
            report.fail("terminal-object", c.terminal)
        else:
            for x in c.objects:
                into = list(c.hom(x, c.terminal))
                if len(into) != 1:
                    report.fail("terminal-not-unique", x, tuple(into))
                elif c.bang_table.get(x, into[0]) != into[0]:
                    report.fail("terminal-bang-mismatch", x)
    return report


def validate_functor(f: FinFunctor, check_products: bool = False) -> ValidationReport:
    report = ValidationReport(subject="functor")
    src, tgt = f.source, f.target
    for a in src.objects:
        if f.ob_map.get(a) not in tgt.objects:
            report.fail("object-map", a)
    for n in src.arrows:
        fn = f.ar_map.get(n)
        if fn not in tgt.arrows:
            report.fail("arrow-map", n)
        elif tgt.arrows[fn] != (f.ob(src.src(n)), f.ob(src.dst(n))):
            report.fail("arrow-endpoints", n, fn)
    if report.failed:
        return report
    for a in src.objects:
        if f.ar(src.identity(a)) != tgt.identity(f.ob(a)):
            report.fail("identity-preservation", a)
    for g in src.arrows:
        for h in src.arrows:
            if src.src(g) != src.dst(h):
                continue
            if f.ar(src.compose(g, h)) != tgt.compose(f.ar(g), f.ar(h)):
                report.fail("composition-preservation", g, h)
    if check_products:
        for (a, b), p in src.products.items():
            try:
                q = tgt.product(f.ob(a), f.ob(b))
            except KeyError:
                report.fail("product-missing-in-target", a, b)
                continue
            try:
                cmp_arrow = tgt.pair(f.ar(p.pr1), f.ar(p.pr2))
            except ValueError:
                report.fail("product-comparison-missing", a, b)
                continue
            # invertibility of <F pr1, F pr2> : F(AxB) -> FA x FB
            inverses = [
                inv
                for inv in tgt.hom(q.obj, f.ob(p.obj))
                if tgt.compose(inv, cmp_arrow) == tgt.identity(f.ob(p.obj))
                and tgt.compose(cmp_arrow, inv) == tgt.identity(q.obj)
            ]
            if not inverses:
                report.fail("product-not-preserved", a, b)
    return report


def validate_nat_trans(t: FinNatTrans) -> ValidationReport:
    report = ValidationReport(subject="nat-trans")
    f, g = t.source, t.target
    if f.source is not g.source or f.target is not g.target:
        report.fail("not-parallel")
        return report
    cat = f.target
    for a in f.source.objects:
        comp = t.components.get(a)
        if comp is None or cat.arrows.get(comp) != (f.ob(a), g.ob(a)):
            report.fail("component-endpoints", a, comp)
    if report.failed:
        return report
    for n in f.source.arrows:
        a, b = f.source.arrows[n]
        if cat.compose(t.at(b), f.ar(n)) != cat.compose(g.ar(n), t.at(a)):
            report.fail("naturality", n)
    return report


# -- small stock categories used by fixtures and tests ----------------------


def terminal_category() -> FinCategory:
    return FinCategory(
        objects=["*"],
        arrows={"id*": ("*", "*")},
        identities={"*": "id*"},
        composition={("id*", "id*"): "id*"},
        products={("*", "*"): Product("*", "id*", "id*")},
        terminal="*",
        bang={"*": "id*"},
    )


def discrete_category(n: int) -> FinCategory:
    objs = [str(i) for i in range(n)]
    return FinCategory(
        objects=objs,
        arrows={f"id{o}": (o, o) for o in objs},
        identities={o: f"id{o}" for o in objs},
        composition={(f"id{o}", f"id{o}"): f"id{o}" for o in objs},
    )


def arrow_category(with_products: bool = True) -> FinCategory:
    """The walking arrow 0 -> 1, with products 0x0=0, 0x1=1x0=0, 1x1=1."""
    arrows = {"id0": ("0", "0"), "id1": ("1", "1"), "a": ("0", "1")}
    comp = {
        ("id0", "id0"): "id0",
        ("id1", "id1"): "id1",
        ("a", "id0"): "a",
        ("id1", "a"): "a",
    }
    products = None
    if with_products:
        products = {
            ("0", "0"): Product("0", "id0", "id0"),
            ("0", "1"): Product("0", "id0", "a"),
            ("1", "0"): Product("0", "a", "id0"),
            ("1", "1"): Product("1", "id1", "id1"),
        }
    return FinCategory(
        objects=["0", "1"],
        arrows=arrows,
        identities={"0": "id0", "1": "id1"},
        composition=comp,
        products=products,
        terminal="1" if with_products else None,
        bang={"0": "a", "1": "id1"} if with_products else None,
    )
