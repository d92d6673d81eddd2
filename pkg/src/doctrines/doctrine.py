"""Finite primary and elementary doctrines.

A doctrine assigns to every object of a finite-product base category a
meet-semilattice fiber with top, to every base arrow a reindexing map, and
to every object a fibered-equality element of the fiber over its square.
Two realizations coexist:

* `TableDoctrine`: everything explicit (fibers are `FinPoset` tables),
  for hand-built examples and broken fixtures;
* `SubsetsDoctrine`: the subsets doctrine over skeletal finite sets,
  backed by frozensets and computed on demand, since fibers over large
  product objects (squares of squares) cannot be tabulated.

Validators quantify over the base's core objects and over hom sets small
enough to enumerate; anything skipped for budget is reported as undecided
rather than silently passed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple

from .fincat import FinCategory, Product
from .finset import FinMap, FinSetCat
from .report import ValidationReport

ENUM_FIBER_LIMIT = 4096   # refuse to enumerate larger fibers
GLB_CHECK_LIMIT = 128     # full glb check is cubic in fiber size


@dataclass(frozen=True)
class FinSubobject:
    """A canonical subobject: a member set inside an ambient finite set.

    `ambient` is a size (canonical carrier range(n)) in the skeletal
    finite-set doctrine, or a tuple of per-position carrier sizes when the
    subobject lives over a structure's context product.
    """
    ambient: object
    members: frozenset

    def __post_init__(self):
        if isinstance(self.ambient, int):
            if any(not (0 <= m < self.ambient) for m in self.members):
                raise ValueError("member outside ambient")

    def __repr__(self) -> str:
        return f"Sub({self.ambient}, {sorted(self.members)})"


def full_subobject(ambient: int) -> FinSubobject:
    return FinSubobject(ambient, frozenset(range(ambient)))


# --------------------------------------------------------------------------
# fibers


class FinPoset:
    """A finite meet-semilattice with top, given by explicit tables."""

    def __init__(self, elements: Iterable, leq: Iterable[Tuple], meets: Dict, top):
        self._elements = tuple(elements)
        self._leq = frozenset(leq)
        self._meets = dict(meets)
        self.top = top

    @classmethod
    def from_leq(cls, elements: Iterable, leq: Iterable[Tuple]) -> "FinPoset":
        """Build meet table and top by search; raises if no glb/top exists."""
        elems = tuple(elements)
        rel = frozenset(leq)
        tops = [t for t in elems if all((x, t) in rel for x in elems)]
        if len(tops) != 1:
            raise ValueError(f"no unique top: {tops}")
        meets = {}
        for x in elems:
            for y in elems:
                lower = [z for z in elems if (z, x) in rel and (z, y) in rel]
                glbs = [z for z in lower if all((w, z) in rel for w in lower)]
                if len(glbs) != 1:
                    raise ValueError(f"no unique meet for {x}, {y}")
                meets[(x, y)] = glbs[0]
        return cls(elems, rel, meets, tops[0])

    def elements(self) -> Iterator:
        return iter(self._elements)

    def leq(self, x, y) -> bool:
        return (x, y) in self._leq

    def meet(self, x, y):
        return self._meets[(x, y)]


class SubsetFiber:
    """The lattice of subsets of a canonical finite set, computed lazily."""

    def __init__(self, ambient: int):
        self.ambient = ambient
        self.top = full_subobject(ambient)

    def elements(self) -> Iterator[FinSubobject]:
        if 2 ** self.ambient > ENUM_FIBER_LIMIT:
            raise ValueError(f"subset fiber over {self.ambient} too large to enumerate")
        for mask in range(2 ** self.ambient):
            yield FinSubobject(
                self.ambient,
                frozenset(i for i in range(self.ambient) if mask >> i & 1),
            )

    def leq(self, x: FinSubobject, y: FinSubobject) -> bool:
        return x.members <= y.members

    def meet(self, x: FinSubobject, y: FinSubobject) -> FinSubobject:
        return FinSubobject(self.ambient, x.members & y.members)


class SubFiber:
    """A sub-meet-semilattice of another fiber on a fixed element list."""

    def __init__(self, base_fiber, elements: Iterable, top=None):
        self.base = base_fiber
        self._elements = tuple(elements)
        self.top = base_fiber.top if top is None else top

    def elements(self) -> Iterator:
        return iter(self._elements)

    def leq(self, x, y) -> bool:
        return self.base.leq(x, y)

    def meet(self, x, y):
        return self.base.meet(x, y)


class ImageFiber:
    """The image of (phi /\\ -) inside another fiber, enumerated lazily."""

    def __init__(self, base_fiber, phi):
        self.base = base_fiber
        self.top = phi

    def elements(self) -> Iterator:
        seen = set()
        for alpha in self.base.elements():
            cut = self.base.meet(self.top, alpha)
            if cut not in seen:
                seen.add(cut)
                yield cut

    def leq(self, x, y) -> bool:
        return self.base.leq(x, y)

    def meet(self, x, y):
        return self.base.meet(x, y)


def validate_fiber(fiber, report: ValidationReport, at: object) -> None:
    """Exhaustively check poset laws, glb, and top on an enumerable fiber."""
    try:
        elems = list(fiber.elements())
    except ValueError:
        report.defer("fiber-not-enumerated", at)
        return
    for x in elems:
        if not fiber.leq(x, x):
            report.fail("leq-reflexive", at, x)
        if not fiber.leq(x, fiber.top):
            report.fail("top-not-maximum", at, x)
    for x, y in itertools.combinations(elems, 2):
        if fiber.leq(x, y) and fiber.leq(y, x):
            report.fail("leq-antisymmetric", at, x, y)
    if len(elems) <= GLB_CHECK_LIMIT:
        for x in elems:
            for y in elems:
                if fiber.leq(x, y):
                    for z in elems:
                        if fiber.leq(y, z) and not fiber.leq(x, z):
                            report.fail("leq-transitive", at, x, y, z)
        for x in elems:
            for y in elems:
                m = fiber.meet(x, y)
                if not (fiber.leq(m, x) and fiber.leq(m, y)):
                    report.fail("meet-not-lower-bound", at, x, y)
                for z in elems:
                    if fiber.leq(z, x) and fiber.leq(z, y) and not fiber.leq(z, m):
                        report.fail("meet-not-greatest", at, x, y, z)
    else:
        report.defer("glb-check-skipped", at, len(elems))


# --------------------------------------------------------------------------
# doctrines


class Doctrine:
    """Common interface: a base category, fibers, reindexing, equality."""

    base = None

    def fiber(self, a):
        raise NotImplementedError

    def reindex(self, f) -> Callable:
        raise NotImplementedError

    def equality(self, a):
        raise NotImplementedError

    def top(self, a):
        return self.fiber(a).top

    def meet_at(self, a, x, y):
        return self.fiber(a).meet(x, y)

    def leq_at(self, a, x, y) -> bool:
        return self.fiber(a).leq(x, y)


class TableDoctrine(Doctrine):
    def __init__(
        self,
        base: FinCategory,
        fibers: Dict,
        reindexings: Dict[str, Dict],
        equalities: Dict,
    ):
        self.base = base
        self.fibers = dict(fibers)
        self.reindexings = {f: dict(t) for f, t in reindexings.items()}
        self.equalities = dict(equalities)

    def fiber(self, a):
        return self.fibers[a]

    def reindex(self, f) -> Callable:
        table = self.reindexings[f]
        return lambda x: table[x]

    def equality(self, a):
        return self.equalities[a]


class SubsetsDoctrine(Doctrine):
    """Subsets of canonical finite sets; reindexing is preimage."""

    def __init__(self, base: FinSetCat):
        self.base = base
        self._fibers: Dict[int, SubsetFiber] = {}

    def fiber(self, a: int) -> SubsetFiber:
        if a not in self._fibers:
            self._fibers[a] = SubsetFiber(a)
        return self._fibers[a]

    def reindex(self, f: FinMap) -> Callable:
        def pre(sub: FinSubobject) -> FinSubobject:
            return FinSubobject(f.src, f.preimage(sub.members))
        return pre

    def equality(self, a: int) -> FinSubobject:
        return FinSubobject(a * a, frozenset(i * a + i for i in range(a)))


def sub_finset_doctrine(max_size: int) -> SubsetsDoctrine:
    """The subsets doctrine over the skeleton of finite sets of size <= max_size."""
    if max_size < 1:
        raise ValueError("max_size must be >= 1 so the base has a terminal object")
    return SubsetsDoctrine(FinSetCat(range(max_size + 1)))


# --------------------------------------------------------------------------
# arrow enumeration helpers (table categories are finite; the finset base
# enumerates hom sets on demand and skips the ones beyond budget)


def core_arrows(cat, hom_budget: int = 30000) -> Iterator[Tuple[object, object, object]]:
    """Yield (f, src, dst) over arrows between core objects."""
    if isinstance(cat, FinCategory):
        for name, (s, t) in cat.arrows.items():
            yield name, s, t
        return
    for a in cat.objects:
        for b in cat.objects:
            if cat.hom_size(a, b) > hom_budget:
                continue
            for f in cat.hom(a, b):
                yield f, a, b


def composable_core_pairs(cat, hom_budget: int = 30000):
    """Yield (g, f) with g after f, both between core objects."""
    arrows = list(core_arrows(cat, hom_budget))
    by_src: Dict = {}
    for f, s, t in arrows:
        by_src.setdefault(s, []).append((f, t))
    for f, s, t in arrows:
        for g, _ in by_src.get(t, []):
            yield g, f


# --------------------------------------------------------------------------
# validators and fiberwise operations


def validate_primary(d: Doctrine, hom_budget: int = 30000) -> ValidationReport:
    report = ValidationReport(subject="primary doctrine")
    for a in d.base.objects:
        validate_fiber(d.fiber(a), report, a)
    if report.failed:
        return report
    for a in d.base.objects:
        rid = d.reindex(d.base.identity(a))
        fib = d.fiber(a)
        try:
            elems = list(fib.elements())
        except ValueError:
            report.defer("identity-reindex-skipped", a)
            continue
        for x in elems:
            if rid(x) != x:
                report.fail("reindex-identity", a, x)
    for f, s, t in core_arrows(d.base, hom_budget):
        rf = d.reindex(f)
        src_fib, dst_fib = d.fiber(s), d.fiber(t)
        try:
            elems = list(dst_fib.elements())
        except ValueError:
            report.defer("reindex-check-skipped", f)
            continue
        if rf(dst_fib.top) != src_fib.top:
            report.fail("reindex-top", f)
        for x in elems:
            for y in elems:
                if dst_fib.leq(x, y) and not src_fib.leq(rf(x), rf(y)):
                    report.fail("reindex-monotone", f, x, y)
                if rf(dst_fib.meet(x, y)) != src_fib.meet(rf(x), rf(y)):
                    report.fail("reindex-meet", f, x, y)
    for g, f in composable_core_pairs(d.base, hom_budget):
        gf = d.base.compose(g, f)
        rgf, rf, rg = d.reindex(gf), d.reindex(f), d.reindex(g)
        try:
            elems = list(d.fiber(d.base.dst(g)).elements())
        except ValueError:
            continue
        for x in elems:
            if rgf(x) != rf(rg(x)):
                report.fail("reindex-functorial", g, f, x)
    return report


def descent_set(d: Doctrine, a, rho) -> List:
    """Elements alpha of the fiber over `a` with pr1*(alpha) /\\ rho <= pr2*(alpha)."""
    p = d.base.product(a, a)
    r1, r2 = d.reindex(p.pr1), d.reindex(p.pr2)
    sq = d.fiber(p.obj)
    out = []
    for alpha in d.fiber(a).elements():
        if sq.leq(sq.meet(r1(alpha), rho), r2(alpha)):
            out.append(alpha)
    return out


def box(d: Doctrine, a, rho_a, b, rho_b):
    """rho_a boxtimes rho_b in the fiber over (a x b) x (a x b)."""
    p = d.base.product(a, b)
    pp = d.base.product(p.obj, p.obj)
    pr1 = d.base.compose(p.pr1, pp.pr1)
    pr2 = d.base.compose(p.pr2, pp.pr1)
    pr3 = d.base.compose(p.pr1, pp.pr2)
    pr4 = d.base.compose(p.pr2, pp.pr2)
    m13 = d.base.pair(pr1, pr3)
    m24 = d.base.pair(pr2, pr4)
    fib = d.fiber(pp.obj)
    return fib.meet(d.reindex(m13)(rho_a), d.reindex(m24)(rho_b))


def validate_elementary(d: Doctrine, hom_budget: int = 30000) -> ValidationReport:
    report = validate_primary(d, hom_budget)
    report.subject = "elementary doctrine"
    if report.failed:
        return report
    for a in d.base.objects:
        try:
            delta = d.equality(a)
            diag = d.base.pair(d.base.identity(a), d.base.identity(a))
        except (KeyError, ValueError):
            report.fail("square-structure-missing", a)
            continue
        if not d.fiber(a).leq(d.top(a), d.reindex(diag)(delta)):
            report.fail("equality-reflexive", a)
        try:
            all_elems = set(d.fiber(a).elements())
        except ValueError:
            report.defer("descent-check-skipped", a)
            continue
        des = set(descent_set(d, a, delta))
        if des != all_elems:
            report.fail("descent-not-full-fiber", a, tuple(sorted(map(repr, all_elems - des))))
    for a in d.base.objects:
        for b in d.base.objects:
            try:
                p = d.base.product(a, b)
                bx = box(d, a, d.equality(a), b, d.equality(b))
                pp = d.base.product(p.obj, p.obj)
            except (KeyError, ValueError):
                report.fail("box-structure-missing", a, b)
                continue
            if not d.fiber(pp.obj).leq(bx, d.equality(p.obj)):
                report.fail("box-not-below-product-equality", a, b)
    return report


# --------------------------------------------------------------------------
# homomorphisms and 2-cells


class DoctrineHom:
    """A finite-product functor between bases plus fiberwise components.

    `ob`, `ar`, `component` are callables so that lazily presented doctrines
    (subsets over finite sets, syntactic fibers) can be sources and targets
    without tabulating anything.
    """

    def __init__(self, source: Doctrine, target: Doctrine, ob, ar, component):
        self.source = source
        self.target = target
        self._ob = ob
        self._ar = ar
        self._component = component

    def ob(self, a):
        return self._ob(a)

    def ar(self, f):
        return self._ar(f)

    def component(self, a) -> Callable:
        return self._component(a)


def identity_hom(d: Doctrine) -> DoctrineHom:
    return DoctrineHom(d, d, lambda a: a, lambda f: f, lambda a: (lambda x: x))


def hom_compose(h2: DoctrineHom, h1: DoctrineHom) -> DoctrineHom:
    return DoctrineHom(
        h1.source,
        h2.target,
        lambda a: h2.ob(h1.ob(a)),
        lambda f: h2.ar(h1.ar(f)),
        lambda a: (lambda x, a=a: h2.component(h1.ob(a))(h1.component(a)(x))),
    )


class DoctrineTwoCell:
    def __init__(self, source: DoctrineHom, target: DoctrineHom, component):
        self.source = source
        self.target = target
        self._component = component

    def component(self, a):
        return self._component(a)


def identity_cell(h: DoctrineHom) -> DoctrineTwoCell:
    return DoctrineTwoCell(h, h, lambda a: h.target.base.identity(h.ob(a)))


def vertical_cell(t2: DoctrineTwoCell, t1: DoctrineTwoCell) -> DoctrineTwoCell:
    cat = t1.source.target.base
    return DoctrineTwoCell(
        t1.source,
        t2.target,
        lambda a: cat.compose(t2.component(a), t1.component(a)),
    )


def horizontal_cell(t2: DoctrineTwoCell, t1: DoctrineTwoCell) -> DoctrineTwoCell:
    """t1 between homs P -> R, t2 between homs R -> S; result between composites."""
    cat = t2.source.target.base
    return DoctrineTwoCell(
        hom_compose(t2.source, t1.source),
        hom_compose(t2.target, t1.target),
        lambda a: cat.compose(
            t2.component(t1.target.ob(a)), t2.source.ar(t1.component(a))
        ),
    )


def validate_hom(h: DoctrineHom, hom_budget: int = 30000) -> ValidationReport:
    report = ValidationReport(subject="doctrine homomorphism")
    src_d, tgt_d = h.source, h.target
    for a in src_d.base.objects:
        comp = h.component(a)
        fa = h.ob(a)
        try:
            elems = list(src_d.fiber(a).elements())
        except ValueError:
            report.defer("component-check-skipped", a)
            continue
        tgt_fib = tgt_d.fiber(fa)
        if comp(src_d.top(a)) != tgt_fib.top:
            report.fail("component-top", a)
        for x in elems:
            for y in elems:
                if comp(src_d.meet_at(a, x, y)) != tgt_fib.meet(comp(x), comp(y)):
                    report.fail("component-meet", a, x, y)
        sq = src_d.base.product(a, a)
        fsq = tgt_d.base.product(fa, fa)
        if h.ob(sq.obj) != fsq.obj:
            report.fail("product-not-strictly-preserved", a)
        elif h.component(sq.obj)(src_d.equality(a)) != tgt_d.equality(fa):
            report.fail("component-equality", a)
    for f, s, t in core_arrows(src_d.base, hom_budget):
        comp_s, comp_t = h.component(s), h.component(t)
        rf_src = src_d.reindex(f)
        rf_tgt = tgt_d.reindex(h.ar(f))
        try:
            elems = list(src_d.fiber(t).elements())
        except ValueError:
            report.defer("naturality-check-skipped", f)
            continue
        for x in elems:
            if comp_s(rf_src(x)) != rf_tgt(comp_t(x)):
                report.fail("component-naturality", f, x)
    return report


def validate_2cell(t: DoctrineTwoCell, hom_budget: int = 30000) -> ValidationReport:
    report = ValidationReport(subject="doctrine 2-cell")
    f_hom, g_hom = t.source, t.target
    src_d = f_hom.source
    tgt_d = f_hom.target
    cat = tgt_d.base
    for arrow, s, tt in core_arrows(src_d.base, hom_budget):
        lhs = cat.compose(t.component(tt), f_hom.ar(arrow))
        rhs = cat.compose(g_hom.ar(arrow), t.component(s))
        if lhs != rhs:
            report.fail("carrier-naturality", arrow)
    for a in src_d.base.objects:
        theta = t.component(a)
        pull = tgt_d.reindex(theta)
        try:
            elems = list(src_d.fiber(a).elements())
        except ValueError:
            report.defer("cell-check-skipped", a)
            continue
        fib = tgt_d.fiber(f_hom.ob(a))
        for alpha in elems:
            if not fib.leq(f_hom.component(a)(alpha), pull(g_hom.component(a)(alpha))):
                report.fail("cell-inequality", a, alpha)
    return report


# --------------------------------------------------------------------------
# adding an axiom


class AxiomImageDoctrine(Doctrine):
    """Fibers cut down to the image of (phi_A /\\ -); order inherited."""

    def __init__(self, inner: Doctrine, phi):
        self.inner = inner
        self.base = inner.base
        self.phi = phi
        self._phi_at: Dict = {}

    def phi_at(self, a):
        if a not in self._phi_at:
            self._phi_at[a] = self.inner.reindex(self.base.bang(a))(self.phi)
        return self._phi_at[a]

    def fiber(self, a):
        return ImageFiber(self.inner.fiber(a), self.phi_at(a))

    def reindex(self, f) -> Callable:
        return self.inner.reindex(f)

    def equality(self, a):
        sq = self.base.product(a, a)
        return self.inner.fiber(sq.obj).meet(self.phi_at(sq.obj), self.inner.equality(a))


def add_axiom(d: Doctrine, phi) -> Tuple[Doctrine, DoctrineHom]:
    """Force phi (an element of the terminal fiber) to become top.

    Returns the quotient-like doctrine together with the homomorphism with
    identity base functor and components alpha |-> phi_A /\\ alpha, through
    which every homomorphism sending phi to top factors uniquely.
    """
    out = AxiomImageDoctrine(d, phi)
    hom = DoctrineHom(
        d,
        out,
        lambda a: a,
        lambda f: f,
        lambda a: (lambda alpha, a=a: d.fiber(a).meet(out.phi_at(a), alpha)),
    )
    return out, hom
