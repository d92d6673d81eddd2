"""Skeletal finite sets with canonical carriers {0, ..., n-1}.

Objects are sizes, arrows are image tuples.  The chosen product of sizes
a and b is a*b under the encoding (i, j) |-> i*b + j, so nested products
flatten to mixed-radix indices and chosen products are strictly
associative.  Hom sets are enumerated on demand; nothing is tabulated,
which keeps large objects (squares of squares) usable as long as no one
asks to list their arrows.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

from .fincat import Product


@dataclass(frozen=True)
class FinMap:
    src: int
    dst: int
    images: Tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.src:
            raise ValueError(f"map from {self.src} needs {self.src} images")
        if any(not (0 <= v < self.dst) for v in self.images):
            raise ValueError(f"image out of range for codomain {self.dst}")

    def __call__(self, i: int) -> int:
        return self.images[i]

    def preimage(self, members: frozenset) -> frozenset:
        return frozenset(i for i, v in enumerate(self.images) if v in members)

    def image(self, members: Iterable[int]) -> frozenset:
        return frozenset(self.images[i] for i in members)

    def is_surjective(self) -> bool:
        return set(self.images) == set(range(self.dst))

    def __repr__(self) -> str:
        return f"FinMap({self.src}->{self.dst}, {list(self.images)})"


def identity_map(n: int) -> FinMap:
    return FinMap(n, n, tuple(range(n)))


def compose_maps(g: FinMap, f: FinMap) -> FinMap:
    """g after f."""
    if f.dst != g.src:
        raise ValueError(f"cannot compose {g} after {f}")
    return FinMap(f.src, g.dst, tuple(g.images[v] for v in f.images))


def encode_pair(i: int, j: int, b: int) -> int:
    return i * b + j

def decode_pair(k: int, b: int) -> Tuple[int, int]:
    return divmod(k, b)


def encode_tuple(values: Tuple[int, ...], sizes: Tuple[int, ...]) -> int:
    """Mixed-radix index, last position fastest; matches nested pair encoding."""
    idx = 0
    for v, s in zip(values, sizes):
        idx = idx * s + v
    return idx


def decode_tuple(idx: int, sizes: Tuple[int, ...]) -> Tuple[int, ...]:
    out = []
    for s in reversed(sizes):
        idx, r = divmod(idx, s)
        out.append(r)
    return tuple(reversed(out))


def map_name(f: FinMap) -> str:
    return f"m{f.src}>{f.dst}:" + ",".join(map(str, f.images))


def table_category(sizes: Iterable[int], product_pairs: Iterable[Tuple[int, int]] = (),
                   terminal: bool = False):
    """Tabulate a fragment of finite sets as an explicit FinCategory.

    Returns (category, name_of, map_of): name_of takes a FinMap to its arrow
    name, map_of the inverse.  Declared product pairs must have their product
    size among `sizes`.  Intended for small fixtures; hom sets are generated
    in full.
    """
    from .fincat import FinCategory

    szs = tuple(sorted(set(sizes)))
    lazy = FinSetCat(szs)
    maps = []
    for a in szs:
        for b in szs:
            maps.extend(lazy.hom(a, b))
    name_of = {f: map_name(f) for f in maps}
    map_of = {n: f for f, n in name_of.items()}
    arrows = {name_of[f]: (f.src, f.dst) for f in maps}
    identities = {a: name_of[identity_map(a)] for a in szs}
    composition = {}
    for g in maps:
        for f in maps:
            if f.dst == g.src:
                composition[(name_of[g], name_of[f])] = name_of[compose_maps(g, f)]
    products = {}
    for a, b in product_pairs:
        p = lazy.product(a, b)
        if p.obj not in szs:
            raise ValueError(f"product size {p.obj} not among sizes")
        products[(a, b)] = Product(p.obj, name_of[p.pr1], name_of[p.pr2])
    term = 1 if terminal and 1 in szs else None
    bang = {a: name_of[lazy.bang(a)] for a in szs} if term else None
    cat = FinCategory(szs, arrows, identities, composition, products, term, bang)
    return cat, name_of, map_of


class FinSetCat:
    """The category of canonical finite sets, lazily presented.

    `objects` lists the core sizes that validators and enumerators quantify
    over; composition, products and pairing are available for arbitrary
    sizes.
    """

    def __init__(self, core_sizes: Iterable[int]):
        self.objects: Tuple[int, ...] = tuple(sorted(set(core_sizes)))
        self.terminal = 1

    def src(self, f: FinMap) -> int:
        return f.src

    def dst(self, f: FinMap) -> int:
        return f.dst

    def identity(self, a: int) -> FinMap:
        return identity_map(a)

    def compose(self, g: FinMap, f: FinMap) -> FinMap:
        return compose_maps(g, f)

    def hom(self, a: int, b: int) -> Iterator[FinMap]:
        if a > 0 and b == 0:
            return
        for images in itertools.product(range(b), repeat=a):
            yield FinMap(a, b, images)

    def hom_size(self, a: int, b: int) -> int:
        return b ** a

    def product(self, a: int, b: int) -> Product:
        ab = a * b
        if ab == 0:
            return Product(0, FinMap(0, a, ()), FinMap(0, b, ()))
        pr1 = FinMap(ab, a, tuple(k // b for k in range(ab)))
        pr2 = FinMap(ab, b, tuple(k % b for k in range(ab)))
        return Product(ab, pr1, pr2)

    def pair(self, f: FinMap, g: FinMap) -> FinMap:
        if f.src != g.src:
            raise ValueError("pairing needs a common domain")
        b = g.dst
        return FinMap(f.src, f.dst * b, tuple(encode_pair(f(i), g(i), b) for i in range(f.src)))

    def diagonal(self, a: int) -> FinMap:
        i = identity_map(a)
        return self.pair(i, i)

    def bang(self, a: int) -> FinMap:
        return FinMap(a, 1, (0,) * a)
