"""Multi-sorted signatures, terms, Horn formulas, theories, morphisms.

Variables are positional: a context is a tuple of sorts and the variable
x{i+1} refers to position i, so alpha-equivalence is trivial and arrows of
the context category compare syntactically.  A Horn formula is a canonical
finite set of atoms over a context; conjunction is union and the empty set
is the true constant.

The theory and morphism file formats are line-oriented; the serializers
emit a canonical form that parses back to an equal value and is a textual
fixpoint.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from .fincat import Product

Sort = str
Context = Tuple[Sort, ...]


class SyntaxError_(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


# --------------------------------------------------------------------------
# signatures and terms


class Signature:
    def __init__(
        self,
        sorts: Sequence[Sort] = ("elem",),
        ops: Optional[Dict[str, Tuple[Tuple[Sort, ...], Sort]]] = None,
        rels: Optional[Dict[str, Tuple[Sort, ...]]] = None,
    ):
        self.sorts: Tuple[Sort, ...] = tuple(sorts)
        self.ops: Dict[str, Tuple[Tuple[Sort, ...], Sort]] = dict(ops or {})
        self.rels: Dict[str, Tuple[Sort, ...]] = dict(rels or {})
        if len(set(self.sorts)) != len(self.sorts):
            raise SyntaxError_("duplicate sort names")
        for name, (args, res) in self.ops.items():
            if VAR_RE.fullmatch(name):
                raise SyntaxError_(f"operation name {name!r} is reserved for variables")
            if any(s not in self.sorts for s in args) or res not in self.sorts:
                raise SyntaxError_(f"operation {name} uses unknown sorts")
        for name, args in self.rels.items():
            if name in self.ops:
                raise SyntaxError_(f"name {name} used for both op and relation")
            if any(s not in self.sorts for s in args):
                raise SyntaxError_(f"relation {name} uses unknown sorts")

    def __eq__(self, other):
        return (
            isinstance(other, Signature)
            and self.sorts == other.sorts
            and self.ops == other.ops
            and self.rels == other.rels
        )

    def __repr__(self):
        return f"Signature(sorts={self.sorts}, ops={sorted(self.ops)}, rels={sorted(self.rels)})"


VAR_RE = re.compile(r"x([0-9]+)")


@dataclass(frozen=True)
class Var:
    index: int  # 0-based position in the context


@dataclass(frozen=True)
class App:
    op: str
    args: Tuple["Term", ...] = ()


Term = Union[Var, App]


def term_height(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(term_height(a) for a in t.args)


def term_key(t: Term):
    """Total order on terms: height, then symbol, then arguments."""
    if isinstance(t, Var):
        return (1, 0, t.index, ())
    return (term_height(t), 1, t.op, tuple(term_key(a) for a in t.args))


def term_sort(sig: Signature, ctx: Context, t: Term) -> Sort:
    if isinstance(t, Var):
        if not 0 <= t.index < len(ctx):
            raise SyntaxError_(f"variable x{t.index + 1} outside context of length {len(ctx)}")
        return ctx[t.index]
    if t.op not in sig.ops:
        raise SyntaxError_(f"unknown operation {t.op}")
    arg_sorts, res = sig.ops[t.op]
    if len(arg_sorts) != len(t.args):
        raise SyntaxError_(f"operation {t.op} expects {len(arg_sorts)} arguments")
    for a, s in zip(t.args, arg_sorts):
        got = term_sort(sig, ctx, a)
        if got != s:
            raise SyntaxError_(f"argument of {t.op} has sort {got}, expected {s}")
    return res


def substitute(t: Term, args: Tuple[Term, ...]) -> Term:
    """Simultaneous substitution of the context variables of t."""
    if isinstance(t, Var):
        return args[t.index]
    return App(t.op, tuple(substitute(a, args) for a in t.args))


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return f"x{t.index + 1}"
    if not t.args:
        return t.op
    return f"{t.op}({', '.join(render_term(a) for a in t.args)})"


# --------------------------------------------------------------------------
# atoms, formulas, sequents, theories


@dataclass(frozen=True)
class RelAtom:
    rel: str
    args: Tuple[Term, ...]


@dataclass(frozen=True)
class EqAtom:
    lhs: Term
    rhs: Term


Atom = Union[RelAtom, EqAtom]


def make_eq(lhs: Term, rhs: Term) -> EqAtom:
    if term_key(rhs) < term_key(lhs):
        lhs, rhs = rhs, lhs
    return EqAtom(lhs, rhs)


def atom_key(a: Atom):
    if isinstance(a, RelAtom):
        return (0, a.rel, tuple(term_key(t) for t in a.args))
    return (1, "", (term_key(a.lhs), term_key(a.rhs)))


def canonical_atoms(atoms) -> FrozenSet[Atom]:
    out = set()
    for a in atoms:
        if isinstance(a, EqAtom):
            a = make_eq(a.lhs, a.rhs)
        out.add(a)
    return frozenset(out)


@dataclass(frozen=True)
class HornFormula:
    ctx: Context
    atoms: FrozenSet[Atom]

    def sorted_atoms(self) -> Tuple[Atom, ...]:
        return tuple(sorted(self.atoms, key=atom_key))

    @property
    def is_top(self) -> bool:
        return not self.atoms


def horn(ctx: Context, atoms=()) -> HornFormula:
    return HornFormula(tuple(ctx), canonical_atoms(atoms))


def top_formula(ctx: Context) -> HornFormula:
    return horn(ctx, ())


def conj(a: HornFormula, b: HornFormula) -> HornFormula:
    if a.ctx != b.ctx:
        raise SyntaxError_("conjunction of formulas in different contexts")
    return horn(a.ctx, a.atoms | b.atoms)


def equality_formula(ctx: Context) -> HornFormula:
    """x_i = x_{n+i} over the doubled context: the fibered equality of ctx."""
    n = len(ctx)
    return horn(tuple(ctx) + tuple(ctx), [make_eq(Var(i), Var(n + i)) for i in range(n)])


def check_formula(sig: Signature, phi: HornFormula) -> None:
    for a in phi.atoms:
        if isinstance(a, RelAtom):
            if a.rel not in sig.rels:
                raise SyntaxError_(f"unknown relation {a.rel}")
            sorts = sig.rels[a.rel]
            if len(sorts) != len(a.args):
                raise SyntaxError_(f"relation {a.rel} expects {len(sorts)} arguments")
            for t, s in zip(a.args, sorts):
                if term_sort(sig, phi.ctx, t) != s:
                    raise SyntaxError_(f"ill-sorted argument of {a.rel}")
        else:
            if term_sort(sig, phi.ctx, a.lhs) != term_sort(sig, phi.ctx, a.rhs):
                raise SyntaxError_("equation between terms of different sorts")


@dataclass(frozen=True)
class Sequent:
    ctx: Context
    premise: HornFormula
    conclusion: HornFormula

    def __post_init__(self):
        if self.premise.ctx != self.ctx or self.conclusion.ctx != self.ctx:
            raise SyntaxError_("sequent parts disagree on context")


class Theory:
    def __init__(self, signature: Signature, sequents: Sequence[Sequent] = (), name: str = ""):
        self.signature = signature
        self.sequents: Tuple[Sequent, ...] = tuple(sequents)
        self.name = name
        for s in self.sequents:
            check_formula(signature, s.premise)
            check_formula(signature, s.conclusion)

    def __eq__(self, other):
        return (
            isinstance(other, Theory)
            and self.signature == other.signature
            and self.sequents == other.sequents
        )

    def __repr__(self):
        return f"Theory({self.name or '?'}, {len(self.sequents)} sequents)"


class TheoryMorphism:
    """Sort, operation, and relation translations between Horn theories.

    Each source operation is sent to a target term in the context of its
    (translated) argument sorts; each source relation to a target formula
    over that context.  Axiom preservation is a separate, prover-backed
    check; construction only enforces well-sortedness.
    """

    def __init__(
        self,
        source: Theory,
        target: Theory,
        sort_map: Optional[Dict[Sort, Sort]] = None,
        op_map: Optional[Dict[str, Term]] = None,
        rel_map: Optional[Dict[str, HornFormula]] = None,
        source_ref: str = "",
        target_ref: str = "",
    ):
        self.source = source
        self.target = target
        src_sig, tgt_sig = source.signature, target.signature
        self.sort_map = {s: s for s in src_sig.sorts}
        self.sort_map.update(sort_map or {})
        self.op_map: Dict[str, Term] = {}
        self.rel_map: Dict[str, HornFormula] = {}
        self.source_ref = source_ref
        self.target_ref = target_ref

        for s, s2 in self.sort_map.items():
            if s not in src_sig.sorts or s2 not in tgt_sig.sorts:
                raise SyntaxError_(f"sort map {s} -> {s2} uses unknown sorts")
        op_map = op_map or {}
        rel_map = rel_map or {}
        for f, (args, res) in src_sig.ops.items():
            ctx = self.map_ctx(args)
            if f in op_map:
                t = op_map[f]
            else:
                if f not in tgt_sig.ops:
                    raise SyntaxError_(f"operation {f} not in target and not mapped")
                t = App(f, tuple(Var(i) for i in range(len(args))))
            if term_sort(tgt_sig, ctx, t) != self.sort_map[res]:
                raise SyntaxError_(f"translation of operation {f} has the wrong sort")
            self.op_map[f] = t
        for r, args in src_sig.rels.items():
            ctx = self.map_ctx(args)
            if r in rel_map:
                phi = rel_map[r]
            else:
                if r not in tgt_sig.rels:
                    raise SyntaxError_(f"relation {r} not in target and not mapped")
                phi = horn(ctx, [RelAtom(r, tuple(Var(i) for i in range(len(args))))])
            if phi.ctx != ctx:
                raise SyntaxError_(f"translation of relation {r} has the wrong context")
            check_formula(tgt_sig, phi)
            self.rel_map[r] = phi

    def map_ctx(self, ctx: Context) -> Context:
        return tuple(self.sort_map[s] for s in ctx)


def identity_morphism(t: Theory) -> TheoryMorphism:
    return TheoryMorphism(t, t)


def translate_term(m: TheoryMorphism, t: Term) -> Term:
    if isinstance(t, Var):
        return t
    return substitute(m.op_map[t.op], tuple(translate_term(m, a) for a in t.args))


def translate(m: TheoryMorphism, phi: HornFormula) -> HornFormula:
    ctx = m.map_ctx(phi.ctx)
    atoms: List[Atom] = []
    for a in phi.atoms:
        if isinstance(a, EqAtom):
            atoms.append(make_eq(translate_term(m, a.lhs), translate_term(m, a.rhs)))
        else:
            image = m.rel_map[a.rel]
            args = tuple(translate_term(m, t) for t in a.args)
            for b in image.atoms:
                if isinstance(b, EqAtom):
                    atoms.append(make_eq(substitute(b.lhs, args), substitute(b.rhs, args)))
                else:
                    atoms.append(RelAtom(b.rel, tuple(substitute(t, args) for t in b.args)))
    return horn(ctx, atoms)


def translate_sequent(m: TheoryMorphism, s: Sequent) -> Sequent:
    return Sequent(m.map_ctx(s.ctx), translate(m, s.premise), translate(m, s.conclusion))


# --------------------------------------------------------------------------
# the context category


@dataclass(frozen=True)
class TermTuple:
    """An arrow of the context category: |dst| terms in context src."""
    src: Context
    dst: Context
    terms: Tuple[Term, ...]

    def __post_init__(self):
        if len(self.terms) != len(self.dst):
            raise SyntaxError_("term tuple length disagrees with target context")


def ctx_identity(ctx: Context) -> TermTuple:
    return TermTuple(ctx, ctx, tuple(Var(i) for i in range(len(ctx))))


def ctx_compose(s: TermTuple, t: TermTuple) -> TermTuple:
    """s after t: substitute t's terms into s's."""
    if t.dst != s.src:
        raise SyntaxError_("context mismatch in composition")
    return TermTuple(t.src, s.dst, tuple(substitute(u, t.terms) for u in s.terms))


def ctx_product(c1: Context, c2: Context) -> Product:
    """Concatenation, with projection term tuples."""
    n1, n2 = len(c1), len(c2)
    both = tuple(c1) + tuple(c2)
    pr1 = TermTuple(both, tuple(c1), tuple(Var(i) for i in range(n1)))
    pr2 = TermTuple(both, tuple(c2), tuple(Var(n1 + i) for i in range(n2)))
    return Product(both, pr1, pr2)


def ctx_pair(f: TermTuple, g: TermTuple) -> TermTuple:
    if f.src != g.src:
        raise SyntaxError_("pairing needs a common source context")
    return TermTuple(f.src, f.dst + g.dst, f.terms + g.terms)


class CtxCat:
    """The category of contexts over a signature, presented lazily.

    Objects are contexts (tuples of sorts); the object list only holds the
    contexts a caller registered interest in, since the category is
    infinite.  Hom sets are enumerable only through `term_tuples` at a
    height bound.
    """

    def __init__(self, sig: Signature, core: Sequence[Context] = ()):
        self.sig = sig
        self.objects: Tuple[Context, ...] = tuple(core)
        self.terminal: Context = ()

    def src(self, f: TermTuple) -> Context:
        return f.src

    def dst(self, f: TermTuple) -> Context:
        return f.dst

    def identity(self, ctx: Context) -> TermTuple:
        return ctx_identity(ctx)

    def compose(self, g: TermTuple, f: TermTuple) -> TermTuple:
        return ctx_compose(g, f)

    def product(self, c1: Context, c2: Context) -> Product:
        return ctx_product(c1, c2)

    def pair(self, f: TermTuple, g: TermTuple) -> TermTuple:
        return ctx_pair(f, g)

    def diagonal(self, ctx: Context) -> TermTuple:
        i = ctx_identity(ctx)
        return ctx_pair(i, i)

    def bang(self, ctx: Context) -> TermTuple:
        return TermTuple(ctx, (), ())


def reindex_formula(phi: HornFormula, tt: TermTuple) -> HornFormula:
    """Substitute along an arrow of the context category."""
    if tt.dst != phi.ctx:
        raise SyntaxError_("reindexing along a tuple into a different context")
    atoms: List[Atom] = []
    for a in phi.atoms:
        if isinstance(a, EqAtom):
            atoms.append(make_eq(substitute(a.lhs, tt.terms), substitute(a.rhs, tt.terms)))
        else:
            atoms.append(RelAtom(a.rel, tuple(substitute(t, tt.terms) for t in a.args)))
    return horn(tt.src, atoms)


def terms_of_sort(sig: Signature, ctx: Context, sort: Sort, height: int) -> List[Term]:
    """All terms of the given sort and height bound, in canonical order."""
    by_sort: Dict[Sort, List[Term]] = {s: [] for s in sig.sorts}
    for i, s in enumerate(ctx):
        by_sort[s].append(Var(i))
    for name, (args, res) in sig.ops.items():
        if not args:
            by_sort[res].append(App(name))
    for _ in range(height - 1):
        new: Dict[Sort, List[Term]] = {s: list(v) for s, v in by_sort.items()}
        for name, (args, res) in sig.ops.items():
            if not args:
                continue
            import itertools
            for combo in itertools.product(*(by_sort[s] for s in args)):
                t = App(name, combo)
                if t not in new[res]:
                    new[res].append(t)
        by_sort = new
    return sorted(set(by_sort[sort]), key=term_key)


def term_tuples(sig: Signature, src: Context, dst: Context, height: int) -> List[TermTuple]:
    import itertools

    pools = [terms_of_sort(sig, src, s, height) for s in dst]
    return [TermTuple(src, dst, combo) for combo in itertools.product(*pools)]


# --------------------------------------------------------------------------
# parsing


TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<arrow>->)|(?P<to>=>)|(?P<ident>[A-Za-z_0-9]+)"
    r"|(?P<punct>[(),=&\[\]:])"
)


def tokenize(text: str, line_no: int) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line_no, pos + 1)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return out


class _TokenStream:
    def __init__(self, tokens, line_no):
        self.tokens = tokens
        self.line = line_no
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self, kind=None, value=None):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of line (wanted {value or kind})", self.line,
                             self.tokens[-1][2] if self.tokens else 0)
        if kind and tok[0] != kind or value and tok[1] != value:
            raise ParseError(f"expected {value or kind}, found {tok[1]!r}", self.line, tok[2])
        self.i += 1
        return tok

    def done(self) -> bool:
        return self.i >= len(self.tokens)


def _parse_term(ts: _TokenStream) -> Term:
    kind, name, col = ts.next("ident")
    m = VAR_RE.fullmatch(name)
    if m:
        idx = int(m.group(1))
        if idx == 0:
            raise ParseError("variables are numbered from x1", ts.line, col)
        return Var(idx - 1)
    if ts.peek() and ts.peek()[1] == "(":
        ts.next(value="(")
        args = [_parse_term(ts)]
        while ts.peek() and ts.peek()[1] == ",":
            ts.next(value=",")
            args.append(_parse_term(ts))
        ts.next(value=")")
        return App(name, tuple(args))
    return App(name)


def _parse_atoms(ts: _TokenStream) -> List[Atom]:
    """Parse `&`-separated atoms up to `=>` or end of line."""
    atoms: List[Atom] = []
    while True:
        tok = ts.peek()
        if tok is None:
            break
        if tok[0] == "ident" and tok[1] == "true" and (
            ts.i + 1 >= len(ts.tokens) or ts.tokens[ts.i + 1][1] in ("&", "=>")
        ):
            ts.next()
        else:
            t = _parse_term(ts)
            nxt = ts.peek()
            if nxt and nxt[1] == "=":
                ts.next(value="=")
                rhs = _parse_term(ts)
                atoms.append(EqAtom(t, rhs))
            elif isinstance(t, Var):
                raise ParseError("a bare variable is not an atom", ts.line, tok[2])
            elif not t.args:
                raise ParseError(f"{t.op!r} alone is not an atom", ts.line, tok[2])
            else:
                atoms.append(RelAtom(t.op, t.args))
        nxt = ts.peek()
        if nxt is None or nxt[1] == "=>":
            break
        ts.next(value="&")
    return atoms


def _parse_annotation(ts: _TokenStream) -> Dict[int, Sort]:
    """[x1:s, x2:t] before the atoms; returns index -> sort."""
    out: Dict[int, Sort] = {}
    ts.next(value="[")
    while True:
        _, name, col = ts.next("ident")
        m = VAR_RE.fullmatch(name)
        if not m:
            raise ParseError(f"expected a variable, found {name!r}", ts.line, col)
        ts.next(value=":")
        _, sort, _ = ts.next("ident")
        out[int(m.group(1)) - 1] = sort
        tok = ts.next()
        if tok[1] == "]":
            break
        if tok[1] != ",":
            raise ParseError("expected , or ] in context annotation", ts.line, tok[2])
    return out


def _max_var(atoms: List[Atom]) -> int:
    def walk(t: Term) -> int:
        if isinstance(t, Var):
            return t.index + 1
        return max((walk(a) for a in t.args), default=0)

    out = 0
    for a in atoms:
        if isinstance(a, EqAtom):
            out = max(out, walk(a.lhs), walk(a.rhs))
        else:
            out = max(out, *(walk(t) for t in a.args), 0)
    return out


def _infer_context(sig: Signature, atoms: List[Atom], annot: Dict[int, Sort],
                   line_no: int) -> Context:
    n = max(_max_var(atoms), (max(annot) + 1) if annot else 0)
    known: Dict[int, Sort] = dict(annot)
    # collect var/var equalities to propagate, and direct constraints
    groups: List[set] = []

    def note(idx: int, sort: Sort):
        if known.get(idx, sort) != sort:
            raise ParseError(f"variable x{idx + 1} used at sorts {known[idx]} and {sort}",
                             line_no)
        known[idx] = sort

    def constrain(t: Term, sort: Optional[Sort]):
        if isinstance(t, Var):
            if sort is not None:
                note(t.index, sort)
            return
        if t.op not in sig.ops:
            raise ParseError(f"unknown operation {t.op}", line_no)
        arg_sorts, _ = sig.ops[t.op]
        if len(arg_sorts) != len(t.args):
            raise ParseError(f"operation {t.op} expects {len(arg_sorts)} arguments", line_no)
        for a, s in zip(t.args, arg_sorts):
            constrain(a, s)

    def sort_of(t: Term) -> Optional[Sort]:
        if isinstance(t, Var):
            return known.get(t.index)
        if t.op not in sig.ops:
            raise ParseError(f"unknown operation {t.op}", line_no)
        return sig.ops[t.op][1]

    for a in atoms:
        if isinstance(a, RelAtom):
            if a.rel not in sig.rels:
                raise ParseError(f"unknown relation {a.rel}", line_no)
            sorts = sig.rels[a.rel]
            if len(sorts) != len(a.args):
                raise ParseError(f"relation {a.rel} expects {len(sorts)} arguments", line_no)
            for t, s in zip(a.args, sorts):
                constrain(t, s)
        else:
            constrain(a.lhs, None)
            constrain(a.rhs, None)
            groups.append({a.lhs, a.rhs})
    # propagate equation sorts until stable
    for _ in range(n + 1):
        for g in groups:
            sorts = {s for t in g for s in [sort_of(t)] if s is not None}
            if len(sorts) > 1:
                raise ParseError("equation between terms of different sorts", line_no)
            if len(sorts) == 1:
                s = next(iter(sorts))
                for t in g:
                    if isinstance(t, Var):
                        note(t.index, s)
    ctx = []
    for i in range(n):
        if i in known:
            ctx.append(known[i])
        elif len(sig.sorts) == 1:
            ctx.append(sig.sorts[0])
        else:
            raise ParseError(
                f"cannot infer the sort of x{i + 1}; annotate the context", line_no)
    return tuple(ctx)


def parse_theory(text: str, name: str = "") -> Theory:
    sorts: List[Sort] = []
    ops: Dict[str, Tuple[Tuple[Sort, ...], Sort]] = {}
    rels: Dict[str, Tuple[Sort, ...]] = {}
    ax_lines: List[Tuple[int, List]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = tokenize(line, line_no)
        ts = _TokenStream(tokens, line_no)
        _, head, col = ts.next("ident")
        if head == "sort":
            _, s, _ = ts.next("ident")
            if s in sorts:
                raise ParseError(f"duplicate sort {s}", line_no, col)
            sorts.append(s)
        elif head == "op":
            _, f, fcol = ts.next("ident")
            if f in ops:
                raise ParseError(f"duplicate operation {f}", line_no, fcol)
            ts.next(value=":")
            args: List[Sort] = []
            while ts.peek() and ts.peek()[0] == "ident":
                args.append(ts.next()[1])
            ts.next("arrow")
            _, res, _ = ts.next("ident")
            ops[f] = (tuple(args), res)
        elif head == "rel":
            _, r, rcol = ts.next("ident")
            if r in rels:
                raise ParseError(f"duplicate relation {r}", line_no, rcol)
            ts.next(value=":")
            args = []
            while ts.peek() and ts.peek()[0] == "ident":
                args.append(ts.next()[1])
            if not args:
                raise ParseError(f"relation {r} needs at least one sort", line_no, rcol)
            rels[r] = tuple(args)
        elif head == "ax":
            ax_lines.append((line_no, tokens[1:]))
        else:
            raise ParseError(f"unknown directive {head!r}", line_no, col)
    if not sorts:
        sorts = ["elem"]
    sig = Signature(tuple(sorts), ops, rels)

    sequents: List[Sequent] = []
    for line_no, tokens in ax_lines:
        ts = _TokenStream(tokens, line_no)
        annot: Dict[int, Sort] = {}
        if ts.peek() and ts.peek()[1] == "[":
            annot = _parse_annotation(ts)
            for i, s in annot.items():
                if s not in sig.sorts:
                    raise ParseError(f"unknown sort {s} in annotation", line_no)
        first = _parse_atoms(ts)
        if ts.peek() and ts.peek()[1] == "=>":
            ts.next(value="=>")
            second = _parse_atoms(ts)
            premise_atoms, conclusion_atoms = first, second
        else:
            premise_atoms, conclusion_atoms = [], first
        if not ts.done():
            tok = ts.peek()
            raise ParseError(f"trailing input {tok[1]!r}", line_no, tok[2])
        ctx = _infer_context(sig, premise_atoms + conclusion_atoms, annot, line_no)
        sequents.append(Sequent(ctx, horn(ctx, premise_atoms), horn(ctx, conclusion_atoms)))
    try:
        return Theory(sig, sequents, name=name)
    except SyntaxError_ as e:
        raise ParseError(str(e), 0) from e


def parse_morphism(text: str, resolve: Callable[[str], Theory]) -> TheoryMorphism:
    source = target = None
    source_ref = target_ref = ""
    sort_lines: List[Tuple[int, str, str]] = []
    op_lines: List[Tuple[int, str, List]] = []
    rel_lines: List[Tuple[int, str, List]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head, _, rest = line.strip().partition(" ")
        rest = rest.strip()
        if head in ("source", "target"):
            if not rest:
                raise ParseError(f"{head} needs a theory reference", line_no)
            try:
                parsed = resolve(rest)
            except (OSError, ParseError) as e:
                raise ParseError(f"cannot load {head} theory {rest!r}: {e}", line_no)
            if head == "source":
                source, source_ref = parsed, rest
            else:
                target, target_ref = parsed, rest
            continue
        tokens = tokenize(line, line_no)
        ts = _TokenStream(tokens, line_no)
        _, kind, col = ts.next("ident")
        if kind == "sort":
            _, s, _ = ts.next("ident")
            ts.next("arrow")
            _, s2, _ = ts.next("ident")
            sort_lines.append((line_no, s, s2))
        elif kind == "op":
            _, f, _ = ts.next("ident")
            ts.next("arrow")
            op_lines.append((line_no, f, tokens[ts.i:]))
        elif kind == "rel":
            _, r, _ = ts.next("ident")
            ts.next("arrow")
            rel_lines.append((line_no, r, tokens[ts.i:]))
        else:
            raise ParseError(f"unknown directive {kind!r}", line_no, col)
    if source is None or target is None:
        raise ParseError("morphism file needs both source and target", 0)

    sort_map = {}
    for line_no, s, s2 in sort_lines:
        if s not in source.signature.sorts:
            raise ParseError(f"unknown source sort {s}", line_no)
        sort_map[s] = s2
    full_sort_map = {s: s for s in source.signature.sorts}
    full_sort_map.update(sort_map)

    op_map: Dict[str, Term] = {}
    for line_no, f, tokens in op_lines:
        if f not in source.signature.ops:
            raise ParseError(f"unknown source operation {f}", line_no)
        ts = _TokenStream(tokens, line_no)
        t = _parse_term(ts)
        if not ts.done():
            raise ParseError("trailing input after term", line_no, ts.peek()[2])
        op_map[f] = t
    rel_map: Dict[str, HornFormula] = {}
    for line_no, r, tokens in rel_lines:
        if r not in source.signature.rels:
            raise ParseError(f"unknown source relation {r}", line_no)
        ts = _TokenStream(tokens, line_no)
        atoms = _parse_atoms(ts)
        if not ts.done():
            raise ParseError("trailing input after formula", line_no, ts.peek()[2])
        ctx = tuple(full_sort_map[s] for s in source.signature.rels[r])
        rel_map[r] = horn(ctx, atoms)
    try:
        return TheoryMorphism(source, target, sort_map, op_map, rel_map,
                              source_ref=source_ref, target_ref=target_ref)
    except SyntaxError_ as e:
        raise ParseError(str(e), 0) from e


# --------------------------------------------------------------------------
# serialization (canonical, a fixpoint of parse . render)


def render_atom(a: Atom) -> str:
    if isinstance(a, EqAtom):
        return f"{render_term(a.lhs)} = {render_term(a.rhs)}"
    return f"{a.rel}({', '.join(render_term(t) for t in a.args)})" if a.args \
        else a.rel


def render_formula(phi: HornFormula) -> str:
    if phi.is_top:
        return "true"
    return " & ".join(render_atom(a) for a in phi.sorted_atoms())


def theory_to_text(t: Theory) -> str:
    sig = t.signature
    lines = [f"sort {s}" for s in sig.sorts]
    for f, (args, res) in sig.ops.items():
        lines.append(f"op {f} : {' '.join(args)}{' ' if args else ''}-> {res}")
    for r, args in sig.rels.items():
        lines.append(f"rel {r} : {' '.join(args)}")
    for s in t.sequents:
        annot = ""
        if s.ctx:
            annot = "[" + ", ".join(f"x{i + 1}:{srt}" for i, srt in enumerate(s.ctx)) + "] "
        if s.premise.is_top:
            lines.append(f"ax {annot}{render_formula(s.conclusion)}")
        else:
            lines.append(
                f"ax {annot}{render_formula(s.premise)} => {render_formula(s.conclusion)}"
            )
    return "\n".join(lines) + "\n"


def morphism_to_text(m: TheoryMorphism) -> str:
    lines = [f"source {m.source_ref}", f"target {m.target_ref}"]
    for s in m.source.signature.sorts:
        if m.sort_map[s] != s:
            lines.append(f"sort {s} -> {m.sort_map[s]}")
    for f, (args, _) in m.source.signature.ops.items():
        if m.op_map[f] != App(f, tuple(Var(i) for i in range(len(args)))):
            lines.append(f"op {f} -> {render_term(m.op_map[f])}")
    for r, args in m.source.signature.rels.items():
        default = horn(m.map_ctx(args), [RelAtom(r, tuple(Var(i) for i in range(len(args))))])
        if m.rel_map[r] != default:
            lines.append(f"rel {r} -> {render_formula(m.rel_map[r])}")
    return "\n".join(lines) + "\n"
