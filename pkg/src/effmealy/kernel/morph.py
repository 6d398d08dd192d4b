"""Kleisli morphisms of the five effect theories as weighted tables."""

from __future__ import annotations

import enum
from gmpy2 import mpq
from typing import Callable, Iterable, Mapping, NamedTuple

from ..errors import DomainMismatch, InvalidMorph, TheoryMismatch
from .objects import UNIT, ObjectType, join, split, tensor


class Theory(enum.Enum):
    DET = "det"
    PAR = "par"
    REL = "rel"
    STOCH = "stoch"
    PARSTOCH = "parstoch"

    @property
    def probabilistic(self) -> bool:
        return self in (Theory.STOCH, Theory.PARSTOCH)

    @property
    def all_total(self) -> bool:
        """Det and Stoch: every morphism is total, so every morphism is pure."""
        return self in (Theory.DET, Theory.STOCH)

    @classmethod
    def parse(cls, s) -> "Theory":
        if isinstance(s, Theory):
            return s
        try:
            return cls(str(s).lower())
        except ValueError:
            raise InvalidMorph(f"unknown theory {s!r}") from None

    def __str__(self) -> str:
        return self.value



class Morph:
    """A morphism ``dom -> cod`` of a theory, stored as sparse rows.

    ``rows`` maps domain elements to ``{codomain element: weight}``.  Weights
    are exact ``mpq`` rationals for the probabilistic theories and ``1`` otherwise.
    Missing or empty rows mean failure (Par/Rel/ParStoch).
    """

    __slots__ = ("theory", "dom", "cod", "rows")

    def __init__(self, theory, dom: ObjectType, cod: ObjectType,
                 rows: Mapping, *, check: bool = True):
        self.theory = Theory.parse(theory)
        self.dom = dom
        self.cod = cod
        prob = self.theory.probabilistic
        clean = {}
        for x, row in rows.items():
            r = {}
            for y, w in row.items():
                if prob:
                    w = weight(w)
                elif w:
                    w = 1
                if w:
                    r[y] = w
            if r:
                clean[x] = r
        self.rows = clean
        if check:
            self._validate()

    def _validate(self):
        t = self.theory
        for x, row in self.rows.items():
            if x not in self.dom:
                raise InvalidMorph(f"{x!r} is not an element of {self.dom.name}")
            for y, w in row.items():
                if y not in self.cod:
                    raise InvalidMorph(f"{y!r} is not an element of {self.cod.name}")
                if w < 0 or w > 1:
                    raise InvalidMorph(f"weight {w} outside [0,1]")
            if t in (Theory.DET, Theory.PAR) and len(row) > 1:
                raise InvalidMorph(f"{t} row at {x!r} has {len(row)} outputs")
            if t.probabilistic:
                mass = sum(row.values())
                if mass > 1 or (t is Theory.STOCH and mass != 1):
                    raise InvalidMorph(f"{t} row at {x!r} has mass {mass}")
        if t.all_total and len(self.rows) != self.dom.size:
            missing = next(x for x in self.dom.elements if x not in self.rows)
            raise InvalidMorph(f"{t} morphism undefined at {missing!r}")

    def row(self, x) -> dict:
        return self.rows.get(x, {})

    def __call__(self, x) -> dict:
        return self.row(x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Morph):
            return NotImplemented
        return (self.theory is other.theory and self.dom == other.dom
                and self.cod == other.cod and self.rows == other.rows)

    def __hash__(self):
        return hash((self.theory, self.dom, self.cod, len(self.rows)))

    def __repr__(self) -> str:
        return f"Morph<{self.theory}: {self.dom.name} -> {self.cod.name}>"

    def table(self) -> str:
        """Human readable dump, one domain element per line."""
        lines = []
        for x in self.dom.elements:
            row = self.row(x)
            parts = [f"{self.cod.label(y)}:{w}" for y, w in sorted(row.items(), key=lambda kv: self.cod.index(kv[0]))]
            lines.append(f"{self.dom.label(x)} -> {{{', '.join(parts)}}}")
        return "\n".join(lines)

    # constructors

    @classmethod
    def from_function(cls, theory, dom: ObjectType, cod: ObjectType, fn: Callable) -> "Morph":
        """The deterministic total morphism induced by a function."""
        return cls(theory, dom, cod, {x: {fn(x): 1} for x in dom.elements})

    @classmethod
    def build(cls, theory, dom: ObjectType, cod: ObjectType, rowfn: Callable, check: bool = True) -> "Morph":
        return cls(theory, dom, cod, {x: rowfn(x) for x in dom.elements}, check=check)

    @classmethod
    def point(cls, theory, cod: ObjectType, y) -> "Morph":
        return cls(theory, UNIT, cod, {(): {y: 1}})

    @classmethod
    def uniform(cls, theory, cod: ObjectType, dom: ObjectType = UNIT) -> "Morph":
        """Uniform distribution (Stoch/ParStoch) or the full subset (Rel)."""
        t = Theory.parse(theory)
        w = mpq(1, cod.size) if t.probabilistic else 1
        if t in (Theory.DET, Theory.PAR):
            raise InvalidMorph(f"no uniform morphism in {t}")
        return cls(t, dom, cod, {x: {y: w for y in cod.elements} for x in dom.elements})


ONE = mpq(1)
_MPQ = type(ONE)


def weight(w):
    """Exact rational weight; every weight equal to 1 is the shared ``ONE``."""
    if type(w) is not _MPQ:
        if isinstance(w, float):
            raise InvalidMorph(f"weights must be exact rationals, got the float {w!r}")
        w = mpq(w)
    return ONE if w == ONE else w


def wmul(w, v):
    """``w * v`` skipping the multiplication when either side is ``ONE``."""
    if w is ONE:
        return v
    if v is ONE:
        return w
    return w * v


def accumulate(acc: dict, y, w):
    old = acc.get(y)
    acc[y] = w if old is None else old + w


def post(f: Morph, cod: ObjectType, rowfn: Callable, check: bool = False) -> Morph:
    """Compose ``f`` with the morphism whose row at ``y`` is ``rowfn(y)``.

    Used internally to compose with large structural or tensored morphisms
    without materialising them.
    """
    prob = f.theory.probabilistic
    cache = {}
    rows = {}
    for x, row in f.rows.items():
        acc = {}
        for y, w in row.items():
            r = cache.get(y)
            if r is None:
                r = cache[y] = rowfn(y)
            if prob:
                for z, v in r.items():
                    p = v if w is ONE else (w if v is ONE else w * v)
                    old = acc.get(z)
                    acc[z] = p if old is None else old + p
            else:
                for z in r:
                    acc[z] = 1
        rows[x] = acc
    return Morph(f.theory, f.dom, cod, rows, check=check)


def pushforward(f: Morph, cod: ObjectType, fn: Callable) -> Morph:
    """``f`` followed by the function ``fn`` on codomain elements."""
    return post(f, cod, lambda y: {fn(y): 1})


def pullback(g: Morph, dom: ObjectType, fn: Callable) -> Morph:
    """The function ``fn`` on ``dom`` followed by ``g``."""
    return Morph(g.theory, dom, g.cod, {x: g.row(fn(x)) for x in dom.elements}, check=False)


def _same_theory(*ms: Morph):
    t = ms[0].theory
    for m in ms[1:]:
        if m.theory is not t:
            raise TheoryMismatch(f"{t} vs {m.theory}")
    return t


def compose(f: Morph, g: Morph) -> Morph:
    """Kleisli composition ``f ; g`` (first ``f``, then ``g``)."""
    _same_theory(f, g)
    if f.cod != g.dom:
        raise DomainMismatch(f"cannot compose {f.dom.name}->{f.cod.name} with {g.dom.name}->{g.cod.name}")
    return post(f, g.cod, g.row)


def then(*ms: Morph) -> Morph:
    out = ms[0]
    for m in ms[1:]:
        out = compose(out, m)
    return out


def tensor_rows(blocks_in, blocks_out, rowfns, prob: bool):
    """Row function of a tensor product of row functions."""
    def rowfn(x):
        parts = split(blocks_in, x)
        acc = {(): ONE}
        for p, rf in zip(parts, rowfns):
            nxt = {}
            for ys, w in acc.items():
                for y, v in rf(p).items():
                    nxt[ys + (y,)] = wmul(w, v) if prob else 1
            acc = nxt
        return {join(blocks_out, ys): w for ys, w in acc.items()}
    return rowfn


def tensor_morph(*ms: Morph) -> Morph:
    """Monoidal product of morphisms."""
    if not ms:
        raise InvalidMorph("tensor of no morphisms")
    t = _same_theory(*ms)
    dom = tensor(*(m.dom for m in ms))
    cod = tensor(*(m.cod for m in ms))
    rf = tensor_rows([m.dom for m in ms], [m.cod for m in ms], [m.row for m in ms], t.probabilistic)
    rows = {}
    for x in dom.elements:
        rows[x] = rf(x)
    return Morph(t, dom, cod, rows, check=False)


def with_identity(g: Morph, before=(), after=()) -> Callable:
    """Row function of ``id_before * g * id_after`` (objects given as lists)."""
    blocks_in = list(before) + [g.dom] + list(after)
    blocks_out = list(before) + [g.cod] + list(after)
    k = len(before)

    def rowfn(x):
        parts = split(blocks_in, x)
        out = {}
        for y, w in g.row(parts[k]).items():
            parts2 = parts[:k] + [y] + parts[k + 1:]
            out[join(blocks_out, parts2)] = w
        return out
    return rowfn


# structural morphisms

def identity(obj: ObjectType, theory=Theory.STOCH) -> Morph:
    return Morph(theory, obj, obj, {x: {x: 1} for x in obj.elements}, check=False)


def copy(obj: ObjectType, theory=Theory.STOCH) -> Morph:
    cod = tensor(obj, obj)
    return Morph.from_function(theory, obj, cod, lambda x: join([obj, obj], [x, x]))


def discard(obj: ObjectType, theory=Theory.STOCH) -> Morph:
    return Morph.from_function(theory, obj, UNIT, lambda x: ())


def swap(a: ObjectType, b: ObjectType, theory=Theory.STOCH) -> Morph:
    dom = tensor(a, b)
    cod = tensor(b, a)
    return Morph.from_function(theory, dom, cod, lambda x: join([b, a], split([a, b], x)[::-1]))


def wiring(objs, order, theory=Theory.STOCH) -> Morph:
    """Deterministic rewiring of blocks: outputs ``objs[i] for i in order``.

    Repeated indices copy, omitted indices discard.
    """
    objs = list(objs)
    dom = tensor(*objs)
    outs = [objs[i] for i in order]
    cod = tensor(*outs)

    def fn(x):
        parts = split(objs, x)
        return join(outs, [parts[i] for i in order])
    return Morph.from_function(theory, dom, cod, fn)


def wiring_fn(objs, order) -> Callable:
    objs = list(objs)
    outs = [objs[i] for i in order]

    def fn(x):
        parts = split(objs, x)
        return join(outs, [parts[i] for i in order])
    return fn


def structural(kind: str, objs, theory=Theory.STOCH) -> Morph:
    """``kind`` is one of identity, copy, discard, swap."""
    objs = [objs] if isinstance(objs, ObjectType) else list(objs)
    if kind == "identity":
        return identity(tensor(*objs), theory)
    if kind == "copy":
        return copy(tensor(*objs), theory)
    if kind == "discard":
        return discard(tensor(*objs), theory)
    if kind == "swap":
        if len(objs) != 2:
            raise InvalidMorph("swap takes two objects")
        return swap(objs[0], objs[1], theory)
    raise InvalidMorph(f"unknown structural morphism {kind!r}")


# classification

class Classification(NamedTuple):
    total: bool
    deterministic: bool
    quasi_total: bool


def is_total(f: Morph) -> bool:
    return compose(f, discard(f.cod, f.theory)) == discard(f.dom, f.theory)


def is_deterministic(f: Morph) -> bool:
    t = f.theory
    lhs = compose(f, copy(f.cod, t))
    rhs = compose(copy(f.dom, t), tensor_morph(f, f))
    return lhs == rhs


def is_quasi_total(f: Morph) -> bool:
    """Running ``f`` twice on the same input and discarding one result is ``f``."""
    t = f.theory
    twice = compose(copy(f.dom, t), tensor_morph(f, f))
    once = post(twice, f.cod, with_identity(discard(f.cod, t), after=[f.cod]))
    return once == f


def classify(f: Morph) -> Classification:
    return Classification(is_total(f), is_deterministic(f), is_quasi_total(f))


def is_pure(f: Morph) -> bool:
    """Pure-fragment rule of the theory: everything in Det/Stoch, total otherwise."""
    return f.theory.all_total or is_total(f)


def is_value(f: Morph) -> bool:
    return is_total(f) and is_deterministic(f)


def row_mass(f: Morph, x):
    row = f.row(x)
    if f.theory.probabilistic:
        return sum(row.values(), mpq(0))
    return 1 if row else 0
