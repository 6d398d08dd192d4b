"""Finite objects and the strict monoidal product on them.

An atomic object is a named list of string labels.  Products are kept
flattened: ``tensor(A, tensor(B, C))`` and ``tensor(tensor(A, B), C)`` are the
same object, whose elements are Python tuples of atomic labels.  The unit
``I`` has the single element ``()``.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Sequence

from ..errors import InputError, NotAProduct


class ObjectType:
    """A finite set with a canonical element order.

    Build atomic objects with ``ObjectType(name, labels)`` and composite ones
    with :func:`tensor`.  Instances are immutable and hashable.
    """

    __slots__ = ("name", "factors", "_elements", "_hash", "is_atomic", "arity", "__dict__")

    def __init__(self, name: str, elements: Iterable[str] = (), *, _factors=None):
        self.name = name
        if _factors is not None:
            self.factors = tuple(_factors)
            self._elements = None
            self.is_atomic = False
            self.arity = len(self.factors)
        else:
            elements = tuple(elements)
            for e in elements:
                if not isinstance(e, str):
                    raise InputError(f"object {name!r}: element labels must be strings, got {e!r}")
            if len(set(elements)) != len(elements):
                raise InputError(f"object {name!r}: duplicate element labels")
            self.factors = (self,)
            self._elements = elements
            self.is_atomic = True
            self.arity = 1
        self._hash = hash((self.name, self._key()))

    def _key(self):
        if self.is_atomic:
            return ("atom", self._elements)
        return ("prod", tuple(f._key() for f in self.factors))

    @property
    def is_product(self) -> bool:
        return not self.is_atomic and len(self.factors) >= 2

    @property
    def is_unit(self) -> bool:
        return not self.is_atomic and not self.factors

    @cached_property
    def elements(self) -> tuple:
        if self.is_atomic:
            return self._elements
        return tuple(itertools.product(*(f.elements for f in self.factors)))

    @cached_property
    def size(self) -> int:
        if self.is_atomic:
            return len(self._elements)
        n = 1
        for f in self.factors:
            n *= f.size
        return n

    @cached_property
    def _atom_index(self) -> dict:
        return {e: i for i, e in enumerate(self._elements)}

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e) -> bool:
        if self.is_atomic:
            return type(e) is str and e in self._atom_index
        if type(e) is not tuple or len(e) != self.arity:
            return False
        for c, f in zip(e, self.factors):
            if type(c) is not str or c not in f._atom_index:
                return False
        return True

    def index(self, e) -> int:
        """Position of ``e`` in the canonical order."""
        if self.is_atomic:
            return self._atom_index[e]
        i = 0
        for c, f in zip(e, self.factors):
            i = i * f.size + f._atom_index[c]
        return i

    def atoms(self, e) -> tuple:
        return (e,) if self.is_atomic else e

    def make(self, atoms: Sequence):
        return atoms[0] if self.is_atomic else tuple(atoms)

    def label(self, e) -> str:
        if self.is_atomic:
            return e
        return "(" + ",".join(e) + ")"

    @cached_property
    def _by_label(self) -> dict:
        return {self.label(e): e for e in self.elements}

    def parse_label(self, s: str):
        try:
            return self._by_label[s]
        except KeyError:
            raise InputError(f"{s!r} is not an element of {self.name}") from None

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ObjectType):
            return NotImplemented
        return self._hash == other._hash and self.name == other.name and self._key() == other._key()

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.is_atomic:
            return f"ObjectType({self.name!r}, {list(self._elements)!r})"
        return f"ObjectType<{self.name}>"


UNIT = ObjectType("I", _factors=())


def tensor(*objs: ObjectType) -> ObjectType:
    """Flattened monoidal product; ``tensor()`` is the unit."""
    factors = []
    for o in objs:
        factors.extend(o.factors)
    if len(factors) == 1:
        return factors[0]
    if not factors:
        return UNIT
    return ObjectType("*".join(f.name for f in factors), _factors=factors)


def join(objs: Sequence[ObjectType], elems: Sequence):
    """Element of ``tensor(*objs)`` built from one element per block."""
    atoms = []
    for o, e in zip(objs, elems):
        if o.is_atomic:
            atoms.append(e)
        else:
            atoms.extend(e)
    if len(atoms) == 1:
        return atoms[0]
    return tuple(atoms)


def split(objs: Sequence[ObjectType], e) -> list:
    """Inverse of :func:`join`."""
    if len(objs) == 1:
        return [e]
    total = 0
    for o in objs:
        total += o.arity
    atoms = (e,) if total == 1 else e
    out, k = [], 0
    for o in objs:
        if o.is_atomic:
            out.append(atoms[k])
            k += 1
        else:
            n = o.arity
            out.append(tuple(atoms[k:k + n]))
            k += n
    return out


def split_product(obj: ObjectType, left: ObjectType | None = None):
    """Decompose ``obj`` as ``left * rest``; by default ``left`` is the first factor."""
    if obj.is_atomic or obj.is_unit:
        raise NotAProduct(f"{obj.name} is not a product object")
    if left is None:
        left = obj.factors[0]
    n = left.arity
    if tuple(obj.factors[:n]) != tuple(left.factors):
        raise NotAProduct(f"{left.name} is not a left factor of {obj.name}")
    return left, tensor(*obj.factors[n:])


def atom(name: str, *labels: str) -> ObjectType:
    return ObjectType(name, labels)
