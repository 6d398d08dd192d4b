"""Marginals, conditionals, ranges and triangle composition."""

from __future__ import annotations

from typing import Iterable, NamedTuple

from ..errors import EmptySupport, InvalidMorph, ShapeMismatch
from .morph import (Morph, Theory, accumulate, wmul, compose, identity, is_quasi_total, post,
                    pushforward, with_identity)
from .objects import ObjectType, join, split, split_product, tensor


class Split(NamedTuple):
    marginal: Morph
    conditional: Morph


class Range(NamedTuple):
    obj: ObjectType
    r: Morph
    i: Morph


def marginal(f: Morph, keep: str = "left", left: ObjectType | None = None) -> Morph:
    """Discard one side of a morphism into a product ``A*B``."""
    a, b = split_product(f.cod, left)
    if keep == "left":
        return pushforward(f, a, lambda y: split([a, b], y)[0])
    if keep == "right":
        return pushforward(f, b, lambda y: split([a, b], y)[1])
    raise ValueError(f"keep must be 'left' or 'right', not {keep!r}")


def triangle(m: Morph, c: Morph, y: ObjectType | None = None) -> Morph:
    """``m ◁ c``: run ``m`` on ``x``, then ``c`` on ``(a, x, y)``; return ``(a, b)``."""
    if m.theory is not c.theory:
        raise ShapeMismatch("triangle of morphisms from different theories")
    a_obj, x_obj = m.cod, m.dom
    n = a_obj.arity + x_obj.arity
    if tuple(c.dom.factors[:n]) != tuple(tensor(a_obj, x_obj).factors):
        raise ShapeMismatch(f"conditional domain {c.dom.name} does not start with {a_obj.name}*{x_obj.name}")
    rest = tensor(*c.dom.factors[n:])
    if y is not None and y != rest:
        raise ShapeMismatch(f"extra input {y.name} does not match {rest.name}")
    y_obj = rest
    dom = tensor(x_obj, y_obj)
    cod = tensor(a_obj, c.cod)
    prob = m.theory.probabilistic
    rows = {}
    for xy in dom.elements:
        x, yy = split([x_obj, y_obj], xy)
        acc = {}
        for a, w in m.row(x).items():
            for b, v in c.row(join([a_obj, x_obj, y_obj], [a, x, yy])).items():
                k = join([a_obj, c.cod], [a, b])
                if prob:
                    accumulate(acc, k, wmul(w, v))
                else:
                    acc[k] = 1
        rows[xy] = acc
    return Morph(m.theory, dom, cod, rows, check=False)


def _candidate(f: Morph, m: Morph, a_obj: ObjectType, b_obj: ObjectType) -> Morph:
    """Theory-specific conditional of ``f`` relative to the marginal ``m``."""
    t = f.theory
    x_obj = f.dom
    dom = tensor(a_obj, x_obj)
    ab = [a_obj, b_obj]
    ax = [a_obj, x_obj]
    first_b = b_obj.elements[0] if t is Theory.STOCH else None
    rows = {}
    for x in x_obj.elements:
        frow = f.row(x)
        if t is Theory.DET:
            (y,) = frow
            b = split(ab, y)[1]
            for a in a_obj.elements:
                rows[join(ax, [a, x])] = {b: 1}
            continue
        fibers = {}
        for y, w in frow.items():
            ya, yb = split(ab, y)
            fibers.setdefault(ya, {})[yb] = w
        if t.probabilistic:
            mrow = m.row(x)
            for a in a_obj.elements:
                mass = mrow.get(a, 0)
                if mass:
                    rows[join(ax, [a, x])] = {b: w / mass for b, w in fibers.get(a, {}).items()}
                elif t is Theory.STOCH:
                    rows[join(ax, [a, x])] = {first_b: 1}
        else:
            for a, fiber in fibers.items():
                rows[join(ax, [a, x])] = fiber
    return Morph(t, dom, b_obj, rows, check=False)


def conditional(f: Morph, left: ObjectType | None = None) -> Split:
    """Marginal/conditional split of ``f: X -> A*B`` with the fixed conventions.

    Off the support of the marginal the Stoch conditional is the point mass at
    the first element of ``B``; in the partial theories it fails.
    """
    a_obj, b_obj = split_product(f.cod, left)
    m = marginal(f, "left", a_obj)
    c = _candidate(f, m, a_obj, b_obj)
    c._validate()
    return Split(m, c)


def conditional_given(f: Morph, m: Morph, left: ObjectType | None = None) -> Morph | None:
    """A ``c`` with ``m ◁ c == f``, or ``None`` if there is none.

    ``c`` need not be quasi-total; this is the notion of conditional used for
    causal processes.
    """
    a_obj, b_obj = split_product(f.cod, left)
    if m.cod != a_obj or m.dom != f.dom:
        raise ShapeMismatch("marginal does not match the morphism being split")
    c = _candidate(f, m, a_obj, b_obj)
    try:
        c._validate()
    except InvalidMorph:
        return None
    return c if triangle(m, c) == f else None


def verify_conditional(f: Morph, s: Split) -> bool:
    m, c = s
    if m.dom != f.dom or tensor(m.cod, c.cod) != f.cod:
        raise ShapeMismatch("split does not match the morphism")
    if c.dom != tensor(m.cod, f.dom):
        raise ShapeMismatch(f"conditional must have domain {m.cod.name}*{f.dom.name}")
    return triangle(m, c) == f and is_quasi_total(c)


def range_of(m: Morph) -> Range:
    """Support object of ``m`` with its restriction ``r`` and inclusion ``i``."""
    t = m.theory
    a_obj, x_obj = m.cod, m.dom
    ax_obj = tensor(a_obj, x_obj)
    if t is Theory.STOCH:
        def repair(ax):
            a, x = split([a_obj, x_obj], ax)
            supp = m.row(x)
            if a in supp:
                return ax
            if not supp:
                raise EmptySupport(f"row {x!r} has empty support")
            first = min(supp, key=a_obj.index)
            return join([a_obj, x_obj], [first, x])
        i = Morph.from_function(t, ax_obj, ax_obj, repair)
        return Range(ax_obj, identity(ax_obj, t), i)
    support = [ax for ax in ax_obj.elements
               if split([a_obj, x_obj], ax)[0] in m.row(split([a_obj, x_obj], ax)[1])]
    r_obj = ObjectType("R", [ax_obj.label(ax) for ax in support])
    i = Morph.from_function(t, r_obj, ax_obj, ax_obj.parse_label)
    rows = {}
    for ax in ax_obj.elements:
        a, x = split([a_obj, x_obj], ax)
        if t is Theory.DET:
            (a2,) = m.row(x)
            rows[ax] = {ax_obj.label(join([a_obj, x_obj], [a2, x])): 1}
        elif a in m.row(x):
            rows[ax] = {ax_obj.label(ax): 1}
    r = Morph(t, ax_obj, r_obj, rows)
    return Range(r_obj, r, i)


def verify_range(m: Morph, rg: Range, pairs: Iterable = ()) -> bool:
    """Check both range axioms; axiom (ii) is tested on the supplied ``(c, d)``."""
    t = m.theory
    ax_obj = tensor(m.cod, m.dom)
    obj, r, i = rg
    if r.dom != ax_obj or r.cod != obj or i.dom != obj or i.cod != ax_obj:
        raise ShapeMismatch("range does not match the morphism")
    if triangle(m, identity(ax_obj, t)) != triangle(m, compose(r, i)):
        return False
    for c, d in pairs:
        if c.dom != d.dom or c.cod != d.cod:
            raise ShapeMismatch("axiom (ii) pair with different shapes")
        if triangle(m, c) != triangle(m, d):
            continue
        y_obj = tensor(*c.dom.factors[ax_obj.arity:])
        lhs = _restrict(i, y_obj, c)
        rhs = _restrict(i, y_obj, d)
        if lhs != rhs:
            return False
    return True


def _restrict(i: Morph, y_obj: ObjectType, c: Morph) -> Morph:
    """``(i * id_Y) ; c``."""
    dom = tensor(i.dom, y_obj)
    step = post(identity(dom, i.theory), c.dom, with_identity(i, after=[y_obj]))
    return compose(step, c)
