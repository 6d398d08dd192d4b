"""Small machine builders shared by the test modules."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from effmealy.generators import obj, random_machine, random_morph, random_row, random_value
from effmealy.kernel import UNIT, Morph, ObjectType, Theory, atom, join, split, tensor
from effmealy.mealy import MealyMachine
from effmealy.streams import StreamPrefix

BIT_X = atom("X", "0", "1")
BIT_Y = atom("Y", "0", "1")
THEORIES = list(Theory)


def det_machine(n, init, table, inp=BIT_X, out=BIT_Y):
    """Det machine on states ``u0..``; ``table[2*i + j]`` is ``(successor, output)``."""
    u = ObjectType("U", [f"u{i}" for i in range(n)])
    rows = {}
    k = 0
    for i in range(n):
        for x in inp.elements:
            s, y = table[k]
            k += 1
            rows[(f"u{i}", x)] = {(f"u{s}", y): 1}
    trans = Morph(Theory.DET, tensor(u, inp), tensor(u, out), rows, check=False)
    return MealyMachine(u, inp, out, Morph(Theory.DET, UNIT, u, {(): {f"u{init}": 1}}), trans)


def all_det_tables(n):
    cells = [(s, y) for s in range(n) for y in "01"]
    return itertools.product(cells, repeat=2 * n)


def det_structures_up_to_renaming(n):
    """One transition table per class under permutations of the states."""
    perms = list(itertools.permutations(range(n)))
    seen = set()
    for table in all_det_tables(n):
        keys = []
        for p in perms:
            new = [None] * (2 * n)
            for i in range(n):
                for j in range(2):
                    s, y = table[2 * i + j]
                    new[2 * p[i] + j] = (p[s], y)
            keys.append(tuple(new))
        k = min(keys)
        if k not in seen:
            seen.add(k)
            yield k


def lift_through(rng, d: MealyMachine, T: ObjectType, t: Morph, extra: int = 1):
    """Build ``(c, S, s, p)`` with ``p: S -> T`` a value, ``s ; p = t`` and
    ``(id * p * id) ; d = c ; (id * p * id)`` on the leading wire.

    ``S`` clones some elements of ``T``; ``c`` reads the clone through ``p``
    and spreads its ``T`` output over the clones of the target element.
    """
    th = d.theory
    prob = th.probabilistic
    olds = list(T.elements)
    clones = {a: [a] for a in olds}
    for _ in range(extra):
        a = rng.choice(olds)
        clones[a].append(f"{a}'{len(clones[a])}")
    S = ObjectType(T.name + "~", [c for a in olds for c in clones[a]])
    origin = {c: a for a in olds for c in clones[a]}
    p = Morph.from_function(th, S, T, lambda c: origin[c])
    U = d.state
    X = tensor(*d.inp.factors[T.arity:])
    Y = tensor(*d.out.factors[T.arity:])

    def spread(a, w):
        cs = clones[a]
        if th in (Theory.DET, Theory.PAR):
            return [(cs[0], w)]
        if th is Theory.REL:
            return [(c, 1) for c in rng.sample(cs, rng.randint(1, len(cs)))]
        cuts = [rng.randint(1, 3) for _ in cs]
        return [(c, w * Fraction(k, sum(cuts))) for c, k in zip(cs, cuts)]

    rows = {}
    for e in tensor(U, S, X).elements:
        uu, ss, xx = split([U, S, X], e)
        acc = {}
        for k, w in d.trans.row(join([U, T, X], [uu, origin[ss], xx])).items():
            u1, a1, yy = split([U, T, Y], k)
            for c, v in spread(a1, w):
                acc[join([U, S, Y], [u1, c, yy])] = v
        rows[e] = acc
    c = MealyMachine(U, tensor(S, X), tensor(S, Y), d.init,
                     Morph(th, tensor(U, S, X), tensor(U, S, Y), rows))
    s_rows = {}
    for a, w in t.row(()).items():
        for cl, v in spread(a, w):
            s_rows[cl] = v
    s = Morph(th, UNIT, S, {(): s_rows})
    return c, S, s, p


def random_pure_state(rng, theory, obj_):
    return Morph(theory, UNIT, obj_, {(): random_row(rng, theory, obj_, total=True)})


def random_stream(rng, theory, horizon, x=None, y=None, max_mem=3):
    """A random stream prefix with random memory objects."""
    th = Theory.parse(theory)
    x = x or obj("X", 2)
    y = y or obj("Y", 2)
    mems, heads = [], []
    prev = UNIT
    for n in range(horizon + 1):
        m = obj(f"M{n}", rng.randint(1, max_mem), f"m{n}_")
        heads.append(random_morph(rng, th, tensor(prev, x), tensor(m, y), total=th.all_total))
        mems.append(m)
        prev = m
    k = horizon + 1
    return StreamPrefix([x] * k, [y] * k, mems, heads)


__all__ = [
    "BIT_X", "BIT_Y", "THEORIES", "det_machine", "all_det_tables",
    "det_structures_up_to_renaming", "lift_through", "random_pure_state",
    "random_stream", "random_machine", "random_morph", "random_value", "obj",
]
