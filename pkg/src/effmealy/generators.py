"""Random finite objects, morphisms and machines for tests and demos."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .kernel import UNIT, Morph, ObjectType, Theory, accumulate
from .mealy import MealyMachine
from .kernel import tensor


def obj(name: str, n: int, prefix: Optional[str] = None) -> ObjectType:
    prefix = prefix if prefix is not None else name.lower()
    return ObjectType(name, [f"{prefix}{i}" for i in range(n)])


def random_distribution(rng: random.Random, support, mass=Fraction(1), denom: int = 6) -> dict:
    """Exact distribution over a random nonempty subset of ``support``."""
    support = list(support)
    k = rng.randint(1, len(support))
    chosen = rng.sample(support, k)
    weights = [rng.randint(1, denom) for _ in chosen]
    total = sum(weights)
    return {y: Fraction(w, total) * mass for y, w in zip(chosen, weights)}


def random_row(rng: random.Random, theory: Theory, cod: ObjectType, total: bool = False) -> dict:
    t = Theory.parse(theory)
    elems = list(cod.elements)
    if t in (Theory.DET, Theory.PAR):
        if t is Theory.PAR and not total and rng.random() < 0.25:
            return {}
        return {rng.choice(elems): 1}
    if t is Theory.REL:
        k = rng.randint(1 if total else 0, len(elems))
        return {y: 1 for y in rng.sample(elems, k)}
    if t is Theory.STOCH or total:
        return random_distribution(rng, elems)
    r = rng.random()
    if r < 0.2:
        return {}
    mass = Fraction(1) if r < 0.5 else Fraction(rng.randint(1, 5), 6)
    return random_distribution(rng, elems, mass)


def random_morph(rng: random.Random, theory, dom: ObjectType, cod: ObjectType,
                 total: bool = False) -> Morph:
    t = Theory.parse(theory)
    return Morph(t, dom, cod, {x: random_row(rng, t, cod, total) for x in dom.elements})


def random_value(rng: random.Random, theory, dom: ObjectType, cod: ObjectType) -> Morph:
    elems = list(cod.elements)
    return Morph(theory, dom, cod, {x: {rng.choice(elems): 1} for x in dom.elements})


def random_machine(rng: random.Random, theory, n_states: int, inp: ObjectType,
                   out: ObjectType, state_name: str = "U") -> MealyMachine:
    t = Theory.parse(theory)
    u = obj(state_name, n_states, "s")
    init = Morph(t, UNIT, u, {(): random_row(rng, t, u, total=True)})
    trans = random_morph(rng, t, tensor(u, inp), tensor(u, out))
    return MealyMachine(u, inp, out, init, trans)


def split_states(rng: random.Random, m: MealyMachine, extra: int = 1) -> MealyMachine:
    """A machine bisimilar to ``m`` obtained by cloning states.

    Each clone has the same outgoing behaviour; weight into a cloned state is
    spread over its copies (for Rel, a nonempty subset of copies is used).
    """
    t = m.theory
    prob = t.probabilistic
    olds = list(m.state.elements)
    clones = {u: [u] for u in olds}
    taken = set(olds)
    for _ in range(extra):
        u = rng.choice(olds)
        k = len(clones[u])
        while f"{u}_{k}" in taken:
            k += 1
        clones[u].append(f"{u}_{k}")
        taken.add(f"{u}_{k}")
    new_state = ObjectType(m.state.name + "'", [c for u in olds for c in clones[u]])
    origin = {c: u for u in olds for c in clones[u]}

    def spread(row_items, make_key):
        acc = {}
        for (u1, rest), w in row_items:
            cs = clones[u1]
            if t in (Theory.DET, Theory.PAR):
                parts = [(rng.choice(cs), w)]
            elif t is Theory.REL:
                parts = [(c, 1) for c in rng.sample(cs, rng.randint(1, len(cs)))]
            else:
                cuts = [rng.randint(1, 3) for _ in cs]
                parts = [(c, w * Fraction(k, sum(cuts))) for c, k in zip(cs, cuts)]
            for c, v in parts:
                key = make_key(c, rest)
                if prob:
                    accumulate(acc, key, v)
                else:
                    acc[key] = 1
        return acc

    init = Morph(t, UNIT, new_state,
                 {(): spread([((u, None), w) for u, w in m.init.row(()).items()], lambda c, _: c)})
    from .kernel import join
    rows = {}
    for c in new_state.elements:
        for x in m.inp.elements:
            items = list(m.step(origin[c], x).items())
            rows[join([new_state, m.inp], [c, x])] = spread(
                items, lambda c1, y: join([new_state, m.out], [c1, y]))
    trans = Morph(t, tensor(new_state, m.inp), tensor(new_state, m.out), rows)
    machine = MealyMachine(new_state, m.inp, m.out, init, trans)
    return relabel(rng, machine)


def relabel(rng: random.Random, m: MealyMachine) -> MealyMachine:
    """Shuffle the order of the states (labels are kept)."""
    from .kernel import join, split
    elems = list(m.state.elements)
    rng.shuffle(elems)
    st = ObjectType(m.state.name, elems)
    init = Morph(m.theory, UNIT, st, m.init.row(()) and {(): dict(m.init.row(()))})
    rows = {k: dict(v) for k, v in m.trans.rows.items()}
    trans = Morph(m.theory, tensor(st, m.inp), tensor(st, m.out), rows)
    return MealyMachine(st, m.inp, m.out, init, trans)


def branching_pair(theory="rel"):
    """Two machines with the same traces that are not bisimilar.

    The first chooses at its first step between a ``b`` loop and a ``c`` loop;
    the second emits ``a`` first and only chooses afterwards.
    """
    from .kernel import atom, join
    x = atom("X", "x")
    y = atom("Y", "a", "b", "c")
    u = atom("U", "u0", "u1", "u2", "u3")

    def machine(table):
        rows = {join([u, x], [s, "x"]): {join([u, y], [s1, o]): 1 for s1, o in succ}
                for s, succ in table.items()}
        init = Morph(theory, UNIT, u, {(): {"u0": 1}})
        return MealyMachine(u, x, y, init, Morph(theory, tensor(u, x), tensor(u, y), rows))

    early = machine({"u0": [("u1", "a"), ("u2", "a")], "u1": [("u1", "b")],
                     "u2": [("u2", "c")], "u3": [("u3", "a")]})
    late = machine({"u0": [("u3", "a")], "u1": [("u1", "b")], "u2": [("u2", "c")],
                    "u3": [("u1", "b"), ("u2", "c")]})
    return early, late


# random programs

SAMPLE_SIGNATURE_SOURCE = """
sig {
  type A; type B
  value f: A -> B
  value g: A, B -> A
  pure p: A -> B
  pure q: -> A
  pure r: B -> A, B
  effect h: A -> B
  effect k: -> A
  effect w: B -> A, A
}
"""


def sample_signature():
    from .donotation import parse
    return parse(SAMPLE_SIGNATURE_SOURCE)[0]


def _random_term(rng: random.Random, sig, env: dict, ty: str, depth: int = 1):
    from .donotation import App, Var
    choices = [x for x, t in env.items() if t == ty]
    apps = [v for v, (ins, out) in sig.values.items()
            if out == ty and all(any(t == i for t in env.values()) for i in ins)]
    if depth > 0 and apps and (not choices or rng.random() < 0.3):
        v = rng.choice(apps)
        ins, _ = sig.values[v]
        return App(v, tuple(_random_term(rng, sig, env, i, depth - 1) for i in ins))
    return Var(rng.choice(choices))


def random_program(rng: random.Random, sig, n_stmts: int = 4, params=("A", "B"),
                   n_returns: int = 2, name: str = "prog", ret_types=None):
    """A well-typed program over ``sig`` with random statements and returns."""
    from .donotation import Program, Stmt
    env = {f"x{i}": t for i, t in enumerate(params)}
    stmts = []
    gens = [(g, "pure") for g in sig.pures] + [(g, "effect") for g in sig.effects]
    counter = 0
    for _ in range(n_stmts):
        usable = [(g, kind) for g, kind in gens
                  if all(any(t == i for t in env.values()) for i in sig.gen_type(g)[0])]
        if not usable:
            break
        g, kind = rng.choice(sorted(usable))
        ins, outs = sig.gen_type(g)
        args = tuple(_random_term(rng, sig, env, i) for i in ins)
        binds = []
        for t in outs:
            v = f"y{counter}"
            counter += 1
            binds.append(v)
        stmts.append(Stmt(kind, g, args, tuple(binds)))
        env.update(zip(binds, outs))
    types = sorted(set(env.values()))
    if ret_types is None:
        ret_types = tuple(rng.choice(types) for _ in range(n_returns))
    returns = tuple(_random_term(rng, sig, env, t) for t in ret_types)
    params_t = tuple((f"x{i}", t) for i, t in enumerate(params))
    return Program(name, params_t, tuple(stmts), returns, tuple(ret_types), sig)


def random_interpretation(rng: random.Random, theory, sig, sizes=None):
    """Random objects of the given sizes and random morphisms for every generator."""
    from .donotation import Interpretation
    t = Theory.parse(theory)
    sizes = sizes or {}
    objects = {ty: obj(ty, sizes.get(ty, 2)) for ty in sig.types}
    gens = {}
    for v, (ins, out) in sig.values.items():
        gens[v] = random_value(rng, t, tensor(*(objects[i] for i in ins)), objects[out])
    for g, (ins, outs) in sig.pures.items():
        gens[g] = random_morph(rng, t, tensor(*(objects[i] for i in ins)),
                               tensor(*(objects[o] for o in outs)), total=True)
    for g, (ins, outs) in sig.effects.items():
        gens[g] = random_morph(rng, t, tensor(*(objects[i] for i in ins)),
                               tensor(*(objects[o] for o in outs)))
    return Interpretation(t, objects, gens)
