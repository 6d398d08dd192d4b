"""Effectful Mealy machines: composition, feedback and bisimilarity."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .errors import NotAProduct, PurityViolation, ShapeMismatch, SizeLimitExceeded
from .kernel import (UNIT, Morph, accumulate, wmul, ObjectType, Theory, compose, identity, is_pure,
                     is_value, join, post, split, split_product, tensor,
                     tensor_morph, with_identity)


class MealyMachine:
    """State ``U``, pure initial state ``init: I -> U`` and ``trans: U*X -> U*Y``."""

    __slots__ = ("theory", "state", "inp", "out", "init", "trans")

    def __init__(self, state: ObjectType, inp: ObjectType, out: ObjectType,
                 init: Morph, trans: Morph):
        self.theory = trans.theory
        self.state, self.inp, self.out = state, inp, out
        self.init, self.trans = init, trans
        if state.size == 0:
            raise ShapeMismatch("a machine needs at least one state")
        if init.theory is not self.theory:
            raise ShapeMismatch("initial state and transition live in different theories")
        if init.dom != UNIT or init.cod != state:
            raise ShapeMismatch(f"initial state must be I -> {state.name}")
        if trans.dom != tensor(state, inp) or trans.cod != tensor(state, out):
            raise ShapeMismatch(f"transition must be {state.name}*{inp.name} -> {state.name}*{out.name}")
        if not is_pure(init):
            raise PurityViolation("initial state is not pure")

    @classmethod
    def stateless(cls, f: Morph) -> "MealyMachine":
        return cls(UNIT, f.dom, f.cod, identity(UNIT, f.theory), f)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MealyMachine):
            return NotImplemented
        return (self.state == other.state and self.inp == other.inp and self.out == other.out
                and self.init == other.init and self.trans == other.trans)

    def __hash__(self):
        return hash((self.state, self.inp, self.out))

    def __repr__(self) -> str:
        return (f"MealyMachine<{self.theory}: {self.inp.name} -> {self.out.name}, "
                f"{self.state.size} states>")

    def step(self, u, x) -> dict:
        """Weighted ``{(u', y): w}`` for one transition."""
        row = self.trans.row(join([self.state, self.inp], [u, x]))
        return {tuple(split([self.state, self.out], k)): w for k, w in row.items()}


class Homomorphism(NamedTuple):
    map: Morph


def _rest(obj: ObjectType, g: ObjectType) -> ObjectType:
    if g.is_unit:
        return obj
    if obj == g:
        return UNIT
    return split_product(obj, g)[1]


def mealy_seq(m1: MealyMachine, m2: MealyMachine, shared: ObjectType = UNIT) -> MealyMachine:
    """Run ``m1`` and feed its output to ``m2``.

    ``shared`` names a leading state factor common to both machines (a global
    state): it is threaded from ``m1`` to ``m2`` instead of being duplicated,
    and its initial value comes from ``m1``.
    """
    if m1.theory is not m2.theory:
        raise ShapeMismatch("machines from different theories")
    if m1.out != m2.inp:
        raise ShapeMismatch(f"output {m1.out.name} does not match input {m2.inp.name}")
    g = shared
    u, v = _rest(m1.state, g), _rest(m2.state, g)
    x, y, z = m1.inp, m1.out, m2.out
    state = tensor(g, u, v)
    t = m1.theory
    prob = t.probabilistic

    j_v = post(m2.init, v, lambda e: {split([g, v], e)[1]: 1})
    init_rows = {}
    for e1, w1 in m1.init.row(()).items():
        gg, uu = split([g, u], e1)
        for vv, w2 in j_v.row(()).items():
            init_rows[join([g, u, v], [gg, uu, vv])] = w1 * w2
    init = Morph(t, UNIT, state, {(): init_rows})

    def rowfn(e):
        gg, uu, vv, xx = split([g, u, v, x], e)
        acc = {}
        for k1, w1 in m1.trans.row(join([g, u, x], [gg, uu, xx])).items():
            g1, u1, yy = split([g, u, y], k1)
            for k2, w2 in m2.trans.row(join([g, v, y], [g1, vv, yy])).items():
                g2, v1, zz = split([g, v, z], k2)
                key = join([g, u, v, z], [g2, u1, v1, zz])
                if prob:
                    accumulate(acc, key, wmul(w1, w2))
                else:
                    acc[key] = 1
        return acc

    trans = Morph.build(t, tensor(state, x), tensor(state, z), rowfn, check=False)
    return MealyMachine(state, x, z, init, trans)


def mealy_whisker(m: MealyMachine, z: ObjectType, side: str = "right") -> MealyMachine:
    """``m`` acting on one wire while ``z`` passes through on the other."""
    u, x, y = m.state, m.inp, m.out
    if side == "right":
        inp, out = tensor(x, z), tensor(y, z)

        def rowfn(e):
            uu, xx, zz = split([u, x, z], e)
            return {join([u, y, z], split([u, y], k) + [zz]): w
                    for k, w in m.trans.row(join([u, x], [uu, xx])).items()}
    elif side == "left":
        inp, out = tensor(z, x), tensor(z, y)

        def rowfn(e):
            uu, zz, xx = split([u, z, x], e)
            out_ = {}
            for k, w in m.trans.row(join([u, x], [uu, xx])).items():
                u1, yy = split([u, y], k)
                out_[join([u, z, y], [u1, zz, yy])] = w
            return out_
    else:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    trans = Morph.build(m.theory, tensor(u, inp), tensor(u, out), rowfn, check=False)
    return MealyMachine(u, inp, out, m.init, trans)


def mealy_feedback(t: Morph, m: MealyMachine) -> MealyMachine:
    """Close the leading wire ``T`` of ``m`` into its state, starting at ``t``."""
    if t.dom != UNIT:
        raise ShapeMismatch("feedback initial value must be a state I -> T")
    if not is_pure(t):
        raise PurityViolation("feedback initial value is not pure")
    T = t.cod
    try:
        x, y = _rest(m.inp, T), _rest(m.out, T)
    except NotAProduct:
        raise ShapeMismatch(f"machine wires do not start with {T.name}") from None
    if tensor(T, x) != m.inp or tensor(T, y) != m.out:
        raise ShapeMismatch(f"machine wires do not start with {T.name}")
    state = tensor(m.state, T)
    return MealyMachine(state, x, y, tensor_morph(m.init, t), m.trans)


def check_homomorphism(alpha, m1: MealyMachine, m2: MealyMachine) -> bool:
    """Whether ``alpha: U1 -> U2`` preserves the initial state and the transitions."""
    a = alpha.map if isinstance(alpha, Homomorphism) else alpha
    if a.dom != m1.state or a.cod != m2.state:
        raise ShapeMismatch("homomorphism map does not go between the state objects")
    if m1.inp != m2.inp or m1.out != m2.out or m1.theory is not m2.theory:
        raise ShapeMismatch("machines have different interfaces")
    if a.theory is not m1.theory or not is_value(a):
        return False
    if compose(m1.init, a) != m2.init:
        return False
    lhs = post(m1.trans, m2.trans.cod, with_identity(a, after=[m1.out]))
    start = identity(m1.trans.dom, m1.theory)
    rhs = compose(post(start, m2.trans.dom, with_identity(a, after=[m1.inp])), m2.trans)
    return lhs == rhs


# bisimilarity

class BisimResult(NamedTuple):
    verdict: bool
    partition: List[List[Tuple[int, object]]]
    quotient: MealyMachine
    witness: Optional[Tuple[Homomorphism, ...]]


def _transitions(m: MealyMachine):
    """state -> per input a list of (output, successor, weight)."""
    table = {}
    for u in m.state.elements:
        per_x = []
        for x in m.inp.elements:
            per_x.append([(y, u1, w) for (u1, y), w in m.step(u, x).items()])
        table[u] = per_x
    return table


def _signature(trs, block_of, k, prob):
    sig = []
    for moves in trs:
        acc = {}
        for y, u1, w in moves:
            key = (y, block_of[(k, u1)])
            if prob:
                accumulate(acc, key, w)
            else:
                acc[key] = 1
        sig.append(frozenset(acc.items()))
    return tuple(sig)


def _refine(machines: Sequence[MealyMachine]):
    """Coarsest stable partition of the disjoint union, blocks numbered canonically."""
    prob = machines[0].theory.probabilistic
    states = [(k, u) for k, m in enumerate(machines) for u in m.state.elements]
    tables = [_transitions(m) for m in machines]
    block_of = {s: 0 for s in states}
    n_blocks = 1
    while True:
        ids: Dict[tuple, int] = {}
        new = {}
        for k, u in states:
            key = (block_of[(k, u)], _signature(tables[k][u], block_of, k, prob))
            new[(k, u)] = ids.setdefault(key, len(ids))
        block_of = new
        if len(ids) == n_blocks:
            return states, block_of, len(ids)
        n_blocks = len(ids)


def _init_image(m: MealyMachine, k: int, block_of) -> dict:
    prob = m.theory.probabilistic
    acc = {}
    for u, w in m.init.row(()).items():
        b = block_of[(k, u)]
        if prob:
            accumulate(acc, b, w)
        else:
            acc[b] = 1
    return acc


def _quotient(machines, states, block_of, n_blocks, init_from: int = 0):
    m0 = machines[init_from]
    t = m0.theory
    prob = t.probabilistic
    q = ObjectType("Q", [f"b{i}" for i in range(n_blocks)])
    label = {i: f"b{i}" for i in range(n_blocks)}
    reps = {}
    for k, u in states:
        reps.setdefault(block_of[(k, u)], (k, u))
    init_rows = {label[b]: w for b, w in _init_image(m0, init_from, block_of).items()}
    init = Morph(t, UNIT, q, {(): init_rows})
    x, y = m0.inp, m0.out
    rows = {}
    for b in range(n_blocks):
        k, u = reps[b]
        m = machines[k]
        for xx in x.elements:
            acc = {}
            for (u1, yy), w in m.step(u, xx).items():
                key = join([q, y], [label[block_of[(k, u1)]], yy])
                if prob:
                    accumulate(acc, key, w)
                else:
                    acc[key] = 1
            rows[join([q, x], [label[b], xx])] = acc
    trans = Morph(t, tensor(q, x), tensor(q, y), rows)
    quotient = MealyMachine(q, x, y, init, trans)
    maps = tuple(
        Homomorphism(Morph.from_function(t, m.state, q, lambda u, k=k: label[block_of[(k, u)]]))
        for k, m in enumerate(machines))
    return quotient, maps


def _same_interface(m1: MealyMachine, m2: MealyMachine):
    if m1.theory is not m2.theory:
        raise ShapeMismatch(f"machines from different theories ({m1.theory}, {m2.theory})")
    if m1.inp != m2.inp or m1.out != m2.out:
        raise ShapeMismatch("machines have different input or output objects")


def bisimilar(m1: MealyMachine, m2: MealyMachine) -> BisimResult:
    """Decide bisimilarity by partition refinement on the disjoint union."""
    _same_interface(m1, m2)
    machines = [m1, m2]
    states, block_of, n = _refine(machines)
    verdict = _init_image(m1, 0, block_of) == _init_image(m2, 1, block_of)
    partition = [[] for _ in range(n)]
    for s in states:
        partition[block_of[s]].append(s)
    quotient, maps = _quotient(machines, states, block_of, n)
    return BisimResult(verdict, partition, quotient, maps if verdict else None)


def minimize(m: MealyMachine) -> Tuple[MealyMachine, Homomorphism]:
    """Quotient of ``m`` by bisimilarity, with the quotient map."""
    states, block_of, n = _refine([m])
    quotient, (alpha,) = _quotient([m], states, block_of, n)
    return quotient, alpha


# brute-force oracle

def _set_partitions(n: int, compatible):
    """Restricted growth strings of length ``n``; ``compatible(i, j)`` prunes."""
    assign = [0] * n
    firsts: List[int] = []

    def rec(i):
        if i == n:
            yield list(assign)
            return
        for b, f in enumerate(firsts):
            if compatible(f, i):
                assign[i] = b
                yield from rec(i + 1)
        assign[i] = len(firsts)
        firsts.append(i)
        yield from rec(i + 1)
        firsts.pop()

    yield from rec(0)


def _output_profile(m: MealyMachine, u, prob):
    prof = []
    for x in m.inp.elements:
        acc = {}
        for (_, y), w in m.step(u, x).items():
            if prob:
                accumulate(acc, y, w)
            else:
                acc[y] = 1
        prof.append(frozenset(acc.items()))
    return tuple(prof)


def _cospans(machines, need_init: bool = True):
    """Yield partitions of the disjoint union that are the kernel of a cospan.

    A partition qualifies when every block has a single pushforward of its
    members' transitions (so the quotient machine is well defined and each
    inclusion is a homomorphism) and, if ``need_init``, the initial states of
    all machines agree in the quotient.
    """
    prob = machines[0].theory.probabilistic
    states = [(k, u) for k, m in enumerate(machines) for u in m.state.elements]
    tables = [_transitions(m) for m in machines]
    profiles = [_output_profile(machines[k], u, prob) for k, u in states]

    def compatible(i, j):
        return profiles[i] == profiles[j]

    for assign in _set_partitions(len(states), compatible):
        block_of = dict(zip(states, assign))
        sigs = {}
        ok = True
        for (k, u) in states:
            s = _signature(tables[k][u], block_of, k, prob)
            b = block_of[(k, u)]
            if sigs.setdefault(b, s) != s:
                ok = False
                break
        if not ok:
            continue
        if need_init:
            imgs = [_init_image(m, k, block_of) for k, m in enumerate(machines)]
            if any(img != imgs[0] for img in imgs[1:]):
                continue
        yield states, block_of, max(assign) + 1


def _has_cospan(a: MealyMachine, b: MealyMachine) -> bool:
    for states, block_of, n in _cospans([a, b]):
        w, (alpha, beta) = _quotient([a, b], states, block_of, n)
        if check_homomorphism(alpha, a, w) and check_homomorphism(beta, b, w):
            return True
    return False


def bisim_oracle(m1: MealyMachine, m2: MealyMachine, max_zig: int = 1,
                 max_states: int = 6) -> bool:
    """Search for a zig-zag of at most ``max_zig`` cospans of homomorphisms.

    Cospan targets range over the quotients of the disjoint union of the two
    ends; intermediate machines range over the quotients of ``m1`` and ``m2``.
    Every candidate found is re-checked with :func:`check_homomorphism`.
    """
    _same_interface(m1, m2)
    if m1.state.size > max_states or m2.state.size > max_states:
        raise SizeLimitExceeded(f"oracle limited to {max_states} states per machine")
    pool = []
    if max_zig > 1:
        for m in (m1, m2):
            for states, block_of, n in _cospans([m]):
                q, _ = _quotient([m], states, block_of, n)
                if q not in pool:
                    pool.append(q)
    reached = [m1]
    frontier = [m1]
    for _ in range(max_zig):
        if any(_has_cospan(a, m2) for a in frontier):
            return True
        nxt = []
        for a in frontier:
            for p in pool:
                if p not in reached and _has_cospan(a, p):
                    reached.append(p)
                    nxt.append(p)
        frontier = nxt
        if not frontier:
            break
    return False
