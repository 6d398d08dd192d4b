"""Finite-horizon streams, causal processes and Mealy traces."""

from __future__ import annotations

from typing import List, Optional, Sequence

from .errors import NotCausal, ShapeMismatch
from .kernel import (UNIT, Morph, accumulate, wmul, ObjectType, Theory, compose, conditional_given,
                     join, pullback, pushforward, split, tensor)
from .mealy import MealyMachine


class CausalProcess:
    """Components ``f_n: X_0*...*X_n -> Y_0*...*Y_n`` for ``n <= horizon``."""

    __slots__ = ("theory", "inputs", "outputs", "components")

    def __init__(self, inputs: Sequence[ObjectType], outputs: Sequence[ObjectType],
                 components: Sequence[Morph]):
        self.inputs, self.outputs = list(inputs), list(outputs)
        self.components = list(components)
        if not self.components:
            raise ShapeMismatch("a causal process needs at least one component")
        if not (len(self.inputs) == len(self.outputs) == len(self.components)):
            raise ShapeMismatch("inputs, outputs and components must have the same length")
        self.theory = self.components[0].theory
        for n, f in enumerate(self.components):
            if f.theory is not self.theory:
                raise ShapeMismatch("components from different theories")
            if f.dom != tensor(*self.inputs[:n + 1]) or f.cod != tensor(*self.outputs[:n + 1]):
                raise ShapeMismatch(f"component {n} has the wrong shape")

    @property
    def horizon(self) -> int:
        return len(self.components) - 1

    def truncate(self, h: int) -> "CausalProcess":
        return CausalProcess(self.inputs[:h + 1], self.outputs[:h + 1], self.components[:h + 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, CausalProcess):
            return NotImplemented
        return (self.inputs == other.inputs and self.outputs == other.outputs
                and self.components == other.components)

    def __repr__(self) -> str:
        return f"CausalProcess<{self.theory}, horizon {self.horizon}>"


class StreamPrefix:
    """Heads ``h_n: M_{n-1}*X_n -> M_n*Y_n`` threading memories, ``M_{-1} = I``."""

    __slots__ = ("theory", "inputs", "outputs", "memories", "heads")

    def __init__(self, inputs, outputs, memories, heads):
        self.inputs, self.outputs = list(inputs), list(outputs)
        self.memories, self.heads = list(memories), list(heads)
        if not self.heads:
            raise ShapeMismatch("a stream prefix needs at least one head")
        if not (len(self.inputs) == len(self.outputs) == len(self.memories) == len(self.heads)):
            raise ShapeMismatch("inputs, outputs, memories and heads must have the same length")
        self.theory = self.heads[0].theory
        prev = UNIT
        for n, h in enumerate(self.heads):
            if h.theory is not self.theory:
                raise ShapeMismatch("heads from different theories")
            if h.dom != tensor(prev, self.inputs[n]) or h.cod != tensor(self.memories[n], self.outputs[n]):
                raise ShapeMismatch(f"head {n} has the wrong shape")
            prev = self.memories[n]

    @property
    def horizon(self) -> int:
        return len(self.heads) - 1

    def truncate(self, h: int) -> "StreamPrefix":
        k = h + 1
        return StreamPrefix(self.inputs[:k], self.outputs[:k], self.memories[:k], self.heads[:k])

    def __repr__(self) -> str:
        return f"StreamPrefix<{self.theory}, horizon {self.horizon}>"


def _unroll(heads: Sequence[Morph], inputs, outputs, memories) -> List[Morph]:
    """Run the heads along the memories; component ``n`` keeps memory ``M_n``.

    ``q_n: X_0*...*X_n -> M_n * Y_0*...*Y_n``.
    """
    t = heads[0].theory
    prob = t.probabilistic
    q = []
    prev = None
    for n, h in enumerate(heads):
        xs, ys = inputs[:n + 1], outputs[:n + 1]
        mem = memories[n]
        dom = tensor(*xs)
        cod = tensor(mem, *ys)
        rows = {}
        if n == 0:
            for x in dom.elements:
                rows[x] = h.row(x)
        else:
            old_mem = memories[n - 1]
            xbar_prev = tensor(*xs[:-1])
            ybar_prev = tensor(*ys[:-1])
            for e in dom.elements:
                xp, x = split([xbar_prev, xs[-1]], e)
                acc = {}
                for k, w in prev.row(xp).items():
                    m, yb = split([old_mem, ybar_prev], k)
                    for k2, v in h.row(join([old_mem, xs[-1]], [m, x])).items():
                        m2, y = split([mem, ys[-1]], k2)
                        key = join([mem, ybar_prev, ys[-1]], [m2, yb, y])
                        if prob:
                            accumulate(acc, key, wmul(w, v))
                        else:
                            acc[key] = 1
                rows[e] = acc
        prev = Morph(t, dom, cod, rows, check=False)
        q.append(prev)
    return q


def _forget_memory(q: Morph, mem: ObjectType, ys) -> Morph:
    ybar = tensor(*ys)
    return pushforward(q, ybar, lambda k: split([mem, ybar], k)[1])


def proc_of_stream(s: StreamPrefix) -> CausalProcess:
    """The causal process computed by a stream: memories are discarded."""
    q = _unroll(s.heads, s.inputs, s.outputs, s.memories)
    comps = [_forget_memory(qn, s.memories[n], s.outputs[:n + 1]) for n, qn in enumerate(q)]
    return CausalProcess(s.inputs, s.outputs, comps)


def trace_stream(m: MealyMachine, horizon: int) -> StreamPrefix:
    """The trace of ``m`` as a stream with memory ``U`` at every step."""
    first = Morph(m.theory, m.inp, tensor(m.state, m.out),
                  {x: _first_row(m, x) for x in m.inp.elements}, check=False)
    heads = [first] + [m.trans] * horizon
    k = horizon + 1
    return StreamPrefix([m.inp] * k, [m.out] * k, [m.state] * k, heads)


def _first_row(m: MealyMachine, x) -> dict:
    prob = m.theory.probabilistic
    acc = {}
    for u, w in m.init.row(()).items():
        for k, v in m.trans.row(join([m.state, m.inp], [u, x])).items():
            if prob:
                accumulate(acc, k, wmul(w, v))
            else:
                acc[k] = 1
    return acc


def trace_process(m: MealyMachine, horizon: int) -> CausalProcess:
    """``p_0 = i ; f``, ``p_{n+1} = (p_n * id) ; f`` on the state, state discarded."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    return proc_of_stream(trace_stream(m, horizon))


def _prefix_marginal(p: CausalProcess, n: int) -> Morph:
    """``f_n * discard_{X_{n+1}}: X_0..X_{n+1} -> Y_0..Y_n``."""
    xs = p.inputs[:n + 2]
    xbar = tensor(*xs[:-1])
    dom = tensor(*xs)
    return pullback(p.components[n], dom, lambda e: split([xbar, xs[-1]], e)[0])


def causal_conditional(p: CausalProcess, n: int) -> Optional[Morph]:
    """A ``c_n`` with ``f_{n+1} = (f_n * discard) ◁ c_n``, or ``None``."""
    m = _prefix_marginal(p, n)
    return conditional_given(p.components[n + 1], m, left=tensor(*p.outputs[:n + 1]))


def check_causal(p: CausalProcess) -> bool:
    return all(causal_conditional(p, n) is not None for n in range(p.horizon))


def conditional_sequence(p: CausalProcess) -> List[Morph]:
    """``c_n: X_0*Y_0*...*X_{n-1}*Y_{n-1}*X_n -> Y_n`` (history interleaved)."""
    seq = [p.components[0]]
    for n in range(p.horizon):
        c = causal_conditional(p, n)
        if c is None:
            raise NotCausal(f"component {n + 1} is not a causal extension of component {n}")
        xs, ys = p.inputs[:n + 2], p.outputs[:n + 1]
        ybar, xbar = tensor(*ys), tensor(*xs)
        blocks = []
        for k in range(n + 1):
            blocks += [xs[k], ys[k]]
        blocks.append(xs[-1])
        dom = tensor(*blocks)

        def reorder(e, blocks=blocks, xs=xs, ys=ys, ybar=ybar, xbar=xbar):
            parts = split(blocks, e)
            return join([ybar, xbar], [join(ys, parts[1:-1:2]),
                                       join(xs, parts[0:-1:2] + [parts[-1]])])
        seq.append(pullback(c, dom, reorder))
    return seq


def str_of_proc(p: CausalProcess) -> StreamPrefix:
    """Canonical stream of a causal process: memory is the whole history."""
    seq = conditional_sequence(p)
    memories, heads = [], []
    prev = UNIT
    for n, c in enumerate(seq):
        x, y = p.inputs[n], p.outputs[n]
        mem = tensor(prev, x, y)
        dom = tensor(prev, x)

        def rowfn(e, c=c, mem=mem, dom=dom, y=y):
            return {join([mem, y], [join([dom, y], [e, yy]), yy]): w for yy, w in c.row(e).items()}
        heads.append(Morph(p.theory, dom, tensor(mem, y),
                           {e: rowfn(e) for e in dom.elements}, check=False))
        memories.append(mem)
        prev = mem
    return StreamPrefix(p.inputs, p.outputs, memories, heads)


def canonical(s: StreamPrefix) -> StreamPrefix:
    return str_of_proc(proc_of_stream(s))


def stream_equal_upto(s1, s2, horizon: int) -> bool:
    """Equality of the causal processes of two streams up to ``horizon``."""
    p1 = s1 if isinstance(s1, CausalProcess) else proc_of_stream(s1.truncate(min(horizon, s1.horizon)))
    p2 = s2 if isinstance(s2, CausalProcess) else proc_of_stream(s2.truncate(min(horizon, s2.horizon)))
    if p1.horizon < horizon or p2.horizon < horizon:
        raise ShapeMismatch(f"streams are shorter than horizon {horizon}")
    if p1.theory is not p2.theory:
        raise ShapeMismatch("streams from different theories")
    if p1.inputs[:horizon + 1] != p2.inputs[:horizon + 1] or p1.outputs[:horizon + 1] != p2.outputs[:horizon + 1]:
        raise ShapeMismatch("streams have different input or output objects")
    return p1.truncate(horizon) == p2.truncate(horizon)


def stream_compose(s1: StreamPrefix, s2: StreamPrefix, horizon: Optional[int] = None) -> StreamPrefix:
    """Sequential composition; memory ``M_n * N_n``."""
    h = min(s1.horizon, s2.horizon) if horizon is None else horizon
    if h > min(s1.horizon, s2.horizon):
        raise ShapeMismatch("horizon exceeds one of the streams")
    if s1.theory is not s2.theory:
        raise ShapeMismatch("streams from different theories")
    if s1.outputs[:h + 1] != s2.inputs[:h + 1]:
        raise ShapeMismatch("outputs of the first stream do not match inputs of the second")
    prob = s1.theory.probabilistic
    heads, mems = [], []
    pm, pn = UNIT, UNIT
    for n in range(h + 1):
        f, g = s1.heads[n], s2.heads[n]
        m, nn = s1.memories[n], s2.memories[n]
        x, y, z = s1.inputs[n], s1.outputs[n], s2.outputs[n]
        dom = tensor(pm, pn, x)
        cod = tensor(m, nn, z)
        rows = {}
        for e in dom.elements:
            a, b, xx = split([pm, pn, x], e)
            acc = {}
            for k1, w1 in f.row(join([pm, x], [a, xx])).items():
                m1, yy = split([m, y], k1)
                for k2, w2 in g.row(join([pn, y], [b, yy])).items():
                    n1, zz = split([nn, z], k2)
                    key = join([m, nn, z], [m1, n1, zz])
                    if prob:
                        accumulate(acc, key, wmul(w1, w2))
                    else:
                        acc[key] = 1
            rows[e] = acc
        heads.append(Morph(s1.theory, dom, cod, rows, check=False))
        mems.append(tensor(m, nn))
        pm, pn = m, nn
    return StreamPrefix(s1.inputs[:h + 1], s2.outputs[:h + 1], mems, heads)


def stream_act(r: Morph, s: StreamPrefix) -> StreamPrefix:
    """Tensoring at the head: precompose a pure ``r: A -> X_0`` into the first head."""
    if r.cod != s.inputs[0]:
        raise ShapeMismatch(f"{r.cod.name} is not the first input {s.inputs[0].name}")
    heads = [compose(r, s.heads[0])] + s.heads[1:]
    return StreamPrefix([r.dom] + s.inputs[1:], s.outputs, s.memories, heads)


def process_compose(p: CausalProcess, q: CausalProcess) -> CausalProcess:
    """Componentwise composition of causal processes."""
    if p.outputs != q.inputs:
        raise ShapeMismatch("process outputs do not match inputs")
    return CausalProcess(p.inputs, q.outputs, [compose(f, g) for f, g in zip(p.components, q.components)])
