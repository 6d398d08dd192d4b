import itertools
import random
from fractions import Fraction

import pytest

from effmealy.errors import NotCausal, ShapeMismatch
from effmealy.generators import branching_pair, obj, random_machine, random_morph, random_row
from effmealy.kernel import (UNIT, Morph, Theory, atom, compose, identity, join, split, tensor,
                             tensor_morph, with_identity, post)
from effmealy.mealy import MealyMachine, mealy_seq
from effmealy.streams import (CausalProcess, StreamPrefix, canonical, check_causal,
                              conditional_sequence, proc_of_stream, process_compose, str_of_proc,
                              stream_act, stream_compose, stream_equal_upto, trace_process,
                              trace_stream)

from helpers import BIT_X, BIT_Y, random_stream
import oracles

BIT = atom("Bit", "0", "1")


def elem(t):
    return t[0] if len(t) == 1 else tuple(t)


def running_xor():
    init = Morph.point("det", BIT, "0")
    trans = Morph.from_function("det", tensor(BIT, BIT), tensor(BIT, BIT),
                                lambda e: (str(int(e[0]) ^ int(e[1])),) * 2)
    return MealyMachine(BIT, BIT, BIT, init, trans)


# traces

def test_running_xor_component():
    p = trace_process(running_xor(), 2)
    assert p.components[1].row(("1", "1")) == {("1", "0"): 1}
    assert p.components[0].row("1") == {"1": 1}


def test_stateless_uniform_trace_is_independent():
    m = MealyMachine.stateless(Morph("stoch", BIT_X, BIT_Y, {
        x: {"0": Fraction(1, 2), "1": Fraction(1, 2)} for x in BIT_X.elements}))
    p = trace_process(m, 3)
    for n, f in enumerate(p.components):
        for x in f.dom.elements:
            row = f.row(x)
            assert len(row) == 2 ** (n + 1) and set(row.values()) == {Fraction(1, 2 ** (n + 1))}


def test_parstoch_path_sum_two_states():
    u = atom("U", "s0", "s1")
    x = atom("X", "x")
    y = atom("Y", "a", "b")
    q = Fraction
    trans = Morph("parstoch", tensor(u, x), tensor(u, y), {
        ("s0", "x"): {("s0", "a"): q(1, 2), ("s1", "b"): q(1, 3)},
        ("s1", "x"): {("s0", "b"): q(3, 4)}})
    init = Morph("parstoch", UNIT, u, {(): {"s0": q(1, 2), "s1": q(1, 2)}})
    m = MealyMachine(u, x, y, init, trans)
    p = trace_process(m, 2)
    f2 = p.components[2].row(("x", "x", "x"))
    # (a, a, a) only along s0 s0 s0 s0
    assert f2[("a", "a", "a")] == q(1, 2) * q(1, 2) ** 3
    # (b, b, b) along s1 s0 s1 s0 and along s0 s1 s0 s1
    assert f2[("b", "b", "b")] == q(1, 2) * q(3, 4) * q(1, 3) * q(3, 4) + q(1, 2) * q(1, 3) * q(3, 4) * q(1, 3)
    assert f2[("b", "b", "b")] == q(13, 96)
    for n in range(3):
        for word in itertools.product(x.elements, repeat=n + 1):
            assert oracles.dense(p.components[n])[elem(word)] == {
                elem(k): v for k, v in oracles.path_trace(m, word).items()}


@pytest.mark.parametrize("theory", list(Theory))
def test_trace_matches_path_enumeration(theory):
    rng = random.Random(hash(theory.value) % 51)
    for _ in range(8):
        m = random_machine(rng, theory, rng.randint(1, 3), BIT_X, BIT_Y)
        p = trace_process(m, 3)
        for n, f in enumerate(p.components):
            d = oracles.dense(f)
            for word in itertools.product(BIT_X.elements, repeat=n + 1):
                expected = {elem(k): v for k, v in oracles.path_trace(m, word).items()}
                assert d[elem(word)] == expected


@pytest.mark.parametrize("theory", list(Theory))
def test_traces_are_causal(theory):
    rng = random.Random(2)
    for _ in range(10):
        m = random_machine(rng, theory, 3, BIT_X, BIT_Y)
        assert check_causal(trace_process(m, 3))


def test_negative_horizon():
    with pytest.raises(ValueError):
        trace_process(running_xor(), -1)


# causality

def _process(theory, comps):
    k = len(comps)
    return CausalProcess([BIT] * k, [BIT] * k, comps)


def test_future_influencing_past_is_not_causal():
    f0 = identity(BIT, Theory.DET)
    f1 = identity(tensor(BIT, BIT), Theory.DET)
    f2 = Morph.from_function("det", tensor(BIT, BIT, BIT), tensor(BIT, BIT, BIT),
                             lambda e: (e[2], e[1], e[2]))
    p = _process("det", [f0, f1, f2])
    assert not check_causal(p)
    with pytest.raises(NotCausal):
        str_of_proc(p)


def test_parstoch_mass_growth_is_not_causal():
    half = Fraction(1, 2)
    f0 = Morph("parstoch", BIT, BIT, {x: {"0": 1} for x in BIT.elements})
    f1 = Morph("parstoch", tensor(BIT, BIT), tensor(BIT, BIT),
               {e: {("0", "0"): half} for e in tensor(BIT, BIT).elements})
    f2 = Morph("parstoch", tensor(BIT, BIT, BIT), tensor(BIT, BIT, BIT),
               {e: {("0", "0", "1"): 1} for e in tensor(BIT, BIT, BIT).elements})
    assert check_causal(_process("parstoch", [f0, f1]))
    assert not check_causal(_process("parstoch", [f0, f1, f2]))


def test_rel_prefix_escape_is_not_causal():
    f0 = Morph("rel", BIT, BIT, {x: {"0": 1} for x in BIT.elements})
    f1 = Morph("rel", tensor(BIT, BIT), tensor(BIT, BIT),
               {e: {("0", "1"): 1, ("1", "1"): 1} for e in tensor(BIT, BIT).elements})
    assert not check_causal(_process("rel", [f0, f1]))


def test_process_shape_checked():
    with pytest.raises(ShapeMismatch):
        CausalProcess([BIT], [BIT], [identity(tensor(BIT, BIT), Theory.DET)])


# streams and processes

def test_unit_memory_stream_is_tensor_of_heads():
    rng = random.Random(3)
    heads = [random_morph(rng, "stoch", BIT_X, BIT_Y) for _ in range(3)]
    s = StreamPrefix([BIT_X] * 3, [BIT_Y] * 3, [UNIT] * 3, heads)
    p = proc_of_stream(s)
    assert p.components[2] == tensor_morph(*heads)


@pytest.mark.parametrize("theory", list(Theory))
def test_trace_stream_gives_trace_process(theory):
    m = random_machine(random.Random(4), theory, 3, BIT_X, BIT_Y)
    assert proc_of_stream(trace_stream(m, 3)) == trace_process(m, 3)


@pytest.mark.parametrize("theory", list(Theory))
def test_sliding_a_pure_morphism_across_memory(theory):
    rng = random.Random(5)
    for _ in range(10):
        m, m2 = obj("M", 3), obj("N", 2)
        h0 = random_morph(rng, theory, BIT_X, tensor(m, BIT_Y))
        r = random_morph(rng, theory, m, m2, total=True)
        h1 = random_morph(rng, theory, tensor(m2, BIT_X), tensor(obj("K", 2), BIT_Y))
        h0r = post(h0, tensor(m2, BIT_Y), with_identity(r, after=[BIT_Y]))
        rh1 = compose(Morph(theory, tensor(m, BIT_X), tensor(m2, BIT_X),
                            {e: with_identity(r, after=[BIT_X])(e) for e in tensor(m, BIT_X).elements}),
                      h1)
        a = StreamPrefix([BIT_X] * 2, [BIT_Y] * 2, [m2, h1.cod.factors[0]], [h0r, h1])
        b = StreamPrefix([BIT_X] * 2, [BIT_Y] * 2, [m, h1.cod.factors[0]], [h0, rh1])
        assert proc_of_stream(a) == proc_of_stream(b)


def test_round_trip_running_xor():
    p = trace_process(running_xor(), 4)
    assert proc_of_stream(str_of_proc(p)) == p


def test_canonical_memory_is_history():
    p = trace_process(running_xor(), 2)
    s = str_of_proc(p)
    assert s.memories[1] == tensor(BIT, BIT, BIT, BIT)


def test_constant_det_process_heads():
    f = Morph.from_function("det", BIT_X, BIT_Y, lambda x: x)
    m = MealyMachine.stateless(f)
    s = str_of_proc(trace_process(m, 2))
    assert s.heads[0].row("1") == {("1", "1", "1"): 1}
    assert s.heads[1].row(("0", "0", "1")) == {("0", "0", "1", "1", "1"): 1}


def test_conditional_choice_does_not_matter():
    rng = random.Random(6)
    changed = 0
    for _ in range(20):
        m = random_machine(rng, "parstoch", 2, BIT_X, BIT_Y)
        p = trace_process(m, 3)
        s = str_of_proc(p)
        heads = list(s.heads)
        for n in range(1, len(heads)):
            prev = p.components[n - 1]
            rows = dict(heads[n].rows)
            for e in heads[n].dom.elements:
                hist = e[:-1]
                xs, ys = hist[0::2], hist[1::2]
                if prev.row(elem(xs)).get(elem(ys)):
                    continue
                new = random_row(rng, "parstoch", heads[n].cod)
                if new != rows.get(e, {}):
                    changed += 1
                rows[e] = new
            heads[n] = Morph("parstoch", heads[n].dom, heads[n].cod, rows)
        other = StreamPrefix(s.inputs, s.outputs, s.memories, heads)
        assert proc_of_stream(other) == p
    assert changed > 0


@pytest.mark.parametrize("theory", list(Theory))
def test_random_stream_equals_its_canonical_form(theory):
    rng = random.Random(7)
    for _ in range(10):
        s = random_stream(rng, theory, 3)
        assert stream_equal_upto(s, canonical(s), 3)
        assert proc_of_stream(canonical(s)) == proc_of_stream(s)


def test_conditional_sequence_shapes():
    p = trace_process(running_xor(), 2)
    seq = conditional_sequence(p)
    assert seq[0].dom == BIT
    assert seq[2].dom == tensor(BIT, BIT, BIT, BIT, BIT)


# equality up to a horizon

def test_branching_pair_is_trace_equal():
    a, b = branching_pair()
    for h in range(9):
        assert stream_equal_upto(trace_stream(a, h), trace_stream(b, h), h)


def test_different_statistics_detected():
    q = Fraction
    m1 = MealyMachine.stateless(Morph("stoch", BIT_X, BIT_Y, {x: {"0": 1} for x in BIT_X.elements}))
    m2 = MealyMachine.stateless(Morph("stoch", BIT_X, BIT_Y,
                                      {x: {"0": q(1, 2), "1": q(1, 2)} for x in BIT_X.elements}))
    assert not stream_equal_upto(trace_stream(m1, 1), trace_stream(m2, 1), 1)


def test_equal_upto_shape_errors():
    a = trace_stream(running_xor(), 2)
    with pytest.raises(ShapeMismatch):
        stream_equal_upto(a, a, 3)
    other = trace_stream(random_machine(random.Random(0), "det", 2, BIT_X, BIT_Y), 2)
    with pytest.raises(ShapeMismatch):
        stream_equal_upto(a, other, 2)


# composition

def test_compose_with_identity_stream():
    rng = random.Random(8)
    s = random_stream(rng, "stoch", 3)
    ident = StreamPrefix(s.outputs, s.outputs, [UNIT] * 4, [identity(y) for y in s.outputs])
    assert stream_equal_upto(stream_compose(s, ident), s, 3)


@pytest.mark.parametrize("theory", list(Theory))
def test_trace_is_functorial(theory):
    rng = random.Random(9)
    for _ in range(3):
        m1 = random_machine(rng, theory, 2, BIT_X, BIT_Y)
        m2 = random_machine(rng, theory, 2, BIT_Y, BIT_X, "V")
        lhs = stream_compose(trace_stream(m1, 4), trace_stream(m2, 4))
        assert stream_equal_upto(lhs, trace_stream(mealy_seq(m1, m2), 4), 4)
        assert proc_of_stream(lhs) == process_compose(trace_process(m1, 4), trace_process(m2, 4))


def test_tensoring_at_the_head():
    rng = random.Random(10)
    s = random_stream(rng, "stoch", 2)
    a = obj("A", 3)
    r = random_morph(rng, "stoch", a, s.inputs[0])
    p, q = proc_of_stream(s), proc_of_stream(stream_act(r, s))
    for n in range(3):
        rest = s.inputs[1:n + 1]
        pre = Morph("stoch", tensor(a, *rest), tensor(s.inputs[0], *rest),
                    {e: with_identity(r, after=rest)(e) for e in tensor(a, *rest).elements})
        assert q.components[n] == compose(pre, p.components[n])


def test_stream_act_shape():
    s = random_stream(random.Random(0), "stoch", 1)
    with pytest.raises(ShapeMismatch):
        stream_act(identity(obj("Z", 5)), s)
