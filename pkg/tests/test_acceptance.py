"""The nine acceptance criteria, each at its exact tolerance and time budget.

Every criterion prints one ``PASS``/``FAIL`` line (also under output
capture) and then asserts.  Run directly with ``python3 tests/test_acceptance.py``
for the summary lines alone.
"""

import itertools
import random
import sys
import time
from pathlib import Path

import pytest

from effmealy.casestudies import (CipherConfig, build_cipher, cipher_vs_secure,
                                  verify_otp_identities)
from effmealy.donotation import (interpret, legal_swaps, normalize, parse, prog_compose,
                                 swap_adjacent)
from effmealy.generators import (branching_pair, obj, random_interpretation, random_machine,
                                 random_morph, random_program, random_row, sample_signature,
                                 split_states)
from effmealy.kernel import (Morph, Theory, compose, conditional, identity, is_quasi_total,
                             range_of, split, tensor, tensor_morph, triangle, verify_conditional,
                             verify_range)
from effmealy.mealy import (MealyMachine, bisim_oracle, bisimilar, check_homomorphism,
                            mealy_feedback, mealy_seq)
from effmealy.streams import (canonical, proc_of_stream, str_of_proc, stream_equal_upto,
                              trace_process)

sys.path.insert(0, str(Path(__file__).resolve().parent))
import oracles  # noqa: E402
from helpers import (BIT_X, BIT_Y, THEORIES, all_det_tables, det_machine,  # noqa: E402
                     det_structures_up_to_renaming, lift_through, random_pure_state,
                     random_stream)

ROOT = Path(__file__).resolve().parent.parent
RESULTS = {}


class Criterion:
    """Collects named checks, times the block and reports one line."""

    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.failed = []
        self.counts = {}
        self.notes = []

    def check(self, name, ok):
        self.counts[name] = self.counts.get(name, 0) + 1
        if not ok and name not in self.failed:
            self.failed.append(name)

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self.start
        if exc is not None:
            self.failed.append(f"error: {exc_type.__name__}: {exc}")
        if self.elapsed >= self.budget:
            self.failed.append(f"over budget ({self.elapsed:.1f} s >= {self.budget} s)")
        verdict = "FAIL" if self.failed else "PASS"
        counts = ", ".join(f"{k}={v}" for k, v in self.counts.items())
        line = (f"CRITERION {self.number} {verdict}: {self.title} "
                f"[{counts}] {self.elapsed:.2f} s / {self.budget} s")
        if self.notes:
            line += " ; " + "; ".join(self.notes)
        if self.failed:
            line += " ; failed: " + "; ".join(self.failed)
        RESULTS[self.number] = line
        _emit(line)
        return False


def _emit(line):
    capman = _CAPTURE.get("manager")
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)


_CAPTURE = {}


@pytest.fixture(autouse=True)
def _capture_manager(request):
    _CAPTURE["manager"] = request.config.pluginmanager.getplugin("capturemanager")
    yield
    _CAPTURE.pop("manager", None)


# 1. conditionals

def test_criterion_1_conditional_law():
    rng = random.Random(101)
    with Criterion(1, "conditional law and quasi-totality", 10) as c:
        for theory in THEORIES:
            for _ in range(200):
                x, a, b = (obj(n, rng.randint(1, 4)) for n in "XAB")
                f = random_morph(rng, theory, x, tensor(a, b))
                s = conditional(f, a)
                c.check("law", verify_conditional(f, s))
                c.check("quasi_total", is_quasi_total(s.conditional)
                        and oracles.quasi_total_rows(s.conditional))
                recomposed = oracles.dense_triangle(s.marginal, s.conditional)
                c.check("oracle", recomposed == oracles.dense(f))
    assert not c.failed, c.failed


# 2. ranges

def _agreeing_pair(rng, theory, m, y, z):
    """``c`` random on ``A*X*Y``; ``d`` equal to ``c`` on the support of ``m``."""
    a_obj, x_obj = m.cod, m.dom
    dom = tensor(a_obj, x_obj, y)
    total = theory in (Theory.DET, Theory.STOCH)
    c = random_morph(rng, theory, dom, z, total=total)
    rows = {}
    changed = False
    for e in dom.elements:
        a, x, _ = split([a_obj, x_obj, y], e)
        if a in m.row(x):
            rows[e] = dict(c.row(e))
        else:
            rows[e] = random_row(rng, theory, z, total=total)
            changed |= rows[e] != c.row(e)
    return c, Morph(theory, dom, z, rows), changed


def test_criterion_2_range_axioms():
    rng = random.Random(202)
    with Criterion(2, "range axioms", 10) as c:
        for theory in THEORIES:
            for _ in range(200):
                m = random_morph(rng, theory, obj("X", rng.randint(1, 4)), obj("A", rng.randint(1, 4)))
                c.check("axiom_i", verify_range(m, range_of(m)))
            built = 0
            while built < 50:
                m = random_morph(rng, theory, obj("X", rng.randint(1, 3)), obj("A", rng.randint(2, 4)))
                y, z = obj("Y", rng.randint(1, 2)), obj("Z", rng.randint(1, 3))
                cc, dd, changed = _agreeing_pair(rng, theory, m, y, z)
                if not changed:
                    continue
                built += 1
                c.check("pair_agrees", triangle(m, cc) == triangle(m, dd))
                c.check("axiom_ii", verify_range(m, range_of(m), [(cc, dd)]))
    assert not c.failed, c.failed


# 3. bisimilarity

def test_criterion_3_bisimilarity_correctness():
    rng = random.Random(303)
    with Criterion(3, "bisimilar agrees with the oracle", 60) as c:
        # every pair with |U1| + |U2| <= 3, then all 3-state structures
        by_size = {1: [det_machine(1, 0, t) for t in all_det_tables(1)],
                   2: [det_machine(2, i, t) for t in all_det_tables(2) for i in (0, 1)]}
        for a, b in itertools.chain(itertools.product(by_size[1], by_size[1]),
                                    itertools.product(by_size[1], by_size[2]),
                                    itertools.product(by_size[2], by_size[1])):
            v = bisimilar(a, b).verdict
            c.check("det_pairs_oracle", v == bisim_oracle(a, b))
            c.check("det_pairs_language", v == oracles.det_equivalent(a, b))
        for table in det_structures_up_to_renaming(3):
            for i, j in itertools.permutations(range(3), 2):
                a, b = det_machine(3, i, table), det_machine(3, j, table)
                v = bisimilar(a, b).verdict
                c.check("det_3_state_oracle", v == bisim_oracle(a, b))
        for theory in (Theory.REL, Theory.STOCH):
            for k in range(60):
                m = random_machine(rng, theory, rng.randint(1, 3), BIT_X, BIT_Y)
                if k % 2:
                    other = split_states(rng, m, extra=1)
                else:
                    other = random_machine(rng, theory, rng.randint(1, 4), BIT_X, BIT_Y)
                v = bisimilar(m, other).verdict
                c.check(f"{theory}_oracle", v == bisim_oracle(m, other))
    assert not c.failed, c.failed


# 4. bisimilar machines are trace equivalent

def test_criterion_4_bisimilar_implies_trace_equal():
    rng = random.Random(404)
    with Criterion(4, "bisimilarity implies trace equality", 30) as c:
        for k in range(100):
            theory = THEORIES[k % len(THEORIES)]
            m = random_machine(rng, theory, rng.randint(1, 3), BIT_X, BIT_Y)
            big = split_states(rng, m, extra=rng.randint(1, 2))
            c.check("bisimilar", bisimilar(big, m).verdict)
            c.check("trace_equal_h6", stream_equal_upto(trace_process(big, 6), trace_process(m, 6), 6))
        early, late = branching_pair()
        for h in range(9):
            c.check("counterexample_trace_equal",
                    stream_equal_upto(trace_process(early, h), trace_process(late, h), h))
        c.check("counterexample_not_bisimilar", not bisimilar(early, late).verdict)
    assert not c.failed, c.failed


# 5. processes and streams

def test_criterion_5_process_stream_isomorphism():
    rng = random.Random(505)
    with Criterion(5, "processes and streams are isomorphic", 60) as c:
        for theory in THEORIES:
            for _ in range(100):
                m = random_machine(rng, theory, rng.randint(1, 3), BIT_X, BIT_Y)
                p = trace_process(m, 5)
                c.check("round_trip", proc_of_stream(str_of_proc(p)).components == p.components)
            for _ in range(100):
                s = random_stream(rng, theory, 5, max_mem=2)
                c.check("canonical", stream_equal_upto(s, canonical(s), 5))
    assert not c.failed, c.failed


# 6. trace formulas

def test_criterion_6_trace_formulas():
    rng = random.Random(606)
    with Criterion(6, "trace equals path enumeration", 30) as c:
        for theory in (Theory.DET, Theory.PAR, Theory.REL, Theory.PARSTOCH):
            for _ in range(25):
                m = random_machine(rng, theory, rng.randint(1, 3), BIT_X, BIT_Y)
                p = trace_process(m, 4)
                for n, f in enumerate(p.components):
                    d = oracles.dense(f)
                    for word in itertools.product(BIT_X.elements, repeat=n + 1):
                        expected = {(k if len(k) > 1 else k[0]): v
                                    for k, v in oracles.path_trace(m, word).items()}
                        key = word if len(word) > 1 else word[0]
                        c.check(str(theory), d[key] == expected)
    assert not c.failed, c.failed


# 7. do-notation

def test_criterion_7_do_notation():
    rng = random.Random(707)
    sig = sample_signature()
    with Criterion(7, "do-notation interpretation", 20) as c:
        done = 0
        while done < 500:
            p = random_program(rng, sig, n_stmts=rng.randint(2, 6))
            swaps = legal_swaps(p)
            if not swaps:
                continue
            itp = random_interpretation(rng, THEORIES[done % len(THEORIES)], sig)
            q = swap_adjacent(p, rng.choice(swaps))
            c.check("interchange", interpret(p, itp) == interpret(q, itp))
            done += 1
        for k in range(100):
            p = random_program(rng, sig, n_stmts=3, params=("A", "B"), ret_types=("B", "A"))
            q = random_program(rng, sig, n_stmts=3, params=("B", "A"), ret_types=("A",))
            itp = random_interpretation(rng, THEORIES[k % len(THEORIES)], sig)
            c.check("functorial",
                    interpret(prog_compose(p, q), itp) == compose(interpret(p, itp), interpret(q, itp)))
        _, progs = parse((ROOT / "demos" / "programs.do").read_text())
        for p in progs.values():
            n = normalize(p)
            c.check("idempotent", normalize(n).same_body(n))
    assert not c.failed, c.failed


# 8. feedback

def test_criterion_8_feedback_axioms():
    rng = random.Random(808)
    T, S = obj("T", 2), obj("S", 2)
    with Criterion(8, "feedback axioms", 30) as c:
        for k in range(100):
            theory = THEORIES[k % len(THEORIES)]
            m = random_machine(rng, theory, 2, tensor(T, S, BIT_X), tensor(T, S, BIT_Y))
            t, s = random_pure_state(rng, theory, T), random_pure_state(rng, theory, S)
            c.check("joining", mealy_feedback(s, mealy_feedback(t, m))
                    == mealy_feedback(tensor_morph(t, s), m))
        for k in range(100):
            theory = THEORIES[k % len(THEORIES)]
            m = random_machine(rng, theory, 2, tensor(T, BIT_X), tensor(T, BIT_Y))
            t = random_pure_state(rng, theory, T)
            u = random_morph(rng, theory, BIT_X, BIT_X)
            v = random_morph(rng, theory, BIT_Y, BIT_Y)
            idt = identity(T, theory)
            inner = mealy_seq(mealy_seq(MealyMachine.stateless(tensor_morph(idt, u)), m),
                              MealyMachine.stateless(tensor_morph(idt, v)))
            outer = mealy_seq(mealy_seq(MealyMachine.stateless(u), mealy_feedback(t, m)),
                              MealyMachine.stateless(v))
            c.check("tightening", mealy_feedback(t, inner) == outer)
        for k in range(50):
            theory = THEORIES[k % len(THEORIES)]
            d = random_machine(rng, theory, 2, tensor(T, BIT_X), tensor(T, BIT_Y))
            t = random_pure_state(rng, theory, T)
            cm, S2, s2, p = lift_through(rng, d, T, t)
            lhs, rhs = mealy_feedback(s2, cm), mealy_feedback(t, d)
            premise = (compose(s2, p) == t and check_homomorphism(
                tensor_morph(identity(d.state, theory), p), lhs, rhs))
            c.check("uniformity_premise", premise)
            c.check("uniformity", (not premise) or bisimilar(lhs, rhs).verdict)
    assert not c.failed, c.failed


# 9. stream cipher

def test_criterion_9_stream_cipher():
    with Criterion(9, "stream cipher", 60) as c:
        for bits in (1, 2, 3):
            r = verify_otp_identities(CipherConfig.affine(bits, 2 ** bits))
            c.check(f"identities_{bits}bit", r.passed)
        m = build_cipher(CipherConfig.ideal(1, 4))
        c.check("ideal_trace_equal",
                stream_equal_upto(trace_process(m["cipher"], 4), trace_process(m["secure"], 4), 4))
        for size in (4, 16, 64):
            cmp_ = cipher_vs_secure(CipherConfig.affine(1, size), 4)
            tvs = ", ".join(str(v) for v in cmp_.tv_per_step)
            _emit(f"  affine/{size}: tv_per_step=[{tvs}] prng_eps={cmp_.prng_eps} "
                  f"bound_violations={cmp_.bound_violations()}")
            c.check("reported", len(cmp_.tv_per_step) == 5)
            # a reported finding: recorded, not build-failing
            c.note(f"bound tv[n] <= (n+1)*eps at {size} seeds: "
                   f"{'holds' if not cmp_.bound_violations() else 'violated'}")
    assert not c.failed, c.failed


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
