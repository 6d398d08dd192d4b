"""Command line front end: ``effmealy <verb> ...``.

Exit codes: 0 success or a true verdict, 1 a false verdict, 2 usage error,
3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, List, Optional

from . import casestudies as cs
from .donotation import Interpretation, interpret, normalize, parse, prog_equal, typecheck
from .errors import EffMealyError, InputError
from .kernel import Theory, conditional, range_of, tensor, verify_conditional, verify_range
from .mealy import bisimilar, minimize
from .serialize import (dumps, load_json, machine_from_json, machine_to_json, morph_from_json,
                        morph_to_json, object_from_json, process_from_json, process_to_json,
                        rational_str)
from .streams import check_causal, stream_equal_upto, trace_process

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class Report:
    """Ordered key/value report, printed as ``key: value`` lines or JSON."""

    def __init__(self, verb: str):
        self.items: List[tuple] = [("command", verb)]

    def add(self, key: str, value: Any):
        self.items.append((key, value))

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps({k: _plain(v) for k, v in self.items}, indent=1) + "\n"
        lines = []
        for k, v in self.items:
            if isinstance(v, list):
                v = "[" + ", ".join(str(_plain(x)) for x in v) + "]"
            elif isinstance(v, bool):
                v = "true" if v else "false"
            else:
                v = _plain(v)
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"


def _plain(v):
    if isinstance(v, list):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    return rational_str(v)


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def _parse_file(path: str):
    try:
        return parse(_read_text(path))
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def _program(progs: dict, name: Optional[str], path: str):
    if name is None:
        if len(progs) != 1:
            raise InputError(f"{path}: holds {len(progs)} programs; name one")
        return next(iter(progs.values()))
    if name not in progs:
        raise InputError(f"{path}: no program named {name!r}")
    return progs[name]


def _write(path: Optional[str], text: str, out):
    if path:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise InputError(f"{path}: {e.strerror}") from None
    else:
        out.write(text)


# verbs

def cmd_normalize(a, out) -> int:
    sig, progs = _parse_file(a.file)
    names = [a.program] if a.program else list(progs)
    parts = [str(sig)]
    for n in names:
        p = _program(progs, n, a.file)
        typecheck(p, sig)
        parts.append(str(normalize(p)))
    _write(a.output, "\n".join(parts) + "\n", out)
    return EXIT_TRUE


def cmd_check_eq(a, out) -> int:
    sig, progs = _parse_file(a.file)
    p, q = _program(progs, a.left, a.file), _program(progs, a.right, a.file)
    eq = prog_equal(p, q)
    r = Report("check-eq")
    r.add("left", a.left)
    r.add("right", a.right)
    r.add("equal", eq)
    out.write(r.render(a.json))
    return EXIT_TRUE if eq else EXIT_FALSE


def _bindings(path: str, theory_flag: Optional[str]) -> Interpretation:
    d = load_json(path)
    if not isinstance(d, dict):
        raise InputError(f"{path}: bindings must be a JSON object")
    theory = theory_flag or d.get("theory")
    if theory is None:
        raise InputError(f"{path}: no theory given (use --theory)")
    objects = {}
    for name, o in d.get("objects", {}).items():
        if isinstance(o, list):
            o = {"name": name, "elements": o}
        objects[name] = object_from_json(o)
    gens = {name: morph_from_json(f) for name, f in d.get("gens", {}).items()}
    g = d.get("global_state")
    return Interpretation(Theory.parse(theory), objects, gens,
                          global_state=object_from_json(g) if g is not None else None)


def cmd_interpret(a, out) -> int:
    sig, progs = _parse_file(a.file)
    p = _program(progs, a.program, a.file)
    f = interpret(p, _bindings(a.bindings, a.theory))
    if a.output or a.json:
        _write(a.output, dumps(morph_to_json(f)), out)
    else:
        out.write(f"{f.dom.name} -> {f.cod.name} ({f.theory})\n{f.table()}\n")
    return EXIT_TRUE


def _load(path: str, reader):
    d = load_json(path)
    try:
        return reader(d)
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def _machine(path: str):
    return _load(path, machine_from_json)


def cmd_check_bisim(a, out) -> int:
    m1, m2 = _machine(a.a), _machine(a.b)
    res = bisimilar(m1, m2)
    r = Report("check-bisim")
    r.add("theory", str(m1.theory))
    r.add("bisimilar", res.verdict)
    r.add("blocks", len(res.partition))
    out.write(r.render(a.json))
    return EXIT_TRUE if res.verdict else EXIT_FALSE


def cmd_minimize(a, out) -> int:
    m = _machine(a.machine)
    q, _ = minimize(m)
    text = dumps(machine_to_json(q))
    if a.output:
        _write(a.output, text, out)
        r = Report("minimize")
        r.add("states", m.state.size)
        r.add("minimized_states", q.state.size)
        out.write(r.render(a.json))
    else:
        out.write(text)
    return EXIT_TRUE


def _horizon(a) -> int:
    if a.horizon < 0:
        raise InputError("--horizon must be nonnegative")
    return a.horizon


def cmd_trace(a, out) -> int:
    p = trace_process(_machine(a.machine), _horizon(a))
    text = dumps(process_to_json(p))
    if a.output:
        _write(a.output, text, out)
        r = Report("trace")
        r.add("horizon", p.horizon)
        r.add("components", len(p.components))
        out.write(r.render(a.json))
    else:
        out.write(text)
    return EXIT_TRUE


def cmd_trace_eq(a, out) -> int:
    h = _horizon(a)
    m1, m2 = _machine(a.a), _machine(a.b)
    eq = stream_equal_upto(trace_process(m1, h), trace_process(m2, h), h)
    r = Report("trace-eq")
    r.add("horizon", h)
    r.add("equal_up_to_horizon", eq)
    r.add("note", f"equal up to {h} only; no claim beyond the horizon")
    out.write(r.render(a.json))
    return EXIT_TRUE if eq else EXIT_FALSE


def cmd_check_causal(a, out) -> int:
    p = _load(a.process, process_from_json)
    ok = check_causal(p)
    r = Report("check-causal")
    r.add("horizon", p.horizon)
    r.add("causal", ok)
    out.write(r.render(a.json))
    return EXIT_TRUE if ok else EXIT_FALSE


def _morph(path: str):
    return _load(path, morph_from_json)


def cmd_check_conditional(a, out) -> int:
    f = _morph(a.morph)
    if a.split < 1 or a.split >= len(f.cod.factors):
        raise InputError(f"--split must be between 1 and {len(f.cod.factors) - 1}")
    left = tensor(*f.cod.factors[:a.split])
    s = conditional(f, left)
    ok = verify_conditional(f, s)
    r = Report("check-conditional")
    r.add("theory", str(f.theory))
    r.add("marginal", morph_to_json(s.marginal) if a.json else s.marginal.table())
    r.add("conditional", morph_to_json(s.conditional) if a.json else s.conditional.table())
    r.add("verified", ok)
    out.write(r.render(a.json) if a.json else _text_with_tables(r))
    return EXIT_TRUE if ok else EXIT_FALSE


def _text_with_tables(r: Report) -> str:
    lines = []
    for k, v in r.items:
        if isinstance(v, str) and "\n" in v or k in ("marginal", "conditional", "r", "i"):
            lines.append(f"{k}:")
            lines += ["  " + ln for ln in str(v).splitlines()]
        elif isinstance(v, bool):
            lines.append(f"{k}: {'true' if v else 'false'}")
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def cmd_check_range(a, out) -> int:
    m = _morph(a.morph)
    rg = range_of(m)
    ok = verify_range(m, rg)
    r = Report("check-range")
    r.add("theory", str(m.theory))
    r.add("range", [rg.obj.label(e) for e in rg.obj.elements])
    r.add("r", morph_to_json(rg.r) if a.json else rg.r.table())
    r.add("i", morph_to_json(rg.i) if a.json else rg.i.table())
    r.add("verified", ok)
    out.write(r.render(a.json) if a.json else _text_with_tables(r))
    return EXIT_TRUE if ok else EXIT_FALSE


def cmd_cipher_demo(a, out) -> int:
    h = _horizon(a)
    if a.ideal_key:
        cfg = cs.CipherConfig.ideal(a.char_bits, h)
    else:
        cfg = cs.CipherConfig.affine(a.char_bits, a.seed_size)
    rep = cs.verify_otp_identities(cfg)
    cmp_ = cs.cipher_vs_secure(cfg, h)
    r = Report("cipher-demo")
    r.add("config", cfg.name)
    r.add("char_bits", a.char_bits)
    r.add("seed_size", cfg.seed.size)
    r.add("horizon", h)
    for k, v in rep.checks.items():
        r.add(f"identity_{k}", v)
    r.add("head_residual", rep.head_residual)
    r.add("tv_per_step", cmp_.tv_per_step)
    r.add("prng_eps", cmp_.prng_eps)
    r.add("bound_violations", cmp_.bound_violations())
    if a.ideal_key:
        m = cs.build_cipher(cfg)
        eq = stream_equal_upto(trace_process(m["cipher"], h), trace_process(m["secure"], h), h)
        r.add("trace_equal_secure_up_to_horizon", eq)
    r.add("identities_pass", rep.passed)
    out.write(r.render(a.json))
    return EXIT_TRUE if rep.passed else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="effmealy",
                                 description="Effectful Mealy machines, traces and do-notation.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="structured output")
        return p

    p = verb("normalize", cmd_normalize, "print the interchange normal form of programs")
    p.add_argument("file")
    p.add_argument("--program")
    p.add_argument("-o", "--output")

    p = verb("check-eq", cmd_check_eq, "decide interchange equality of two programs")
    p.add_argument("file")
    p.add_argument("left")
    p.add_argument("right")

    p = verb("interpret", cmd_interpret, "interpret a program in a concrete theory")
    p.add_argument("file")
    p.add_argument("--program")
    p.add_argument("--bindings", required=True)
    p.add_argument("--theory", choices=[str(t) for t in Theory])
    p.add_argument("-o", "--output")

    p = verb("check-bisim", cmd_check_bisim, "decide bisimilarity of two machines")
    p.add_argument("a")
    p.add_argument("b")

    p = verb("minimize", cmd_minimize, "quotient a machine by bisimilarity")
    p.add_argument("machine")
    p.add_argument("-o", "--output")

    p = verb("trace", cmd_trace, "trace of a machine as a causal process")
    p.add_argument("machine")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("-o", "--output")

    p = verb("trace-eq", cmd_trace_eq, "compare traces of two machines up to a horizon")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--horizon", type=int, required=True)

    p = verb("check-causal", cmd_check_causal, "check that a process is causal")
    p.add_argument("process")

    p = verb("check-conditional", cmd_check_conditional, "split a morphism into marginal and conditional")
    p.add_argument("morph")
    p.add_argument("--split", type=int, default=1, help="number of codomain factors kept as the marginal")

    p = verb("check-range", cmd_check_range, "range of a morphism and its axioms")
    p.add_argument("morph")

    p = verb("cipher-demo", cmd_cipher_demo, "stream cipher versus secure channel")
    p.add_argument("--char-bits", type=int, default=1)
    p.add_argument("--seed-size", type=int, default=4)
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--ideal-key", action="store_true")
    return ap


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return a.fn(a, out)
    except EffMealyError as e:
        sys.stderr.write(f"error [{e.code}]: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
