"""Interpretation of programs as Kleisli morphisms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from ..errors import MissingInterpretation, PurityViolation, ShapeMismatch
from ..kernel import (UNIT, Morph, ObjectType, Theory, identity, is_pure, is_value,
                      join, post, split, tensor)
from .syntax import App, Program, Term, Var, term_vars
from .typecheck import typecheck

GLOBAL = "#global"


@dataclass
class Interpretation:
    """Objects for types and morphisms for generators in one theory.

    With ``global_state`` set, effect generators are interpreted as
    morphisms ``G * inputs -> G * outputs`` and the interpreted program
    threads ``G`` through every effect.
    """
    theory: Theory
    objects: Dict[str, ObjectType]
    gens: Dict[str, Morph]
    global_state: Optional[ObjectType] = None
    _checked: set = field(default_factory=set, repr=False)

    def obj(self, t: str) -> ObjectType:
        try:
            return self.objects[t]
        except KeyError:
            raise MissingInterpretation(f"no object for type {t!r}") from None

    def gen(self, name: str, kind: str, ins, outs) -> Morph:
        if name not in self.gens:
            raise MissingInterpretation(f"no morphism for generator {name!r}")
        f = self.gens[name]
        if (name, kind) in self._checked:
            return f
        g = [self.global_state] if kind == "effect" and self.global_state is not None else []
        dom = tensor(*g, *(self.obj(t) for t in ins))
        cod = tensor(*g, *(self.obj(t) for t in outs))
        if f.theory is not Theory.parse(self.theory):
            raise ShapeMismatch(f"{name} is interpreted in {f.theory}, not {self.theory}")
        if f.dom != dom or f.cod != cod:
            raise ShapeMismatch(f"{name} must be {dom.name} -> {cod.name}, got {f.dom.name} -> {f.cod.name}")
        if kind == "value" and not is_value(f):
            raise PurityViolation(f"value generator {name} is not deterministic and total")
        if kind == "pure" and not is_pure(f):
            raise PurityViolation(f"pure generator {name} violates the pure fragment of {f.theory}")
        self._checked.add((name, kind))
        return f


def _value_fn(f: Morph):
    def fn(x):
        (y,) = f.row(x)
        return y
    return fn


def interpret(p: Program, itp: Interpretation) -> Morph:
    """The morphism denoted by ``p``: parameters -> returned terms."""
    sig = p.sig
    env = typecheck(p, sig)
    theory = Theory.parse(itp.theory)
    gstate = itp.global_state
    types = dict(env)
    if gstate is not None:
        types[GLOBAL] = None

    def obj_of(v):
        return gstate if v == GLOBAL else itp.obj(types[v])

    values = {}

    def evaluate(t: Term, val: dict):
        if isinstance(t, Var):
            return val[t.name]
        fn = values.get(t.gen)
        if fn is None:
            ins, out = sig.values[t.gen]
            f = itp.gen(t.gen, "value", ins, (out,))
            fn = values[t.gen] = (_value_fn(f), [itp.obj(s) for s in ins])
        func, objs = fn
        return func(join(objs, [evaluate(a, val) for a in t.args]))

    live = ([GLOBAL] if gstate is not None else []) + [x for x, _ in p.params]
    dom = tensor(*(obj_of(v) for v in live))
    cur = identity(dom, theory)

    # variables still needed after each statement
    need_after = []
    later = set(v for t in p.returns for v in term_vars(t))
    for s in reversed(p.stmts):
        need_after.append(set(later))
        for a in s.args:
            later.update(term_vars(a))
    need_after.reverse()

    for s, needed in zip(p.stmts, need_after):
        ins, outs = sig.gen_type(s.gen)
        g = itp.gen(s.gen, s.kind, ins, outs)
        threads = s.kind == "effect" and gstate is not None
        in_objs = [obj_of(v) for v in live]
        kept = [v for v in live if (v == GLOBAL and not threads) or v in needed]
        if threads:
            new_live = [GLOBAL] + kept + list(s.binds)
        else:
            new_live = kept + list(s.binds)
        arg_objs = ([gstate] if threads else []) + [itp.obj(t) for t in ins]
        out_objs = ([gstate] if threads else []) + [itp.obj(t) for t in outs]
        new_objs = [obj_of(v) if v == GLOBAL else itp.obj(types[v]) for v in new_live]
        new_cod = tensor(*new_objs)
        n_out = len(out_objs)

        def rowfn(e, live=live, in_objs=in_objs, kept=kept, s=s, g=g, threads=threads,
                  arg_objs=arg_objs, out_objs=out_objs, new_objs=new_objs, n_out=n_out):
            val = dict(zip(live, split(in_objs, e)))
            args = ([val[GLOBAL]] if threads else []) + [evaluate(a, val) for a in s.args]
            rest = [val[v] for v in kept]
            out = {}
            for y, w in g.row(join(arg_objs, args)).items():
                ys = split(out_objs, y)
                if threads:
                    parts = [ys[0]] + rest + ys[1:]
                else:
                    parts = rest + ys
                out[join(new_objs, parts)] = w
            return out

        cur = post(cur, new_cod, rowfn)
        live = new_live

    in_objs = [obj_of(v) for v in live]
    head = [GLOBAL] if gstate is not None else []
    ret_objs = [gstate] * len(head) + [itp.obj(t) for t in p.ret_types]
    cod = tensor(*ret_objs)

    def retfn(e):
        val = dict(zip(live, split(in_objs, e)))
        parts = [val[g] for g in head] + [evaluate(t, val) for t in p.returns]
        return {join(ret_objs, parts): 1}

    out = post(cur, cod, retfn)
    out._validate()
    return out
