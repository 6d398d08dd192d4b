"""Derivability check for programs against a signature."""

from __future__ import annotations

from typing import Dict, Optional

from ..errors import (ArityMismatch, RebindError, TypeMismatch, UnboundVariable,
                      UnknownGenerator)
from .syntax import App, Program, Signature, Stmt, Term, Var


def _where(pos) -> str:
    return f" (line {pos[0]}, column {pos[1]})" if pos else ""


def term_type(t: Term, env: Dict[str, str], sig: Signature, pos=None) -> str:
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(f"variable {t.name!r} is not bound{_where(pos)}")
        return env[t.name]
    if t.gen not in sig.values:
        raise UnknownGenerator(f"{t.gen!r} is not a value generator{_where(pos)}")
    ins, out = sig.values[t.gen]
    if len(ins) != len(t.args):
        raise ArityMismatch(f"{t.gen} expects {len(ins)} arguments, got {len(t.args)}{_where(pos)}")
    for a, want in zip(t.args, ins):
        got = term_type(a, env, sig, pos)
        if got != want:
            raise TypeMismatch(f"argument {a} of {t.gen} has type {got}, expected {want}{_where(pos)}")
    return out


def _stmt(s: Stmt, env: Dict[str, str], sig: Signature):
    kind = sig.kind(s.gen)
    if kind is None:
        raise UnknownGenerator(f"unknown generator {s.gen!r}{_where(s.pos)}")
    if kind != s.kind:
        raise TypeMismatch(f"{s.gen} is a {kind} generator, used as {s.kind}{_where(s.pos)}")
    ins, outs = sig.gen_type(s.gen)
    if len(ins) != len(s.args):
        raise ArityMismatch(f"{s.gen} expects {len(ins)} arguments, got {len(s.args)}{_where(s.pos)}")
    if len(outs) != len(s.binds):
        raise ArityMismatch(f"{s.gen} has {len(outs)} outputs, {len(s.binds)} variables bound{_where(s.pos)}")
    for a, want in zip(s.args, ins):
        got = term_type(a, env, sig, s.pos)
        if got != want:
            raise TypeMismatch(f"argument {a} of {s.gen} has type {got}, expected {want}{_where(s.pos)}")
    for b, t in zip(s.binds, outs):
        if b in env:
            raise RebindError(f"variable {b!r} bound twice{_where(s.pos)}")
        env[b] = t


def typecheck(p: Program, sig: Optional[Signature] = None) -> Dict[str, str]:
    """Return the typing context of every variable, or raise on the first error."""
    sig = sig or p.sig or Signature()
    env: Dict[str, str] = {}
    for x, t in p.params:
        if t not in sig.types:
            raise TypeMismatch(f"unknown type {t!r} for parameter {x!r}{_where(p.pos)}")
        if x in env:
            raise RebindError(f"parameter {x!r} declared twice{_where(p.pos)}")
        env[x] = t
    for s in p.stmts:
        _stmt(s, env, sig)
    if len(p.returns) != len(p.ret_types):
        raise ArityMismatch(f"{p.name} returns {len(p.returns)} terms, declared {len(p.ret_types)}{_where(p.pos)}")
    for t in p.ret_types:
        if t not in sig.types:
            raise TypeMismatch(f"unknown return type {t!r}{_where(p.pos)}")
    for r, want in zip(p.returns, p.ret_types):
        got = term_type(r, env, sig, p.pos)
        if got != want:
            raise TypeMismatch(f"returned term {r} has type {got}, expected {want}{_where(p.pos)}")
    return env
