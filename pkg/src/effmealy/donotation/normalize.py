"""Interchange normal form, equality and composition of programs."""

from __future__ import annotations

import hashlib
import itertools
from typing import Dict, List

from ..errors import SignatureMismatch, TypeMismatch
from .syntax import App, Program, Stmt, Term, Var, rename_program, substitute, term_vars
from .typecheck import typecheck


def _short(s: str) -> str:
    if len(s) <= 120:
        return s
    return "#" + hashlib.sha1(s.encode()).hexdigest()


def _structural_keys(p: Program) -> Dict[str, str]:
    """A name-independent description of every variable.

    Parameters are keyed by position, effect outputs by the position of the
    effect among effects, pure outputs by the generator and the keys of its
    arguments.
    """
    keys = {x: f"p{i}" for i, (x, _) in enumerate(p.params)}

    def tkey(t: Term) -> str:
        if isinstance(t, Var):
            return keys[t.name]
        return _short(f"{t.gen}({','.join(tkey(a) for a in t.args)})")

    n_eff = 0
    for s in p.stmts:
        if s.kind == "effect":
            base = f"e{n_eff}"
            n_eff += 1
        else:
            base = _short(f"{s.gen}({','.join(tkey(a) for a in s.args)})")
        for j, b in enumerate(s.binds):
            keys[b] = f"{base}.{j}"
    return keys


def _schedule(p: Program) -> List[int]:
    """Order of statement indices in the normal form."""
    stmts = p.stmts
    n = len(stmts)
    RET = n
    binder = {}
    for i, s in enumerate(stmts):
        for b in s.binds:
            binder[b] = i
    # occurrences: statement index -> list of (consumer, occurrence index)
    uses: Dict[int, list] = {i: [] for i in range(n)}
    consumers_args = [list(itertools.chain.from_iterable(term_vars(a) for a in s.args)) for s in stmts]
    consumers_args.append(list(itertools.chain.from_iterable(term_vars(t) for t in p.returns)))
    for c, vs in enumerate(consumers_args):
        for k, v in enumerate(vs):
            if v in binder:
                uses[binder[v]].append((c, k))

    keys = _structural_keys(p)

    def unused_key(i):
        s = stmts[i]
        return (s.gen, "(" + ",".join(_term_key(a, keys) for a in s.args) + ")")

    rpos = {RET: 0}
    placed_rev = [RET]

    def place(i):
        rpos[i] = len(placed_rev)
        placed_rev.append(i)

    pure = [i for i in range(n) if stmts[i].kind == "pure"]
    effects = [i for i in range(n) if stmts[i].kind == "effect"]
    unused = sorted((i for i in pure if not uses[i]), key=unused_key)
    for i in reversed(unused):
        place(i)
    pending = {i for i in pure if uses[i]}
    while pending or effects:
        best, best_key = None, None
        for i in pending:
            if all(c in rpos for c, _ in uses[i]):
                latest = max(rpos[c] for c, _ in uses[i])
                occ = min(k for c, k in uses[i] if rpos[c] == latest)
                key = (latest, -occ)
                if best_key is None or key < best_key:
                    best, best_key = i, key
        if best is not None:
            pending.discard(best)
            place(best)
        else:
            place(effects.pop())
    return [i for i in reversed(placed_rev) if i != RET]


def _term_key(t: Term, keys) -> str:
    if isinstance(t, Var):
        return keys[t.name]
    return f"{t.gen}({','.join(_term_key(a, keys) for a in t.args)})"


def normalize(p: Program) -> Program:
    """Canonical representative of the interchange class of ``p``.

    Effects keep their order, pure statements sit as late as their consumers
    allow, unused pure statements go last in a fixed order, and variables are
    renamed ``v0, v1, ...`` in binding order.
    """
    order = _schedule(p)
    stmts = tuple(p.stmts[i] for i in order)
    names = {}
    for x, _ in p.params:
        names[x] = f"v{len(names)}"
    for s in stmts:
        for b in s.binds:
            names[b] = f"v{len(names)}"
    q = Program(p.name, p.params, stmts, p.returns, p.ret_types, p.sig, p.pos)
    return rename_program(q, names)


def prog_equal(p: Program, q: Program) -> bool:
    """Equality in the free effectful category: same interchange normal form."""
    if p.param_types != q.param_types or p.ret_types != q.ret_types:
        raise SignatureMismatch(f"{p.name} and {q.name} have different types")
    if p.sig is not None and q.sig is not None and p.sig != q.sig:
        raise SignatureMismatch(f"{p.name} and {q.name} use different signatures")
    return normalize(p).same_body(normalize(q))


def _all_names(p: Program) -> set:
    names = {x for x, _ in p.params}
    for s in p.stmts:
        names.update(s.binds)
        for a in s.args:
            names.update(term_vars(a))
    return names


def prog_compose(p: Program, q: Program, name: str | None = None) -> Program:
    """Sequential composition: ``q`` runs on the returned terms of ``p``."""
    if p.ret_types != q.param_types:
        raise TypeMismatch(f"{p.name} returns {p.ret_types}, {q.name} expects {q.param_types}")
    taken = _all_names(p) | _all_names(q)
    fresh = {}
    counter = itertools.count()
    p_names = _all_names(p)
    for s in q.stmts:
        for b in s.binds:
            if b in p_names:
                while True:
                    cand = f"{b}_{next(counter)}"
                    if cand not in taken:
                        break
                taken.add(cand)
                fresh[b] = Var(cand)
    sub = dict(fresh)
    for (y, _), t in zip(q.params, p.returns):
        sub[y] = t
    stmts = list(p.stmts)
    for s in q.stmts:
        stmts.append(Stmt(s.kind, s.gen, tuple(substitute(a, sub) for a in s.args),
                          tuple(fresh[b].name if b in fresh else b for b in s.binds), s.pos))
    rets = tuple(substitute(t, sub) for t in q.returns)
    return Program(name or f"{p.name}_{q.name}", p.params, tuple(stmts), rets,
                   q.ret_types, p.sig or q.sig, p.pos)


def identity_program(types, sig=None, name: str = "id") -> Program:
    params = tuple((f"x{i}", t) for i, t in enumerate(types))
    return Program(name, params, (), tuple(Var(x) for x, _ in params), tuple(types), sig)


def can_swap(p: Program, i: int) -> bool:
    """Whether statements ``i`` and ``i+1`` may be interchanged."""
    if not 0 <= i < len(p.stmts) - 1:
        return False
    s, t = p.stmts[i], p.stmts[i + 1]
    if s.kind == "effect" and t.kind == "effect":
        return False
    used = set(itertools.chain.from_iterable(term_vars(a) for a in t.args))
    return not (set(s.binds) & used)


def swap_adjacent(p: Program, i: int) -> Program:
    if not can_swap(p, i):
        raise ValueError(f"statements {i} and {i + 1} of {p.name} do not interchange")
    stmts = list(p.stmts)
    stmts[i], stmts[i + 1] = stmts[i + 1], stmts[i]
    return Program(p.name, p.params, tuple(stmts), p.returns, p.ret_types, p.sig, p.pos)


def legal_swaps(p: Program) -> List[int]:
    return [i for i in range(len(p.stmts) - 1) if can_swap(p, i)]
