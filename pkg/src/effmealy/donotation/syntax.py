"""Abstract syntax of do-notation programs and their printed form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    """Application of a value generator; values are always inlined as terms."""
    gen: str
    args: Tuple["Term", ...]

    def __str__(self) -> str:
        return f"{self.gen}({', '.join(map(str, self.args))})"


Term = Union[Var, App]


@dataclass(frozen=True)
class Stmt:
    kind: str            # "pure" or "effect"
    gen: str
    args: Tuple[Term, ...]
    binds: Tuple[str, ...]
    pos: Optional[Tuple[int, int]] = field(default=None, compare=False)

    @property
    def arrow(self) -> str:
        return "->" if self.kind == "pure" else "~>"

    def __str__(self) -> str:
        outs = ", ".join(self.binds) if self.binds else "()"
        return f"{self.gen}({', '.join(map(str, self.args))}) {self.arrow} {outs}"


@dataclass(frozen=True)
class Signature:
    types: Tuple[str, ...] = ()
    values: Dict[str, Tuple[Tuple[str, ...], str]] = field(default_factory=dict)
    pures: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = field(default_factory=dict)
    effects: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = field(default_factory=dict)

    def kind(self, name: str) -> Optional[str]:
        if name in self.values:
            return "value"
        if name in self.pures:
            return "pure"
        if name in self.effects:
            return "effect"
        return None

    def gen_type(self, name: str):
        """``(inputs, outputs)`` with outputs always a tuple."""
        if name in self.values:
            ins, out = self.values[name]
            return ins, (out,)
        if name in self.pures:
            return self.pures[name]
        return self.effects[name]

    def __str__(self) -> str:
        lines = ["sig {"]
        for t in self.types:
            lines.append(f"  type {t};")
        for kw, table in (("value", self.values), ("pure", self.pures), ("effect", self.effects)):
            for name, (ins, outs) in table.items():
                outs = (outs,) if isinstance(outs, str) else outs
                lines.append(f"  {kw} {name}: {', '.join(ins)} -> {', '.join(outs) if outs else '()'};")
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Program:
    name: str
    params: Tuple[Tuple[str, str], ...]
    stmts: Tuple[Stmt, ...]
    returns: Tuple[Term, ...]
    ret_types: Tuple[str, ...]
    sig: Optional[Signature] = field(default=None, compare=False, repr=False)
    pos: Optional[Tuple[int, int]] = field(default=None, compare=False)

    @property
    def param_types(self) -> Tuple[str, ...]:
        return tuple(t for _, t in self.params)

    def same_body(self, other: "Program") -> bool:
        """Syntactic equality ignoring the program name."""
        return (self.params == other.params and self.stmts == other.stmts
                and self.returns == other.returns and self.ret_types == other.ret_types)

    def __str__(self) -> str:
        params = ", ".join(f"{x}: {t}" for x, t in self.params)
        lines = [f"prog {self.name}({params}) -> ({', '.join(self.ret_types)}):"]
        lines += [f"  {s}" for s in self.stmts]
        lines.append(f"  return({', '.join(map(str, self.returns))})")
        return "\n".join(lines)


def term_vars(t: Term):
    """Variables of a term in left-to-right occurrence order."""
    if isinstance(t, Var):
        yield t.name
    else:
        for a in t.args:
            yield from term_vars(a)


def substitute(t: Term, sub: dict) -> Term:
    if isinstance(t, Var):
        return sub.get(t.name, t)
    return App(t.gen, tuple(substitute(a, sub) for a in t.args))


def rename_program(p: Program, sub: dict, name: str | None = None) -> Program:
    """Rename variables (params and binders) by the mapping ``sub`` of names."""
    vs = {k: Var(v) for k, v in sub.items()}
    return Program(
        name or p.name,
        tuple((sub.get(x, x), t) for x, t in p.params),
        tuple(Stmt(s.kind, s.gen, tuple(substitute(a, vs) for a in s.args),
                   tuple(sub.get(b, b) for b in s.binds), s.pos) for s in p.stmts),
        tuple(substitute(t, vs) for t in p.returns),
        p.ret_types, p.sig, p.pos)
