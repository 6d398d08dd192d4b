"""Do-notation: parsing, typing, interchange normal form and interpretation."""

from .syntax import App, Program, Signature, Stmt, Var
from .parser import parse, parse_program, tokenize
from .typecheck import typecheck
from .normalize import (can_swap, identity_program, legal_swaps, normalize,
                        prog_compose, prog_equal, swap_adjacent)
from .interpret import Interpretation, interpret

__all__ = [
    "App", "Program", "Signature", "Stmt", "Var", "parse", "parse_program",
    "tokenize", "typecheck", "can_swap", "identity_program", "legal_swaps",
    "normalize", "prog_compose", "prog_equal", "swap_adjacent",
    "Interpretation", "interpret",
]
