"""Exact finite Kleisli morphisms for Det, Par, Rel, Stoch and ParStoch."""

from .objects import UNIT, ObjectType, atom, join, split, split_product, tensor
from .morph import (ONE, Classification, Morph, Theory, accumulate, classify, compose, copy,
                    discard, identity, is_deterministic, is_pure,
                    is_quasi_total, is_total, is_value, post, pullback,
                    pushforward, row_mass, structural, swap, tensor_morph,
                    then, weight, wiring, wiring_fn, with_identity, wmul)
from .conditionals import (Range, Split, conditional, conditional_given,
                           marginal, range_of, triangle, verify_conditional,
                           verify_range)

__all__ = [
    "UNIT", "ObjectType", "atom", "join", "split", "split_product", "tensor",
    "ONE", "accumulate", "weight", "wmul", "Classification", "Morph", "Theory", "classify", "compose", "copy",
    "discard", "identity", "is_deterministic", "is_pure", "is_quasi_total",
    "is_total", "is_value", "post", "pullback", "pushforward", "row_mass",
    "structural", "swap", "tensor_morph", "then", "wiring", "wiring_fn",
    "with_identity", "Range", "Split", "conditional", "conditional_given",
    "marginal", "range_of", "triangle", "verify_conditional", "verify_range",
]
