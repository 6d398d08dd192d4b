"""JSON file formats for objects, morphisms, machines and causal processes.

Weights are written as exact ``"p/q"`` strings.  Rows of Rel morphisms are
lists of labels and rows of Det/Par morphisms a single label or ``null``.
Product elements are written with their tuple label ``"(a,b)"``.
"""

from __future__ import annotations

import json
import re
from typing import Any

from gmpy2 import mpq

from .errors import InputError
from .kernel import UNIT, Morph, ObjectType, Theory, split_product, tensor
from .mealy import MealyMachine
from .streams import CausalProcess

_RATIONAL = re.compile(r"^\d+(/\d+)?$")


def rational_str(w) -> str:
    q = mpq(int(w.numerator), int(w.denominator))
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(s) -> mpq:
    if isinstance(s, int) and not isinstance(s, bool):
        return mpq(s)
    if not isinstance(s, str) or not _RATIONAL.match(s.strip()):
        raise InputError(f"weight {s!r} is not an exact rational 'p/q'")
    q = mpq(s.strip())
    return q


def object_to_json(obj: ObjectType) -> dict:
    if obj.is_atomic:
        return {"name": obj.name, "elements": list(obj.elements)}
    return {"name": obj.name, "factors": [object_to_json(f) for f in obj.factors]}


def object_from_json(d: Any) -> ObjectType:
    if not isinstance(d, dict) or "name" not in d:
        raise InputError("an object needs a name and either elements or factors")
    if "factors" in d:
        return tensor(*(object_from_json(f) for f in d["factors"]))
    elems = d.get("elements")
    if not isinstance(elems, list):
        raise InputError(f"object {d['name']!r} has no element list")
    return ObjectType(str(d["name"]), [str(e) for e in elems])


def morph_to_json(f: Morph) -> dict:
    t = f.theory
    rows = {}
    for x in f.dom.elements:
        row = f.row(x)
        ordered = sorted(row, key=f.cod.index)
        if t in (Theory.DET, Theory.PAR):
            rows[f.dom.label(x)] = f.cod.label(ordered[0]) if ordered else None
        elif t is Theory.REL:
            rows[f.dom.label(x)] = [f.cod.label(y) for y in ordered]
        else:
            rows[f.dom.label(x)] = {f.cod.label(y): rational_str(row[y]) for y in ordered}
    return {"theory": str(t), "dom": object_to_json(f.dom), "cod": object_to_json(f.cod), "rows": rows}


def morph_from_json(d: Any) -> Morph:
    if not isinstance(d, dict):
        raise InputError("a morphism must be a JSON object")
    try:
        t = Theory.parse(d["theory"])
        dom, cod = object_from_json(d["dom"]), object_from_json(d["cod"])
        raw = d["rows"]
    except KeyError as e:
        raise InputError(f"morphism is missing the field {e.args[0]!r}") from None
    if not isinstance(raw, dict):
        raise InputError("morphism rows must be an object keyed by domain labels")
    rows = {}
    for xl, r in raw.items():
        x = dom.parse_label(xl)
        if r is None:
            rows[x] = {}
        elif isinstance(r, str):
            rows[x] = {cod.parse_label(r): 1}
        elif isinstance(r, list):
            rows[x] = {cod.parse_label(y): 1 for y in r}
        elif isinstance(r, dict):
            rows[x] = {cod.parse_label(y): parse_rational(w) if t.probabilistic else 1
                       for y, w in r.items()}
        else:
            raise InputError(f"row {xl!r} has an unreadable shape")
    return Morph(t, dom, cod, rows)


def machine_to_json(m: MealyMachine) -> dict:
    return {
        "theory": str(m.theory),
        "states": [m.state.label(u) for u in m.state.elements],
        "input": [m.inp.label(x) for x in m.inp.elements],
        "output": [m.out.label(y) for y in m.out.elements],
        "init": morph_to_json(m.init),
        "trans": morph_to_json(m.trans),
    }


def _rest(obj: ObjectType, left: ObjectType) -> ObjectType:
    if left.is_unit:
        return obj
    if obj == left:
        return UNIT
    return split_product(obj, left)[1]


def machine_from_json(d: Any) -> MealyMachine:
    if not isinstance(d, dict):
        raise InputError("a machine must be a JSON object")
    try:
        init, trans = morph_from_json(d["init"]), morph_from_json(d["trans"])
    except KeyError as e:
        raise InputError(f"machine is missing the field {e.args[0]!r}") from None
    state = init.cod
    inp = _rest(trans.dom, state)
    out = _rest(trans.cod, state)
    if "theory" in d and Theory.parse(d["theory"]) is not trans.theory:
        raise InputError("declared theory differs from the transition's theory")
    for key, obj in (("states", state), ("input", inp), ("output", out)):
        if key in d and list(d[key]) != [obj.label(e) for e in obj.elements]:
            raise InputError(f"declared {key} do not match the morphisms")
    return MealyMachine(state, inp, out, init, trans)


def process_to_json(p: CausalProcess) -> dict:
    return {
        "theory": str(p.theory),
        "inputs": [object_to_json(o) for o in p.inputs],
        "outputs": [object_to_json(o) for o in p.outputs],
        "components": [morph_to_json(f) for f in p.components],
    }


def process_from_json(d: Any) -> CausalProcess:
    if not isinstance(d, dict):
        raise InputError("a causal process must be a JSON object")
    try:
        ins = [object_from_json(o) for o in d["inputs"]]
        outs = [object_from_json(o) for o in d["outputs"]]
        comps = [morph_from_json(f) for f in d["components"]]
    except KeyError as e:
        raise InputError(f"process is missing the field {e.args[0]!r}") from None
    return CausalProcess(ins, outs, comps)


def dumps(d: Any) -> str:
    return json.dumps(d, indent=1, sort_keys=False) + "\n"


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno}: {e.msg}") from None
