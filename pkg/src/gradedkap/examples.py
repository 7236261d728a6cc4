"""Built-in spec documents, in the same JSON shape the CLI reads."""

from __future__ import annotations

import copy
import json
from pathlib import Path


def _gens(*pairs):
    return [{"name": n, "degree": d} for n, d in pairs]


def _br(inputs, **out):
    return {"inputs": list(inputs), "output": {k: str(v) for k, v in out.items()}}


def _entry(upper, lower, *coeffs):
    return {"upper": upper, "lower": list(lower),
            "coeff": [{"monomial": list(m), "value": str(v)} for m, v in coeffs]}


_DOCS = {
    "abelian2": {
        "name": "abelian2",
        "generators": _gens(("e1", -1), ("e2", -1)),
        "brackets": [],
    },
    "nonabelian2": {
        "name": "nonabelian2",
        "generators": _gens(("e1", -1), ("e2", -1)),
        "brackets": [_br(("e1", "e2"), e2=1)],
    },
    # e2 sits in degree 0 so that non-trivial torsion-free connections exist
    "nonabelian2g": {
        "name": "nonabelian2g",
        "generators": _gens(("e1", -1), ("e2", 0)),
        "brackets": [_br(("e1", "e2"), e2=1)],
    },
    "heisenberg3": {
        "name": "heisenberg3",
        "generators": _gens(("x", -1), ("y", -1), ("z", -1)),
        "brackets": [_br(("x", "y"), z=1)],
    },
    "sl2": {
        "name": "sl2",
        "generators": _gens(("h", -1), ("e", -1), ("f", -1)),
        "brackets": [_br(("h", "e"), e=2), _br(("h", "f"), f=-2), _br(("e", "f"), h=1)],
        "truncation": {"weight": 6, "arity": 4},
    },
    "dgvs": {
        "name": "dgvs",
        "generators": _gens(("e1", -1), ("e2", 0)),
        "brackets": [_br(("e1",), e2=1)],
    },
    "cubic": {
        "name": "cubic",
        "generators": _gens(("e1", 0), ("e2", 1)),
        "brackets": [_br(("e1", "e1", "e1"), e2=1)],
    },
    "gl2": {
        "name": "gl2",
        "generators": _gens(("h", -1), ("e", -1), ("f", -1), ("z", -1)),
        "brackets": [_br(("h", "e"), e=2), _br(("h", "f"), f=-2), _br(("e", "f"), h=1)],
    },
    # nonabelian2g next to a one-step dg vector space
    "mixed4": {
        "name": "mixed4",
        "generators": _gens(("a", -1), ("b", 0), ("c", -1), ("u", 0)),
        "brackets": [_br(("a", "b"), b=1), _br(("c",), u=1)],
    },
    "jacobi_bad": {
        "name": "jacobi_bad",
        "generators": _gens(("e1", -1), ("e2", -1), ("e3", -1)),
        "brackets": [_br(("e1", "e2"), e3=1), _br(("e1", "e3"), e1=1)],
    },
}

_CONNECTIONS = {
    "nonabelian2g-flat": ("nonabelian2g", [_entry("e2", ("e2", "e2"), ((), 2))]),
    "nonabelian2g-curved": ("nonabelian2g", [
        _entry("e2", ("e2", "e2"), ((), 2)),
        _entry("e1", ("e1", "e2"), ((), 3)),
        _entry("e1", ("e2", "e1"), ((), 3)),
        _entry("e1", ("e2", "e2"), (("e1", "e2"), 5)),
    ]),
    "mixed4-christoffel": ("mixed4", [
        _entry("b", ("b", "b"), ((), 2)),
        _entry("a", ("a", "b"), ((), 3)),
        _entry("a", ("b", "a"), ((), 3)),
        _entry("u", ("u", "u"), (("u",), 1)),
    ]),
    "dgvs-christoffel": ("dgvs", [_entry("e2", ("e2", "e2"), (("e2",), 2))]),
    "cubic-christoffel": ("cubic", [_entry("e1", ("e1", "e1"), (("e1",), 1))]),
}


def names() -> list[str]:
    return sorted(_DOCS) + sorted(_CONNECTIONS)


def document(name: str) -> dict:
    """A fresh copy of a built-in document; connection variants carry Christoffel data."""
    if name in _DOCS:
        return copy.deepcopy(_DOCS[name])
    if name in _CONNECTIONS:
        base, entries = _CONNECTIONS[name]
        doc = copy.deepcopy(_DOCS[base])
        doc["name"] = name
        doc["connection"] = {"type": "christoffel", "entries": copy.deepcopy(entries)}
        return doc
    raise KeyError(name)


def write_all(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for n in names():
        p = directory / f"{n}.json"
        p.write_text(json.dumps(document(n), indent=2) + "\n", encoding="utf-8")
        out.append(p)
    return out
