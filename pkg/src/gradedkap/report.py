"""JSON-ready encoding of engine objects; every scalar becomes a "p/q" string."""

from __future__ import annotations

from fractions import Fraction

from .coalgebra import BundleMap, SymTensorField
from .connections import OneTwoTensor
from .core import format_scalar
from .diffops import DiffOp
from .functions import FormalFunction, VectorField, format_mono


def _frames(chart, I) -> str:
    return "d(" + ",".join(chart.names[i] for i in I) + ")" if I else "1"


def _label(obj, key) -> str:
    chart = obj.chart
    if isinstance(obj, FormalFunction):
        return format_mono(chart, key)
    m, I = key
    if not m or not I:
        return _frames(chart, I) if m == () else format_mono(chart, m)
    return f"{format_mono(chart, m)}*{_frames(chart, I)}"


def encode(obj):
    """Deterministic nested structure of dicts, lists, strings, ints and bools."""
    from .linfty import CECochain

    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return format_scalar(obj)
    if isinstance(obj, (FormalFunction, VectorField, SymTensorField, DiffOp)):
        return {_label(obj, k): format_scalar(c) for k, c in sorted(obj.terms.items())}
    if isinstance(obj, OneTwoTensor):
        ch = obj.chart
        return {f"{ch.names[i]},{ch.names[j]}": encode(v)
                for (i, j), v in sorted(obj.values.items()) if v}
    if isinstance(obj, BundleMap):
        ch = obj.chart
        return {_frames(ch, I): encode(v) for I, v in sorted(obj.values.items()) if v}
    if isinstance(obj, CECochain):
        spec = obj.module.spec
        out = {}
        for (J, b), c in sorted(obj.values.items()):
            word = "*".join(spec.names[i] for i in J) or "1"
            vec = "(x)".join(_module_name(spec, obj.module, b))
            out[f"{word} -> {vec}"] = format_scalar(c)
        return out
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    return repr(obj)


def _module_name(spec, module, b):
    if module.tag == "trivial":
        return ["1"]
    parts = module.basis[b]
    if module.tag == "adjoint":
        return [spec.names[parts[0]]]
    if module.tag == "coadjoint":
        return [spec.names[parts[0]] + "^v"]
    a, bb, c = parts
    return [spec.names[a] + "^v", spec.names[bb] + "^v", spec.names[c]]
