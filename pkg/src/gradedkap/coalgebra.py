"""Symmetric tensor fields with the shuffle coproduct, Lie derivative and convolution."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Mapping

from .core import InvalidInput, canonicalize, merge, sign
from .functions import (
    Chart,
    FormalFunction,
    VectorField,
    _Linear,
    _check_chart,
    add_into,
    apply_vf_terms,
    fmul_terms,
    format_mono,
    vf_commutator,
)


class SymTensorField(_Linear):
    """Sum of f * d_{i1}...d_{ik} stored as {(monomial, frame tuple): c}."""

    __slots__ = ()

    @classmethod
    def one(cls, chart: Chart) -> "SymTensorField":
        return cls(chart, {((), ()): 1})

    @classmethod
    def frame(cls, chart: Chart, word) -> "SymTensorField":
        r = canonicalize(tuple(word), chart.degrees)
        if r is None:
            return cls(chart, {})
        I, s = r
        return cls(chart, {((), I): s})

    @classmethod
    def from_function(cls, f: FormalFunction) -> "SymTensorField":
        return cls(f.chart, {(m, ()): c for m, c in f.terms.items()})

    @classmethod
    def from_vector_field(cls, X: VectorField) -> "SymTensorField":
        return cls(X.chart, dict(X.terms))

    def term_degree(self, key) -> int:
        m, I = key
        return self.chart.mono_degree(m) - self.chart.mono_degree(I)

    def arity(self, k: int) -> "SymTensorField":
        return SymTensorField(self.chart, {key: c for key, c in self.terms.items() if len(key[1]) == k})

    def arities(self) -> list[int]:
        return sorted({len(I) for _, I in self.terms})

    def max_arity(self) -> int:
        return max((len(I) for _, I in self.terms), default=-1)

    def to_vector_field(self) -> VectorField:
        if any(len(I) != 1 for _, I in self.terms):
            raise InvalidInput("not an arity-1 tensor field")
        return VectorField(self.chart, dict(self.terms))

    def to_function(self) -> FormalFunction:
        if any(I for _, I in self.terms):
            raise InvalidInput("not an arity-0 tensor field")
        return FormalFunction(self.chart, {m: c for (m, _), c in self.terms.items()})

    def times_function(self, f: FormalFunction) -> "SymTensorField":
        return SymTensorField(self.chart, _left_mul(self.chart, f.terms, self.terms))

    def __mul__(self, other):
        if isinstance(other, SymTensorField):
            return st_product(self, other)
        return self.scaled(other)

    def __repr__(self):
        if not self.terms:
            return "SymTensorField(0)"
        parts = []
        for (m, I), c in sorted(self.terms.items()):
            fr = "*".join("d" + self.chart.names[i] for i in I) or "1"
            parts.append(f"({c})*{format_mono(self.chart, m)}*{fr}")
        return "SymTensorField(" + " + ".join(parts) + ")"


def _left_mul(chart: Chart, fterms: Mapping, tterms: Mapping) -> dict:
    out: dict = {}
    for (m, I), c in tterms.items():
        for mm, cc in fmul_terms(chart, fterms, {m: c}).items():
            add_into(out, (mm, I), cc)
    return out


def st_product_terms(chart: Chart, a: Mapping, b: Mapping) -> dict:
    """(f d_I)(g d_J) = (-1)^{|d_I||g|} f g d_I d_J."""
    odd = chart.odd
    out: dict = {}
    for (fa, Ia), ca in a.items():
        pI = chart.mono_parity(Ia)
        for (fb, Ib), cb in b.items():
            r = merge(Ia, Ib, odd)
            if r is None:
                continue
            s, I = r
            if pI and chart.mono_parity(fb):
                s = -s
            for m, c in fmul_terms(chart, {fa: ca}, {fb: cb}).items():
                add_into(out, (m, I), s * c)
    return out


def st_product(S: SymTensorField, T: SymTensorField) -> SymTensorField:
    _check_chart(S.chart, T.chart)
    return SymTensorField(S.chart, st_product_terms(S.chart, S.terms, T.terms))


@lru_cache(maxsize=None)
def shuffle_split(I: tuple, odd: tuple) -> tuple:
    """Coproduct of a frame monomial: ((I1, I2, coefficient), ...)."""
    n = len(I)
    acc: dict = {}
    for mask in range(1 << n):
        left = [p for p in range(n) if mask >> p & 1]
        right = [p for p in range(n) if not mask >> p & 1]
        e = 0
        for a in right:
            if odd[I[a]]:
                e += sum(1 for b in left if b > a and odd[I[b]])
        key = (tuple(I[p] for p in left), tuple(I[p] for p in right))
        acc[key] = acc.get(key, 0) + sign(e)
    return tuple((I1, I2, c) for (I1, I2), c in sorted(acc.items()) if c)


class TensorPairSum(_Linear):
    """Element of S(T) (x)_R S(T) with coefficients on the left: {(f, I1, I2): c}."""

    __slots__ = ()

    def term_degree(self, key) -> int:
        m, I1, I2 = key
        md = self.chart.mono_degree
        return md(m) - md(I1) - md(I2)

    def __repr__(self):
        return f"TensorPairSum({sorted(self.terms.items())})"


def st_comultiply(T: SymTensorField) -> TensorPairSum:
    out: dict = {}
    for (m, I), c in T.terms.items():
        for I1, I2, s in shuffle_split(I, T.chart.odd):
            add_into(out, (m, I1, I2), s * c)
    return TensorPairSum(T.chart, out)


def counit(T: SymTensorField) -> FormalFunction:
    return FormalFunction(T.chart, {m: c for (m, I), c in T.terms.items() if not I})


def extend_derivation(chart: Chart, degree: int, on_function, on_frame, terms: Mapping) -> dict:
    """Extend a degree-`degree` derivation of the tensor algebra from its values.

    on_function(fterms) -> function terms; on_frame(i) -> arity-1 tensor terms.
    """
    out: dict = {}
    frames: dict = {}
    for (m, I), c in terms.items():
        for mm, cc in on_function({m: c}).items():
            add_into(out, (mm, I), cc)
        e0 = degree * chart.mono_degree(m)
        for pos, i in enumerate(I):
            if pos > 0 and I[pos - 1] == i:
                # repeated even frame, counted through mult
                continue
            mult = I.count(i)
            if i not in frames:
                frames[i] = on_frame(i)
            if not frames[i]:
                continue
            before = I[:pos]
            after = I[pos + 1:]
            s = sign(e0 + degree * chart.mono_degree(before)) * mult
            prod = st_product_terms(chart, {(m, before): c}, frames[i])
            prod = st_product_terms(chart, prod, {((), after): 1})
            for key, v in prod.items():
                add_into(out, key, s * v)
    return out


def st_lie_derivative(Q: VectorField, T: SymTensorField) -> SymTensorField:
    """L_Q: Q on functions, [Q,-] on frames, extended as a derivation of degree |Q|."""
    _check_chart(Q.chart, T.chart)
    chart = T.chart
    out: dict = {}
    for dq, Qp in Q.homogeneous_parts().items():
        part = extend_derivation(
            chart, dq,
            lambda ft: apply_vf_terms(chart, Qp.terms, ft),
            lambda i: vf_commutator(Qp, VectorField.frame(chart, i)).terms,
            T.terms)
        for k, v in part.items():
            add_into(out, k, v)
    return SymTensorField(chart, out)


class BundleMap:
    """R-linear map S^k(T) -> T of degree m, given by its values on frames."""

    def __init__(self, chart: Chart, arity: int, degree: int, values: Mapping[tuple, VectorField]):
        self.chart = chart
        self.arity = arity
        self.degree = degree
        vals = {}
        for I, v in values.items():
            I = tuple(I)
            if len(I) != arity or list(I) != sorted(I):
                raise InvalidInput(f"bundle map key {I} must be an ascending tuple of length {arity}")
            if v:
                if v.degrees() != {degree - chart.mono_degree(I)}:
                    raise InvalidInput("bundle map value has wrong degree")
                vals[I] = v
        self.values = vals

    def frame_value(self, I: tuple) -> VectorField:
        return self.values.get(I) or VectorField(self.chart, {})

    def apply(self, T: SymTensorField) -> VectorField:
        """F on the arity-k part: F(f d_I) = (-1)^{m|f|} f F(d_I)."""
        out: dict = {}
        chart = self.chart
        for (m, I), c in T.terms.items():
            if len(I) != self.arity:
                continue
            v = self.values.get(I)
            if v is None:
                continue
            s = sign(self.degree * chart.mono_degree(m))
            for (vm, j), vc in v.terms.items():
                for mm, cc in fmul_terms(chart, {m: c}, {vm: vc}).items():
                    add_into(out, (mm, j), s * cc)
        return VectorField(chart, out)

    def is_zero(self) -> bool:
        return not self.values

    def __eq__(self, other):
        if not isinstance(other, BundleMap):
            return NotImplemented
        return self.arity == other.arity and self.values == other.values

    def __hash__(self):
        return hash((self.arity, frozenset(self.values.items())))

    @classmethod
    def from_callable(cls, chart: Chart, arity: int, degree: int,
                      fn: Callable[[SymTensorField], VectorField], frames) -> "BundleMap":
        """Sample fn on frames and spot-check R-linearity on coordinate multiples."""
        values = {}
        for I in frames:
            values[tuple(I)] = fn(SymTensorField.frame(chart, I))
        F = cls(chart, arity, degree, values)
        for I in list(values)[:4]:
            for a in range(chart.dim):
                T = SymTensorField(chart, {((a,), tuple(I)): 1})
                if fn(T) != F.apply(T):
                    raise InvalidInput("map is not R-linear")
        return F


def convolution(F: Mapping[int, BundleMap], T: SymTensorField) -> SymTensorField:
    """Coderivation extension sum_k (F_k bar * id)(T)."""
    chart = T.chart
    out: dict = {}
    for k, Fk in F.items():
        if Fk.is_zero():
            continue
        for (m, I), c in T.terms.items():
            if len(I) < k:
                continue
            s0 = sign(Fk.degree * chart.mono_degree(m))
            for I1, I2, e in shuffle_split(I, chart.odd):
                if len(I1) != k:
                    continue
                v = Fk.values.get(I1)
                if v is None:
                    continue
                prod = st_product_terms(chart, v.terms, {((), I2): 1})
                for (vm, J), vc in prod.items():
                    for mm, cc in fmul_terms(chart, {m: c}, {vm: vc}).items():
                        add_into(out, (mm, J), s0 * e * cc)
    return SymTensorField(chart, out)
