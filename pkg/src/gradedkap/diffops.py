"""Differential operators in normal order (functions left of partials)."""

from __future__ import annotations

from typing import Mapping

from .coalgebra import SymTensorField, shuffle_split
from .core import InvalidInput, canonicalize, merge, sign
from .functions import (
    Chart,
    FormalFunction,
    VectorField,
    _Linear,
    _check_chart,
    add_into,
    fmul_terms,
    format_mono,
)


class DiffOp(_Linear):
    """Sum of f * d_I (f applied after d_I), stored as {(monomial, I): c}."""

    __slots__ = ()

    @classmethod
    def identity(cls, chart: Chart) -> "DiffOp":
        return cls(chart, {((), ()): 1})

    @classmethod
    def partial(cls, chart: Chart, word) -> "DiffOp":
        r = canonicalize(tuple(word), chart.degrees)
        if r is None:
            return cls(chart, {})
        I, s = r
        return cls(chart, {((), I): s})

    @classmethod
    def from_function(cls, f: FormalFunction) -> "DiffOp":
        return cls(f.chart, {(m, ()): c for m, c in f.terms.items()})

    @classmethod
    def from_vector_field(cls, X: VectorField) -> "DiffOp":
        return cls(X.chart, dict(X.terms))

    @classmethod
    def from_tensor(cls, T: SymTensorField) -> "DiffOp":
        """Naive embedding f d_I -> f d_I (not the PBW map)."""
        return cls(T.chart, dict(T.terms))

    def term_degree(self, key) -> int:
        m, I = key
        return self.chart.mono_degree(m) - self.chart.mono_degree(I)

    def order(self) -> int:
        return max((len(I) for _, I in self.terms), default=-1)

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return do_compose(self, other)
        return self.scaled(other)

    def __call__(self, f: FormalFunction) -> FormalFunction:
        return do_apply(self, f)

    def __repr__(self):
        if not self.terms:
            return "DiffOp(0)"
        parts = []
        for (m, I), c in sorted(self.terms.items()):
            fr = "*".join("d" + self.chart.names[i] for i in I) or "1"
            parts.append(f"({c})*{format_mono(self.chart, m)}*{fr}")
        return "DiffOp(" + " + ".join(parts) + ")"


def multi_deriv(chart: Chart, I: tuple, fterms: Mapping) -> dict:
    """d_{i1}(d_{i2}(...d_{ik}(f)))."""
    cur = dict(fterms)
    for j in reversed(I):
        nxt: dict = {}
        for m, c in cur.items():
            for s, rest in chart.deriv(j, m):
                add_into(nxt, rest, s * c)
        cur = nxt
        if not cur:
            break
    return cur


def compose_terms(chart: Chart, a: Mapping, b: Mapping) -> dict:
    odd = chart.odd
    out: dict = {}
    for (f, I), ca in a.items():
        splits = shuffle_split(I, odd)
        for (g, J), cb in b.items():
            pg = chart.mono_parity(g)
            for I1, I2, e in splits:
                dg = multi_deriv(chart, I1, {g: cb})
                if not dg:
                    continue
                r = merge(I2, J, odd)
                if r is None:
                    continue
                s, K = r
                if pg and chart.mono_parity(I2):
                    s = -s
                for m, c in fmul_terms(chart, {f: ca}, dg).items():
                    add_into(out, (m, K), e * s * c)
    return out


def do_compose(D1: DiffOp, D2: DiffOp) -> DiffOp:
    _check_chart(D1.chart, D2.chart)
    return DiffOp(D1.chart, compose_terms(D1.chart, D1.terms, D2.terms))


def do_apply(D: DiffOp, f: FormalFunction) -> FormalFunction:
    _check_chart(D.chart, f.chart)
    chart = D.chart
    out: dict = {}
    for (g, I), c in D.terms.items():
        d = multi_deriv(chart, I, f.terms)
        if d:
            for m, v in fmul_terms(chart, {g: c}, d).items():
                add_into(out, m, v)
    return FormalFunction(chart, out)


def _as_diffop(X) -> DiffOp:
    if isinstance(X, DiffOp):
        return X
    if isinstance(X, VectorField):
        return DiffOp.from_vector_field(X)
    if isinstance(X, FormalFunction):
        return DiffOp.from_function(X)
    raise InvalidInput(f"cannot treat {type(X).__name__} as a differential operator")


def do_lie_derivative(Q, D: DiffOp) -> DiffOp:
    """[[Q,D]] = Q o D - (-1)^{|D|} D o Q on homogeneous parts of D."""
    Qd = _as_diffop(Q)
    chart = D.chart
    _check_chart(Qd.chart, chart)
    out: dict = {}
    for d, Dp in D.homogeneous_parts().items():
        for k, v in compose_terms(chart, Qd.terms, Dp.terms).items():
            add_into(out, k, v)
        s = sign(d)
        for k, v in compose_terms(chart, Dp.terms, Qd.terms).items():
            add_into(out, k, -s * v)
    return DiffOp(chart, out)


def do_coproduct_eval(D: DiffOp, f: FormalFunction, g: FormalFunction) -> FormalFunction:
    """D(fg), the literal evaluation of the coproduct on f (x) g."""
    return do_apply(D, f * g)


def do_coproduct_expand(D: DiffOp, f: FormalFunction, g: FormalFunction) -> FormalFunction:
    """sum +- D_(1)(f) D_(2)(g) from the shuffle coproduct of each d_I."""
    chart = D.chart
    _check_chart(chart, f.chart)
    out: dict = {}
    for (h, I), c in D.terms.items():
        for I1, I2, e in shuffle_split(I, chart.odd):
            for fm, fc in f.terms.items():
                d1 = multi_deriv(chart, I1, {fm: fc})
                if not d1:
                    continue
                s = e * sign(chart.mono_degree(I2) * chart.mono_degree(fm))
                d2 = multi_deriv(chart, I2, g.terms)
                if not d2:
                    continue
                prod = fmul_terms(chart, fmul_terms(chart, {h: c}, d1), d2)
                for m, v in prod.items():
                    add_into(out, m, s * v)
    return FormalFunction(chart, out)


def symbol(D: DiffOp, n: int) -> SymTensorField:
    """Order-n block of D read as an arity-n tensor field."""
    return SymTensorField(D.chart, {k: c for k, c in D.terms.items() if len(k[1]) == n})
