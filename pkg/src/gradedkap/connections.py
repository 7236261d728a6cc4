"""Affine connections by Christoffel data, and the tensors built from them."""

from __future__ import annotations

import itertools
from typing import Mapping

from .coalgebra import BundleMap, SymTensorField, extend_derivation
from .core import InvalidInput, sign
from .functions import (
    Chart,
    FormalFunction,
    VectorField,
    _check_chart,
    add_into,
    apply_vf_terms,
    fmul_terms,
    vf_commutator,
)


class Connection:
    """nabla_{d_i} d_j = sum_k Gamma^k_ij d_k, with Gamma^k_ij of degree d_k - d_i - d_j."""

    def __init__(self, chart: Chart, christoffel: Mapping[tuple, FormalFunction] | None = None,
                 name: str = ""):
        self.chart = chart
        self.name = name
        gamma = {}
        for (k, i, j), f in (christoffel or {}).items():
            for idx in (k, i, j):
                if not 0 <= idx < chart.dim:
                    raise InvalidInput(f"Christoffel index {idx} out of range")
            if not f:
                continue
            _check_chart(chart, f.chart)
            want = chart.degrees[k] - chart.degrees[i] - chart.degrees[j]
            if f.degrees() != {want}:
                raise InvalidInput(
                    f"Christoffel symbol ({k},{i},{j}) must have degree {want}, got {sorted(f.degrees())}")
            gamma[(k, i, j)] = f
        self.gamma = gamma
        self._frame: dict = {}

    @classmethod
    def trivial(cls, chart: Chart) -> "Connection":
        return cls(chart, {}, "trivial")

    def is_trivial(self) -> bool:
        return not self.gamma

    def frame_value(self, i: int, j: int) -> VectorField:
        """nabla_{d_i} d_j."""
        key = (i, j)
        v = self._frame.get(key)
        if v is None:
            terms = {}
            for k in range(self.chart.dim):
                f = self.gamma.get((k, i, j))
                if f is not None:
                    for m, c in f.terms.items():
                        terms[(m, (k,))] = c
            v = VectorField(self.chart, terms)
            self._frame[key] = v
        return v

    def is_torsion_free(self) -> bool:
        return torsion(self).is_zero()

    def difference(self, other: "Connection") -> "OneTwoTensor":
        _check_chart(self.chart, other.chart)
        n = self.chart.dim
        vals = {}
        for i in range(n):
            for j in range(n):
                vals[(i, j)] = self.frame_value(i, j) - other.frame_value(i, j)
        return OneTwoTensor(self.chart, 0, vals)

    def __repr__(self):
        return f"Connection({self.name or 'christoffel'}, {len(self.gamma)} symbols)"


def nabla_terms(conn: Connection, xterms: Mapping, yterms: Mapping) -> dict:
    chart = conn.chart
    out: dict = {}
    for (f, (i,)), cf in xterms.items():
        for (g, (j,)), cg in yterms.items():
            # d_i(g) d_j
            for m, c in fmul_terms(chart, {f: cf}, {r: s * cg for s, r in chart.deriv(i, g)}).items():
                add_into(out, (m, (j,)), c)
            fv = conn.frame_value(i, j)
            if not fv:
                continue
            s = sign(chart.degrees[i] * chart.mono_degree(g))
            fg = fmul_terms(chart, {f: cf}, {g: cg})
            for (h, kk), ch in fv.terms.items():
                for m, c in fmul_terms(chart, fg, {h: ch}).items():
                    add_into(out, (m, kk), s * c)
    return out


def nabla(conn: Connection, X: VectorField, Y: VectorField) -> VectorField:
    _check_chart(conn.chart, X.chart)
    _check_chart(conn.chart, Y.chart)
    return VectorField(conn.chart, nabla_terms(conn, X.terms, Y.terms))


def nabla_tensor(conn: Connection, X: VectorField, T: SymTensorField) -> SymTensorField:
    """nabla_X extended to tensor fields as a derivation of degree |X|."""
    chart = conn.chart
    out: dict = {}
    for d, Xp in X.homogeneous_parts().items():
        part = extend_derivation(
            chart, d,
            lambda ft: apply_vf_terms(chart, Xp.terms, ft),
            lambda i: nabla_terms(conn, Xp.terms, {((), (i,)): 1}),
            T.terms)
        for k, v in part.items():
            add_into(out, k, v)
    return SymTensorField(chart, out)


class OneTwoTensor:
    """Bilinear bundle map F: T x T -> T of degree k, by frame values F(d_i, d_j).

    F(f d_i, g d_j) = (-1)^{k|f| + |g|(k + |d_i|)} f g F(d_i, d_j).
    """

    def __init__(self, chart: Chart, degree: int, values: Mapping[tuple, VectorField]):
        self.chart = chart
        self.degree = degree
        vals = {}
        for (i, j), v in values.items():
            if v:
                want = degree - chart.degrees[i] - chart.degrees[j]
                if v.degrees() != {want}:
                    raise InvalidInput(f"tensor value at ({i},{j}) has degree {sorted(v.degrees())}, expected {want}")
                vals[(i, j)] = v
        self.values = vals

    def frame_value(self, i: int, j: int) -> VectorField:
        return self.values.get((i, j)) or VectorField(self.chart, {})

    def __call__(self, X: VectorField, Y: VectorField) -> VectorField:
        chart = self.chart
        k = self.degree
        out: dict = {}
        for (f, (i,)), cf in X.terms.items():
            for (g, (j,)), cg in Y.terms.items():
                v = self.values.get((i, j))
                if v is None:
                    continue
                s = sign(k * chart.mono_degree(f) + chart.mono_degree(g) * (k - chart.degrees[i]))
                fg = fmul_terms(chart, {f: cf}, {g: cg})
                for (h, kk), ch in v.terms.items():
                    for m, c in fmul_terms(chart, fg, {h: ch}).items():
                        add_into(out, (m, kk), s * c)
        return VectorField(chart, out)

    def is_zero(self) -> bool:
        return not self.values

    def is_symmetric(self) -> bool:
        d = self.chart.degrees
        n = self.chart.dim
        return all(self.frame_value(i, j) == self.frame_value(j, i).scaled(sign(d[i] * d[j]))
                   for i in range(n) for j in range(n))

    def __sub__(self, other: "OneTwoTensor") -> "OneTwoTensor":
        keys = set(self.values) | set(other.values)
        return OneTwoTensor(self.chart, self.degree,
                            {key: self.frame_value(*key) - other.frame_value(*key) for key in keys})

    def __eq__(self, other):
        if not isinstance(other, OneTwoTensor):
            return NotImplemented
        return self.values == other.values

    def __hash__(self):
        return hash(frozenset(self.values.items()))

    def as_bundle_map(self) -> BundleMap:
        """Symmetric F read on S^2(T): F(d_i d_j) for i <= j."""
        n = self.chart.dim
        vals = {}
        for i in range(n):
            for j in range(i, n):
                if i == j and self.chart.odd[i]:
                    continue
                vals[(i, j)] = self.frame_value(i, j)
        return BundleMap(self.chart, 2, self.degree, vals)


AtiyahCocycle = OneTwoTensor


def torsion(conn: Connection) -> OneTwoTensor:
    d = conn.chart.degrees
    n = conn.chart.dim
    vals = {}
    for i in range(n):
        for j in range(n):
            vals[(i, j)] = conn.frame_value(i, j) - conn.frame_value(j, i).scaled(sign(d[i] * d[j]))
    return OneTwoTensor(conn.chart, 0, vals)


def curvature(conn: Connection) -> dict[tuple, VectorField]:
    """R(d_i, d_j) d_k = nabla_i nabla_j d_k - (-1)^{d_i d_j} nabla_j nabla_i d_k."""
    chart = conn.chart
    n = chart.dim
    out = {}
    for i, j, k in itertools.product(range(n), repeat=3):
        fi = VectorField.frame(chart, i)
        fj = VectorField.frame(chart, j)
        a = nabla(conn, fi, conn.frame_value(j, k))
        b = nabla(conn, fj, conn.frame_value(i, k))
        v = a - b.scaled(sign(chart.degrees[i] * chart.degrees[j]))
        if v:
            out[(i, j, k)] = v
    return out


def is_flat(conn: Connection) -> bool:
    return not curvature(conn)


def atiyah_cocycle(Q: VectorField, conn: Connection) -> OneTwoTensor:
    """At(X,Y) = [Q, nabla_X Y] - nabla_{[Q,X]} Y - (-1)^{|X|} nabla_X [Q,Y] on frames."""
    chart = conn.chart
    _check_chart(chart, Q.chart)
    if not conn.is_torsion_free():
        raise InvalidInput("the Atiyah cocycle needs a torsion-free connection")
    n = chart.dim
    qf = [vf_commutator(Q, VectorField.frame(chart, i)) for i in range(n)]
    vals = {}
    for i in range(n):
        fi = VectorField.frame(chart, i)
        for j in range(n):
            fj = VectorField.frame(chart, j)
            v = (vf_commutator(Q, conn.frame_value(i, j))
                 - nabla(conn, qf[i], fj)
                 - nabla(conn, fi, qf[j]).scaled(sign(chart.degrees[i])))
            vals[(i, j)] = v
    return OneTwoTensor(chart, 1, vals)


def cQ_apply(Q: VectorField, F: OneTwoTensor) -> OneTwoTensor:
    """(QF)(X,Y) = [Q,F(X,Y)] - (-1)^k F([Q,X],Y) - (-1)^{k+|X|} F(X,[Q,Y])."""
    chart = F.chart
    n = chart.dim
    k = F.degree
    qf = [vf_commutator(Q, VectorField.frame(chart, i)) for i in range(n)]
    vals = {}
    for i in range(n):
        fi = VectorField.frame(chart, i)
        for j in range(n):
            fj = VectorField.frame(chart, j)
            v = (vf_commutator(Q, F.frame_value(i, j))
                 - F(qf[i], fj).scaled(sign(k))
                 - F(fi, qf[j]).scaled(sign(k - chart.degrees[i])))
            vals[(i, j)] = v
    return OneTwoTensor(chart, k + 1, vals)


def cQ_direct(Q: VectorField, F: OneTwoTensor, X: VectorField, Y: VectorField) -> VectorField:
    """The defining formula of QF on arbitrary homogeneous X, Y (used to test tensoriality)."""
    k = F.degree
    return (vf_commutator(Q, F(X, Y))
            - F(vf_commutator(Q, X), Y).scaled(sign(k))
            - F(X, vf_commutator(Q, Y)).scaled(sign(k + X.degree())))


def atiyah_direct(Q: VectorField, conn: Connection, X: VectorField, Y: VectorField) -> VectorField:
    """The defining formula of At on arbitrary homogeneous X, Y."""
    return (vf_commutator(Q, nabla(conn, X, Y))
            - nabla(conn, vf_commutator(Q, X), Y)
            - nabla(conn, X, vf_commutator(Q, Y)).scaled(sign(X.degree())))


def sym_cov_derivative(conn: Connection, R: BundleMap, frames=None) -> BundleMap:
    """(d~R)(X) = sum_k eps_k ((-1)^{m|X_k|} nabla_{X_k} R(X^{k}) - R(nabla_{X_k} X^{k})).

    m is the degree of R; for m = 1 the sign is (-1)^{|X_k|}.
    """
    chart = conn.chart
    n = R.arity + 1
    m = R.degree
    if frames is None:
        frames = chart.monomials(n, n) if n else [()]
    vals = {}
    for I in frames:
        acc = VectorField(chart, {})
        for k in range(n):
            ik = I[k]
            eps = sign(chart.degrees[ik] * chart.mono_degree(I[:k]))
            rest = SymTensorField(chart, {((), I[:k] + I[k + 1:]): 1})
            Xk = VectorField.frame(chart, ik)
            term = nabla(conn, Xk, R.apply(rest)).scaled(sign(m * chart.degrees[ik]))
            term = term - R.apply(nabla_tensor(conn, Xk, rest))
            acc = acc + term.scaled(eps)
        if acc:
            vals[tuple(I)] = acc
    return BundleMap(chart, n, m, vals)
