"""The transported differential delta, the Kapranov tower R_k and the brackets lambda_k."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .coalgebra import BundleMap, SymTensorField, convolution, shuffle_split, st_lie_derivative, st_product
from .connections import Connection, atiyah_cocycle, nabla_tensor, sym_cov_derivative
from .core import InternalInconsistency, InvalidInput
from .diffops import DiffOp, compose_terms, do_lie_derivative
from .functions import VectorField, vf_commutator
from .pbw import pbw, pbw_inverse, pbw_terms


def delta_nabla(Q: VectorField, conn: Connection, T: SymTensorField) -> SymTensorField:
    """delta(T) = pbw^{-1} [[Q, pbw T]]."""
    return pbw_inverse(conn, do_lie_derivative(Q, pbw(conn, T)))


class RTower:
    """R_k for 2 <= k <= K as bundle maps of degree +1."""

    def __init__(self, Q: VectorField, conn: Connection, maps: Mapping[int, BundleMap]):
        self.Q = Q
        self.conn = conn
        self.chart = conn.chart
        self.maps = dict(sorted(maps.items()))

    @property
    def max_arity(self) -> int:
        return max(self.maps, default=1)

    def __getitem__(self, k: int) -> BundleMap:
        if k not in self.maps:
            raise InvalidInput(f"R_{k} not computed (tower goes to arity {self.max_arity})")
        return self.maps[k]

    def delta(self, T: SymTensorField) -> SymTensorField:
        """L_Q + sum_k (R_k bar * id)."""
        return st_lie_derivative(self.Q, T) + convolution(self.maps, T)

    def __eq__(self, other):
        if not isinstance(other, RTower):
            return NotImplemented
        keys = set(self.maps) | set(other.maps)
        return all(self.maps.get(k) is not None and other.maps.get(k) is not None
                   and self.maps[k].values == other.maps[k].values for k in keys)

    def __hash__(self):
        return hash(tuple(sorted(self.maps)))


def _frames(chart, k):
    return chart.monomials(k, k)


def extract_R(Q: VectorField, conn: Connection, K: int) -> RTower:
    """R_k = arity-1 part of (delta - L_Q) on arity-k frames."""
    chart = conn.chart
    for k in (0, 1):
        for I in _frames(chart, k):
            T = SymTensorField(chart, {((), I): 1})
            diff = delta_nabla(Q, conn, T) - st_lie_derivative(Q, T)
            if diff:
                raise InternalInconsistency(f"R_{k} is nonzero on {I}", diff, 0)
    maps = {}
    for k in range(2, K + 1):
        vals = {}
        for I in _frames(chart, k):
            T = SymTensorField(chart, {((), I): 1})
            diff = delta_nabla(Q, conn, T) - st_lie_derivative(Q, T)
            v = diff.arity(1)
            if v:
                vals[I] = v.to_vector_field()
        maps[k] = BundleMap(chart, k, 1, vals)
    return RTower(Q, conn, maps)


def lambda_bracket(tower: RTower, Q: VectorField, *X: VectorField) -> VectorField:
    """lambda_1 = [Q,-]; lambda_k = R_k(X_1 ... X_k) for k >= 2."""
    if not X:
        raise InvalidInput("lambda needs at least one argument")
    if len(X) == 1:
        return vf_commutator(Q, X[0])
    T = SymTensorField.from_vector_field(X[0])
    for Y in X[1:]:
        T = st_product(T, SymTensorField.from_vector_field(Y))
    return tower[len(X)].apply(T)


def b_nabla(conn: Connection, Y: VectorField, T: SymTensorField) -> SymTensorField:
    """B(Y; T) = pbw^{-1}(Y pbw(T)) - nabla_Y T."""
    chart = conn.chart
    D = DiffOp(chart, compose_terms(chart, Y.terms, pbw_terms(conn, T.terms)))
    return pbw_inverse(conn, D) - nabla_tensor(conn, Y, T)


def r_recursion(Q: VectorField, conn: Connection, K: int,
                b: Callable[[VectorField, SymTensorField], SymTensorField] | None = None) -> RTower:
    """R_2 = -At, then R_n from lower terms, the symmetrized covariant derivative and B."""
    chart = conn.chart
    if b is None:
        b = lambda Y, T: b_nabla(conn, Y, T)
    at = atiyah_cocycle(Q, conn)
    R2 = at.as_bundle_map()
    R2 = BundleMap(chart, 2, 1, {I: -v for I, v in R2.values.items()})
    maps = {2: R2}
    dR: dict[int, BundleMap] = {}
    for n in range(3, K + 1):
        for k in range(2, n):
            if k not in dR:
                dR[k] = sym_cov_derivative(conn, maps[k])
        vals = {}
        for I in _frames(chart, n):
            T = SymTensorField(chart, {((), I): 1})
            acc = convolution({2: R2}, T).scaled(Fraction(2, n))
            for k in range(2, n):
                part = convolution({k + 1: dR[k]}, T) + convolution({k: maps[k]}, T).scaled(1 - k)
                for I1, I2, e in shuffle_split(I, chart.odd):
                    if len(I1) != k:
                        continue
                    Y = maps[k].frame_value(I1)
                    if Y:
                        part = part - b(Y, SymTensorField(chart, {((), I2): 1})).scaled(e)
                acc = acc + part.scaled(Fraction(1, n))
            stray = acc - acc.arity(1)
            if stray:
                raise InternalInconsistency(f"R_{n} recursion leaves higher-arity terms on {I}", stray, 0)
            if acc:
                vals[I] = acc.to_vector_field()
        maps[n] = BundleMap(chart, n, 1, vals)
    return RTower(Q, conn, maps)


def check_linfty(Q: VectorField, conn: Connection, arity_cap: int, weight_cap: int,
                 tower: RTower | None = None) -> dict:
    """delta o delta = 0 on f d_I with arity(I) <= arity_cap, weight(f) <= weight_cap."""
    chart = conn.chart
    if tower is None:
        delta = lambda T: delta_nabla(Q, conn, T)
    else:
        delta = tower.delta
    checked = 0
    for n in range(arity_cap + 1):
        for I in _frames(chart, n):
            for m in chart.monomials(weight_cap):
                T = SymTensorField(chart, {(m, I): 1})
                dd = delta(delta(T))
                checked += 1
                if dd:
                    return {"ok": False, "checked": checked, "witness": (m, I, dd)}
    return {"ok": True, "checked": checked, "witness": None}


def connection_compare(Q: VectorField, conn: Connection, conn2: Connection, arity_cap: int,
                       weight_cap: int = 1) -> dict:
    """phi = pbw'^{-1} o pbw: check phi delta = delta' phi and phi_1 = id."""
    chart = conn.chart
    if not (conn.is_torsion_free() and conn2.is_torsion_free()):
        raise InvalidInput("connection_compare needs torsion-free connections")
    phi = lambda T: pbw_inverse(conn2, pbw(conn, T))
    components: dict[int, BundleMap] = {}
    for k in range(1, arity_cap + 1):
        vals = {}
        for I in _frames(chart, k):
            v = phi(SymTensorField(chart, {((), I): 1})).arity(1)
            if v:
                vals[I] = v.to_vector_field()
        components[k] = BundleMap(chart, k, 0, vals)
    phi1_id = all(components[1].frame_value((i,)) == VectorField.frame(chart, i) for i in range(chart.dim))
    checked = 0
    for n in range(arity_cap + 1):
        for I in _frames(chart, n):
            for m in chart.monomials(weight_cap):
                T = SymTensorField(chart, {(m, I): 1})
                left = phi(delta_nabla(Q, conn, T))
                right = delta_nabla(Q, conn2, phi(T))
                checked += 1
                if left != right:
                    raise InternalInconsistency(f"phi does not intertwine on {m},{I}", left, right)
    return {"intertwines": True, "phi1_identity": phi1_id, "checked": checked, "components": components}
