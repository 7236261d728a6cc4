"""Fedosov operators on forms with values in the completed symmetric algebra of T^v.

A form with p form slots and q symmetric slots is a polynomial on an
extended chart with coordinates x^i, fibre coordinates y^i (same degrees,
dual to the frame d_i) and form generators t^i = dx^i of degree d_i + 1.
All signs use the total degree.  Operators of interest are vector fields
on this chart: the Koszul operator delta, the homotopy h, the covariant
derivative d^nabla and the vertical derivation A.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .coalgebra import SymTensorField
from .connections import Connection
from .core import InvalidInput, koszul_sign, sign
from .functions import Chart, FormalFunction, VectorField, add_into, fmul_terms, vf_apply, vf_commutator


class FedosovChart:
    def __init__(self, base: Chart):
        self.base = base
        d = base.dim
        self.dim = d
        degs = list(base.degrees) + list(base.degrees) + [x + 1 for x in base.degrees]
        names = list(base.names) + [f"y{n}" for n in base.names] + [f"t{n}" for n in base.names]
        self.ext = Chart(degs, names)

    def x(self, i):
        return i

    def y(self, i):
        return self.dim + i

    def t(self, i):
        return 2 * self.dim + i

    def bidegree(self, m: tuple) -> tuple[int, int]:
        """(form degree p, symmetric degree q) of an extended monomial."""
        d = self.dim
        p = sum(1 for a in m if a >= 2 * d)
        q = sum(1 for a in m if d <= a < 2 * d)
        return p, q

    def split(self, m: tuple):
        """Cut a canonical monomial into its x, y and t parts."""
        d = self.dim
        return (tuple(a for a in m if a < d), tuple(a - d for a in m if d <= a < 2 * d),
                tuple(a - 2 * d for a in m if a >= 2 * d))


_charts: dict = {}


def fedosov_chart(base: Chart) -> FedosovChart:
    key = base.key()
    fc = _charts.get(key)
    if fc is None:
        fc = _charts.setdefault(key, FedosovChart(base))
    return fc


def koszul_operator(fc: FedosovChart) -> VectorField:
    """delta(y^i) = (-1)^{d_i} t^i."""
    E = fc.ext
    terms = {}
    for i in range(fc.dim):
        terms[((fc.t(i),), (fc.y(i),))] = Fraction(sign(fc.base.degrees[i]))
    return VectorField(E, terms)


def _k_operator(fc: FedosovChart) -> VectorField:
    E = fc.ext
    terms = {}
    for i in range(fc.dim):
        terms[((fc.y(i),), (fc.t(i),))] = Fraction(sign(fc.base.degrees[i]))
    return VectorField(E, terms)


def _per_function(fc, F, op):
    """Apply op monomialwise to a function, or to each coefficient of a vertical field."""
    if isinstance(F, VectorField):
        comps = {j: op(f) for j, f in F.components().items()}
        return VectorField.from_components(fc.ext, comps)
    return op(F)


def koszul_delta(fc: FedosovChart, F):
    """delta on a scalar form, or coefficientwise on a T-valued form."""
    delta = koszul_operator(fc)
    return _per_function(fc, F, lambda f: vf_apply(delta, f))


def homotopy_h(fc: FedosovChart, F):
    """h = (1/(p+q)) sum (-1)^{d_i} y^i d/dt^i on the (p,q) component."""
    K = _k_operator(fc)

    def op(f):
        g = vf_apply(K, f)
        return FormalFunction(fc.ext, {m: c / sum(fc.bidegree(m)) for m, c in g.terms.items()})

    return _per_function(fc, F, op)


def pi0(fc: FedosovChart, F: FormalFunction) -> FormalFunction:
    return FormalFunction(fc.ext, {m: c for m, c in F.terms.items() if fc.bidegree(m) == (0, 0)})


def covariant_d(fc: FedosovChart, conn: Connection) -> VectorField:
    """d^nabla(x^i) = t^i, d^nabla(y^k) = sum t^i w^k_ij y^j, w = -(-1)^{d_k(1+d_j)} Gamma^k_ij."""
    E = fc.ext
    base = fc.base
    deg = base.degrees
    terms: dict = {}
    for i in range(fc.dim):
        terms[((fc.t(i),), (fc.x(i),))] = Fraction(1)
    for (k, i, j), g in conn.gamma.items():
        w = -sign(deg[k] * (1 + deg[j]))
        lift = {m: c for m, c in g.terms.items()}  # x indices coincide
        prod = fmul_terms(E, {(fc.t(i),): Fraction(1)}, lift)
        prod = fmul_terms(E, prod, {(fc.y(j),): Fraction(1)})
        for m, c in prod.items():
            add_into(terms, (m, (fc.y(k),)), w * c)
    return VectorField(E, terms)


def curvature_form(fc: FedosovChart, conn: Connection) -> VectorField:
    """R~ = (d^nabla)^2 as a vertical derivation."""
    D = covariant_d(fc, conn)
    return vf_commutator(D, D).scaled(Fraction(1, 2))


class FedosovA:
    """A = sum_{n>=2} A_n, A_n the part of symmetric degree n, up to a cap."""

    def __init__(self, fc: FedosovChart, parts: dict[int, VectorField], cap: int):
        self.fc = fc
        self.parts = parts
        self.cap = cap
        self._total = None

    def total(self) -> VectorField:
        if self._total is None:
            out = VectorField(self.fc.ext, {})
            for v in self.parts.values():
                out = out + v
            self._total = out
        return self._total

    def is_zero(self) -> bool:
        return all(not v for v in self.parts.values())


def a_nabla(conn: Connection, weight_cap: int) -> FedosovA:
    """A_2 = h R~, A_{n+1} = h([d^nabla, A_n] + 1/2 sum_{p+q=n+1} [A_p, A_q])."""
    memo = conn.__dict__.setdefault("_memo_anabla", {})
    if weight_cap in memo:
        return memo[weight_cap]
    fc = fedosov_chart(conn.chart)
    D = covariant_d(fc, conn)
    R = curvature_form(fc, conn)
    parts: dict[int, VectorField] = {}
    if weight_cap >= 2:
        parts[2] = homotopy_h(fc, R)
    for n in range(2, weight_cap):
        acc = vf_commutator(D, parts[n])
        for p in range(2, n):
            q = n + 1 - p
            if q < 2:
                continue
            acc = acc + vf_commutator(parts[p], parts[q]).scaled(Fraction(1, 2))
        parts[n + 1] = homotopy_h(fc, acc)
    memo[weight_cap] = A = FedosovA(fc, parts, weight_cap)
    return A


@lru_cache(maxsize=None)
def _pair_frames(L: tuple, M: tuple, degrees: tuple) -> int:
    """<y^L, d_M> = sum over matchings of the Koszul sign of interleaving."""
    p = len(L)
    if p != len(M):
        return 0
    total = 0
    degs = [degrees[l] for l in L] + [-degrees[m] for m in M]
    for perm in itertools.permutations(range(p)):
        if any(L[a] != M[perm[a]] for a in range(p)):
            continue
        order = []
        for a in range(p):
            order += [a, p + perm[a]]
        total += koszul_sign(order, degs)
    return total


def pair(fc: FedosovChart, sigma: FormalFunction, X: SymTensorField) -> FormalFunction:
    """<f y^L, g d_M> = (-1)^{|y^L||g|} f g <y^L, d_M> for sigma without form slots."""
    base = fc.base
    out: dict = {}
    for m, c in sigma.terms.items():
        xm, ym, tm = fc.split(m)
        if tm:
            raise InvalidInput("pairing needs a form of degree 0")
        py = base.mono_degree(ym)
        for (g, M), cg in X.terms.items():
            k = _pair_frames(ym, M, base.degrees)
            if not k:
                continue
            s = sign(py * base.mono_degree(g))
            for mm, v in fmul_terms(base, {xm: c}, {g: cg}).items():
                add_into(out, mm, s * k * v)
    return FormalFunction(base, out)


def contract(fc: FedosovChart, j: int, F: FormalFunction) -> FormalFunction:
    """i_{d_j}: left derivative in t^j."""
    return F.partial(fc.t(j))


def y_monomial(fc: FedosovChart, L: tuple) -> FormalFunction:
    return FormalFunction(fc.ext, {tuple(fc.y(l) for l in L): Fraction(1)})


def b_via_a(conn: Connection, Y: VectorField, T: SymTensorField, A: FedosovA | None = None) -> SymTensorField:
    """B(Y;X) = Y X - (i_Y A~)^T X, read off by pairing against y^L."""
    chart = conn.chart
    top = T.max_arity()
    if A is None:
        A = a_nabla(conn, max(top, 2))
    elif A.cap < top:
        raise InvalidInput(f"A is computed to symmetric degree {A.cap}, need {top}")
    fc = A.fc
    delta = koszul_operator(fc)
    At = A.total()
    out: dict = {}
    for (fm, (j,)), cy in Y.terms.items():
        for (gm, M), cx in T.terms.items():
            frame_out = _b_frames(fc, conn, delta, At, j, M)
            s = sign(chart.degrees[j] * chart.mono_degree(gm))
            coeff = fmul_terms(chart, {fm: cy}, {gm: cx})
            for (h, K), v in frame_out.items():
                for mm, cc in fmul_terms(chart, coeff, {h: v}).items():
                    add_into(out, (mm, K), s * cc)
    return SymTensorField(chart, out)


def _b_frames(fc, conn, delta, At, j, M):
    chart = conn.chart
    memo = conn.__dict__.setdefault("_memo_bva", {})
    key = (j, M, id(At))
    hit = memo.get(key)
    if hit is not None and hit[0] is At:
        return hit[1]
    X = SymTensorField(chart, {((), M): 1})
    n = len(M)
    res: dict = {}
    for size in range(0, n + 2):
        for L in chart.monomials(size, size):
            sig = y_monomial(fc, L)
            w = contract(fc, j, vf_apply(delta, sig) - vf_apply(At, sig))
            v = pair(fc, w, X)
            if not v:
                continue
            kappa = _pair_frames(L, L, chart.degrees)
            pl = chart.mono_degree(L)
            s0 = sign(pl * chart.degrees[j])
            for m, c in v.terms.items():
                s = s0 * sign(pl * chart.mono_degree(m))
                add_into(res, (m, L), s * c / kappa)
    memo[key] = (At, res)
    return res
