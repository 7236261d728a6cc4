"""The PBW map of a connection, its inverse, and the defect map C."""

from __future__ import annotations

from fractions import Fraction

from .coalgebra import SymTensorField, shuffle_split, st_lie_derivative, st_product_terms
from .connections import Connection, atiyah_cocycle, nabla_tensor
from .core import sign
from .diffops import DiffOp, compose_terms, do_apply, do_lie_derivative
from .functions import FormalFunction, VectorField, add_into, fmul_terms


def _memo(conn: Connection, name: str) -> dict:
    table = conn.__dict__.get("_memo_" + name)
    if table is None:
        table = conn.__dict__.setdefault("_memo_" + name, {})
    return table


def _left_mul_op(chart, m, c, terms) -> dict:
    out: dict = {}
    for (g, J), v in terms.items():
        for mm, cc in fmul_terms(chart, {m: c}, {g: v}).items():
            add_into(out, (mm, J), cc)
    return out


def pbw_frame(conn: Connection, I: tuple) -> dict:
    """pbw(d_I) as DiffOp terms, by the averaged recursion."""
    memo = _memo(conn, "pbw")
    hit = memo.get(I)
    if hit is not None:
        return hit
    chart = conn.chart
    n = len(I)
    if n <= 1:
        out = {((), I): Fraction(1)}
    else:
        out = {}
        for k in range(n):
            ik = I[k]
            eps = sign(chart.degrees[ik] * chart.mono_degree(I[:k]))
            rest = I[:k] + I[k + 1:]
            for key, v in compose_terms(chart, {((), (ik,)): 1}, pbw_frame(conn, rest)).items():
                add_into(out, key, eps * v)
            nab = nabla_tensor(conn, VectorField.frame(chart, ik), SymTensorField(chart, {((), rest): 1}))
            for key, v in pbw_terms(conn, nab.terms).items():
                add_into(out, key, -eps * v)
        out = {key: v / n for key, v in out.items()}
    memo[I] = out
    return out


def pbw_terms(conn: Connection, terms) -> dict:
    chart = conn.chart
    out: dict = {}
    for (m, I), c in terms.items():
        for key, v in _left_mul_op(chart, m, c, pbw_frame(conn, I)).items():
            add_into(out, key, v)
    return out


def pbw(conn: Connection, T: SymTensorField) -> DiffOp:
    """R-linear extension pbw(f d_I) = f pbw(d_I)."""
    return DiffOp(conn.chart, pbw_terms(conn, T.terms))


def pbw_inverse(conn: Connection, D: DiffOp) -> SymTensorField:
    """Invert pbw by peeling principal symbols from the top order down."""
    chart = conn.chart
    out: dict = {}
    rest = dict(D.terms)
    while rest:
        n = max(len(I) for _, I in rest)
        top = {key: c for key, c in rest.items() if len(key[1]) == n}
        for key, c in top.items():
            add_into(out, key, c)
        for key, c in pbw_terms(conn, top).items():
            add_into(rest, key, -c)
    return SymTensorField(chart, out)


def c_nabla(Q: VectorField, conn: Connection, T: SymTensorField) -> DiffOp:
    """C(T) = [[Q, pbw T]] - pbw(L_Q T)."""
    return do_lie_derivative(Q, pbw(conn, T)) - pbw(conn, st_lie_derivative(Q, T))


def _c_rlinear(conn: Connection, frame_fn, terms) -> dict:
    """Extend a degree +1 map from frames: C(f d_I) = (-1)^{|f|} f C(d_I)."""
    chart = conn.chart
    out: dict = {}
    for (m, I), c in terms.items():
        s = sign(chart.mono_degree(m))
        for key, v in _left_mul_op(chart, m, s * c, frame_fn(I)).items():
            add_into(out, key, v)
    return out


def c_frame_recursive(Q: VectorField, conn: Connection, I: tuple, at=None) -> dict:
    memo = _memo(conn, "crec")
    mkey = (id(Q), I)
    hit = memo.get(mkey)
    if hit is not None and hit[0] is Q:
        return hit[1]
    chart = conn.chart
    n = len(I)
    if at is None:
        at = _cached_atiyah(Q, conn)
    out: dict = {}
    if n == 2:
        for (m, j), c in at.frame_value(I[0], I[1]).terms.items():
            out[(m, j)] = -c
    elif n >= 3:
        d = chart.degrees
        inner = lambda J: c_frame_recursive(Q, conn, J, at)
        for k in range(n):
            ik = I[k]
            eps = sign(d[ik] * chart.mono_degree(I[:k]))
            rest = I[:k] + I[k + 1:]
            s = eps * sign(d[ik])
            for key, v in compose_terms(chart, {((), (ik,)): 1}, inner(rest)).items():
                add_into(out, key, s * v)
            nab = nabla_tensor(conn, VectorField.frame(chart, ik), SymTensorField(chart, {((), rest): 1}))
            for key, v in _c_rlinear(conn, inner, nab.terms).items():
                add_into(out, key, -eps * v)
        out = {key: v / n for key, v in out.items()}
        for i in range(n):
            for j in range(i + 1, n):
                ei = sign(d[I[i]] * chart.mono_degree(I[:i]))
                ej = sign(d[I[j]] * chart.mono_degree(I[:j]))
                s = ei * ej * sign(d[I[i]] * d[I[j]])
                rest = tuple(I[p] for p in range(n) if p not in (i, j))
                prod = st_product_terms(chart, at.frame_value(I[i], I[j]).terms, {((), rest): 1})
                for key, v in pbw_terms(conn, prod).items():
                    add_into(out, key, Fraction(-2, n) * s * v)
    memo[mkey] = (Q, out)
    return out


def _cached_atiyah(Q, conn):
    memo = _memo(conn, "at")
    hit = memo.get(id(Q))
    if hit is not None and hit[0] is Q:
        return hit[1]
    at = atiyah_cocycle(Q, conn)
    memo[id(Q)] = (Q, at)
    return at


def c_nabla_recursive(Q: VectorField, conn: Connection, T: SymTensorField) -> DiffOp:
    """C from the base cases and the recursion in the arity."""
    return DiffOp(conn.chart, _c_rlinear(conn, lambda I: c_frame_recursive(Q, conn, I), T.terms))


def pbw_coproduct_expand(conn: Connection, T: SymTensorField, f: FormalFunction, g: FormalFunction) -> FormalFunction:
    """sum +- pbw(T_(1))(f) pbw(T_(2))(g) over the shuffle coproduct of T."""
    chart = conn.chart
    out: dict = {}
    for (h, I), c in T.terms.items():
        for I1, I2, e in shuffle_split(I, chart.odd):
            a = do_apply(DiffOp(chart, pbw_frame(conn, I1)), f)
            if not a:
                continue
            b = do_apply(DiffOp(chart, pbw_frame(conn, I2)), g)
            if not b:
                continue
            s = e * sign(chart.mono_degree(I2) * f.degree())
            prod = fmul_terms(chart, fmul_terms(chart, {h: c}, a.terms), b.terms)
            for m, v in prod.items():
                add_into(out, m, s * v)
    return FormalFunction(chart, out)


def theorem1_check(Q: VectorField, conn: Connection, arity_cap: int = 4) -> dict:
    """At = 0 iff C = 0 (up to arity_cap on frames)."""
    chart = conn.chart
    at = _cached_atiyah(Q, conn)
    at_zero = at.is_zero()
    c_zero = True
    witness = None
    for n in range(2, arity_cap + 1):
        for I in chart.monomials(n, n):
            C = c_nabla(Q, conn, SymTensorField(chart, {((), I): 1}))
            if C:
                c_zero = False
                witness = (I, C)
                break
        if not c_zero:
            break
    return {"atiyah_zero": at_zero, "c_zero": c_zero, "consistent": at_zero == c_zero,
            "witness": witness, "atiyah": at}
