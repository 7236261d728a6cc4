"""Verification suites: exact identities checked on finite families of inputs.

Each check yields a result dict (suite, check, ok, checked, witness, note).
The first failing input, in enumeration order, is the witness, so results
do not depend on the worker count.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable

from . import linfty
from .coalgebra import BundleMap, SymTensorField
from .connections import (Connection, atiyah_cocycle, cQ_apply, is_flat,
                          sym_cov_derivative)
from .core import GradedKapError, NotAnLInftyStructure, sign
from .diffops import DiffOp, do_coproduct_eval, multi_deriv
from .fedosov import (a_nabla, b_via_a, covariant_d, fedosov_chart, homotopy_h,
                      koszul_delta, koszul_operator, pi0)
from .functions import (FormalFunction, LInftySpec, VectorField, check_homological,
                        q_from_spec, vf_commutator)
from .kapranov import b_nabla, check_linfty, connection_compare, extract_R, lambda_bracket, r_recursion
from .pbw import c_nabla, c_nabla_recursive, pbw, pbw_coproduct_expand, theorem1_check

SUITES = ("jacobi", "pbw", "recursion", "fedosov", "connections", "closedform")


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("GRADEDKAP_THREADS", "1")))
    except ValueError:
        return 1


def scan(items: Iterable, fn: Callable) -> tuple[int, object]:
    """Run fn over items (order-preserving pool map); fn returns None or a witness."""
    items = list(items)
    n = worker_count()
    if n > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(fn, items))
    else:
        results = []
        for it in items:
            r = fn(it)
            results.append(r)
            if r is not None:
                break
    for k, r in enumerate(results):
        if r is not None:
            return k + 1, r
    return len(items), None


def _result(suite, check, checked, witness, note=None, skipped=False):
    ok = None if skipped else witness is None
    return {"suite": suite, "check": check, "ok": ok, "checked": checked,
            "witness": witness, "note": note}


def _frames(chart, n):
    return chart.monomials(n, n)


def _diff(left, right):
    return {"left": left, "right": right}


class Context:
    """Everything a suite needs: spec, chart, Q, the document connection, caps."""

    def __init__(self, spec: LInftySpec, conn: Connection | None, arity_cap: int, weight_cap: int):
        self.spec = spec
        self.chart = spec.chart()
        self.K = arity_cap
        self.N = weight_cap
        self.Q = q_from_spec(spec, self.chart)
        self.trivial = Connection.trivial(self.chart)
        self.conn = conn if conn is not None else self.trivial

    def connections(self):
        out = [self.trivial]
        if not self.conn.is_trivial():
            out.append(self.conn)
        return out

    def fn_cap(self, n):
        return min(self.N, n)


# ---------------------------------------------------------------- jacobi

def suite_jacobi(ctx: Context) -> list[dict]:
    out = []
    ok, w = check_homological(ctx.Q)
    out.append(_result("jacobi", "[Q,Q] = 0", 1, None if ok else {"generator": ctx.spec.names[w[0]], "defect": w[1]}))
    spec = ctx.spec
    wcap = spec.dim if all(spec.odd) else ctx.fn_cap(3)
    for tag in linfty.CEModule.TAGS:
        M = linfty.CEModule(spec, tag)
        ok, w = linfty.check_module(M, wcap)
        out.append(_result("jacobi", f"{tag} module compatibility", 1, w))
        dcap = spec.dim if all(spec.odd) else min(wcap, 2)
        ok, w = linfty.ce_square_zero(M, dcap)
        out.append(_result("jacobi", f"d_CE^2 = 0 ({tag})", 1, w))
    return out


# ---------------------------------------------------------------- pbw

def suite_pbw(ctx: Context) -> list[dict]:
    out = []
    ch = ctx.chart
    fns = [FormalFunction.monomial(ch, list(m), 1) for m in ch.monomials(ctx.fn_cap(2))]
    for conn in ctx.connections():
        tag = conn.name or "connection"
        frames = [I for n in range(min(ctx.K, 3) + 1) for I in _frames(ch, n)]

        def morph(I):
            T = SymTensorField(ch, {((), I): 1})
            D = pbw(conn, T)
            for f, g in itertools.product(fns, fns):
                left = do_coproduct_eval(D, f, g)
                right = pbw_coproduct_expand(conn, T, f, g)
                if left != right:
                    return {"frame": I, "f": f, "g": g, **_diff(left, right)}
            return None
        n, w = scan(frames, morph)
        out.append(_result("pbw", f"coalgebra morphism ({tag})", n, w))

        at = atiyah_cocycle(ctx.Q, conn)
        base = [("f", m) for m in ch.monomials(ctx.fn_cap(2))] + [("X", (i,)) for i in range(ch.dim)]
        base += [("XY", I) for I in _frames(ch, 2)]

        def base_case(item):
            kind, m = item
            if kind == "f":
                C = c_nabla(ctx.Q, conn, SymTensorField(ch, {(m, ()): 1}))
                return None if not C else {"function": m, "C": C}
            C = c_nabla(ctx.Q, conn, SymTensorField(ch, {((), m): 1}))
            if kind == "X":
                return None if not C else {"frame": m, "C": C}
            want = DiffOp.from_vector_field(at.frame_value(*m)).scaled(-1)
            return None if C == want else {"frame": m, **_diff(C, want)}
        n, w = scan(base, base_case)
        out.append(_result("pbw", f"C base identities ({tag})", n, w))

        frames = [I for n in range(ctx.K + 1) for I in _frames(ch, n)]

        def rec(I):
            T = SymTensorField(ch, {((), I): 1})
            a, b = c_nabla(ctx.Q, conn, T), c_nabla_recursive(ctx.Q, conn, T)
            return None if a == b else {"frame": I, **_diff(a, b)}
        n, w = scan(frames, rec)
        out.append(_result("pbw", f"C recursion = direct C ({tag})", n, w))

        t = theorem1_check(ctx.Q, conn, ctx.K)
        w = None if t["consistent"] else {"atiyah_zero": t["atiyah_zero"], "c_witness": t["witness"]}
        note = "At = 0 and C = 0" if t["atiyah_zero"] else "At != 0 and C != 0"
        out.append(_result("pbw", f"At = 0 iff C = 0 ({tag})", 1, w, note if w is None else None))
    return out


# ---------------------------------------------------------------- recursion

def _scaled_map(R: BundleMap, c) -> BundleMap:
    return BundleMap(R.chart, R.arity, R.degree, {I: v.scaled(c) for I, v in R.values.items()})


def explicit_tower_check(ctx: Context, n: int):
    """Trivial connection: R_n(d_I) = -(-1)^{sum d_i} d_{i1}...d_{in}(Q^j) d_j."""
    ch = ctx.chart
    tower = extract_R(ctx.Q, ctx.trivial, n)
    comps = ctx.Q.components()
    for I in _frames(ch, n):
        want = VectorField(ch, {})
        s = -sign(ch.mono_degree(I))
        for j, f in comps.items():
            g = FormalFunction(ch, multi_deriv(ch, I, f.terms))
            want = want + VectorField.frame(ch, j).times_function(g).scaled(s)
        got = tower[n].frame_value(I)
        if got != want:
            return {"frame": I, **_diff(got, want)}
    return None


def suite_recursion(ctx: Context) -> list[dict]:
    out = []
    for conn in ctx.connections():
        tag = conn.name or "connection"
        try:
            tower = extract_R(ctx.Q, conn, ctx.K)
        except GradedKapError as e:
            out.append(_result("recursion", f"R_0 = R_1 = 0 ({tag})", 1, {"error": str(e)}))
            continue
        out.append(_result("recursion", f"R_0 = R_1 = 0 ({tag})", 1, None))
        at = atiyah_cocycle(ctx.Q, conn)
        want = _scaled_map(at.as_bundle_map(), -1)
        out.append(_result("recursion", f"R_2 = -At ({tag})", 1,
                           None if tower[2] == want else _diff(tower[2], want)))
        rec = r_recursion(ctx.Q, conn, ctx.K)
        bad = None
        for k in range(2, ctx.K + 1):
            if tower[k] != rec[k]:
                bad = {"arity": k, **_diff(tower[k], rec[k])}
                break
        out.append(_result("recursion", f"extracted tower = recursion ({tag})", ctx.K - 1, bad))
        if is_flat(conn):
            bad = None
            for k in range(3, ctx.K + 1):
                want = _scaled_map(sym_cov_derivative(conn, tower[k - 1]), Fraction(1, k))
                if tower[k] != want:
                    bad = {"arity": k, **_diff(tower[k], want)}
                    break
            out.append(_result("recursion", f"flat: R_n = (1/n) dR_(n-1) ({tag})", max(ctx.K - 2, 0), bad))
        r = check_linfty(ctx.Q, conn, ctx.K, ctx.N, tower)
        w = None if r["ok"] else {"monomial": r["witness"][0], "frame": r["witness"][1], "delta^2": r["witness"][2]}
        out.append(_result("recursion", f"delta^2 = 0 ({tag})", r["checked"], w))
    return out


# ---------------------------------------------------------------- fedosov

def suite_fedosov(ctx: Context) -> list[dict]:
    out = []
    ch = ctx.chart
    fc = fedosov_chart(ch)
    E = fc.ext
    basis = [m for m in E.monomials(3) if fc.bidegree(m)[0] <= 2]

    def delta_sq(m):
        f = FormalFunction(E, {m: 1})
        dd = koszul_delta(fc, koszul_delta(fc, f))
        return None if not dd else {"monomial": m, "delta^2": dd}
    n, w = scan(basis, delta_sq)
    out.append(_result("fedosov", "delta^2 = 0", n, w))

    def homotopy(m):
        f = FormalFunction(E, {m: 1})
        left = koszul_delta(fc, homotopy_h(fc, f)) + homotopy_h(fc, koszul_delta(fc, f))
        right = f - pi0(fc, f)
        return None if left == right else {"monomial": m, **_diff(left, right)}
    n, w = scan(basis, homotopy)
    out.append(_result("fedosov", "delta h + h delta = id - pi_0", n, w))

    for conn in ctx.connections():
        tag = conn.name or "connection"
        c = vf_commutator(koszul_operator(fc), covariant_d(fc, conn))
        out.append(_result("fedosov", f"[delta, d^nabla] = 0 ({tag})", 1, None if not c else {"commutator": c}))
        A = a_nabla(conn, max(ctx.K, 2))
        flat = is_flat(conn)
        if flat:
            out.append(_result("fedosov", f"flat: A = 0 ({tag})", 1, None if A.is_zero() else {"A": A.total()}))
        bad = None
        for k, part in sorted(A.parts.items()):
            h = homotopy_h(fc, part)
            if h:
                bad = {"part": k, "h(A)": h}
                break
        out.append(_result("fedosov", f"h(A) = 0 ({tag})", len(A.parts), bad))
        items = [(j, I) for j in range(ch.dim) for n in range(min(ctx.K, 3) + 1) for I in _frames(ch, n)]

        def bcheck(item):
            j, I = item
            Y = VectorField.frame(ch, j)
            T = SymTensorField(ch, {((), I): 1})
            left, right = b_via_a(conn, Y, T), b_nabla(conn, Y, T)
            return None if left == right else {"Y": j, "frame": I, **_diff(left, right)}
        n, w = scan(items, bcheck)
        out.append(_result("fedosov", f"B from A = B from PBW ({tag})", n, w,
                           None if not flat else "flat connection: both sides vanish"))
    return out


# ---------------------------------------------------------------- connections

def alternative_connection(chart) -> Connection | None:
    """A torsion-free constant Christoffel connection, if the degrees allow one."""
    d = chart.degrees
    for k, i, j in itertools.product(range(chart.dim), repeat=3):
        if i > j or d[k] != d[i] + d[j] or (i == j and chart.odd[i]):
            continue
        gamma = {(k, i, j): FormalFunction.constant(chart, 1)}
        if i != j:
            gamma[(k, j, i)] = FormalFunction.constant(chart, sign(d[i] * d[j]))
        conn = Connection(chart, gamma, "alternative")
        if conn.is_torsion_free():
            return conn
    return None


def suite_connections(ctx: Context) -> list[dict]:
    out = []
    ch = ctx.chart
    conn = ctx.conn
    out.append(_result("connections", "torsion free", 1,
                       None if conn.is_torsion_free() else {"connection": conn.name}))
    other = ctx.trivial if not conn.is_trivial() else alternative_connection(ch)
    if other is None:
        out.append(_result("connections", "connection independence", 0, None,
                           "no second torsion-free connection for these degrees", skipped=True))
        return out
    a1, a2 = atiyah_cocycle(ctx.Q, conn), atiyah_cocycle(ctx.Q, other)
    left = a1 - a2
    right = cQ_apply(ctx.Q, conn.difference(other))
    out.append(_result("connections", "At - At' = Q(nabla - nabla')", 1,
                       None if left == right else _diff(left, right)))
    cap = min(ctx.K, 3)
    try:
        r = connection_compare(ctx.Q, conn, other, cap, 1)
        w = None if r["phi1_identity"] else {"phi_1": r["components"][1]}
        out.append(_result("connections", "pbw'^-1 pbw intertwines, phi_1 = id", r["checked"], w))
    except GradedKapError as e:
        out.append(_result("connections", "pbw'^-1 pbw intertwines, phi_1 = id", 0,
                           {"error": str(e), **_diff(getattr(e, "left", None), getattr(e, "right", None))}))
    return out


# ---------------------------------------------------------------- closed forms

def _dgla_check(ctx: Context):
    """lambda_2(xi X, eta Y) = (-1)^{|xi|+|eta|+|X||eta|} xi eta q_2(x, y); all-odd Lie case (-1)^{|xi|}."""
    ch = ctx.chart
    spec = ctx.spec
    tower = extract_R(ctx.Q, ctx.trivial, 2)
    d = ch.degrees
    checked = 0
    for a, b, x, y in itertools.product(range(ch.dim), repeat=4):
        xi, eta = FormalFunction.coordinate(ch, a), FormalFunction.coordinate(ch, b)
        X = linfty.pairing_frame(ch, x).times_function(xi)
        Y = linfty.pairing_frame(ch, y).times_function(eta)
        got = lambda_bracket(tower, ctx.Q, X, Y)
        base = VectorField(ch, {})
        for j, c in spec.coefficient((x, y)).items():
            base = base + linfty.pairing_frame(ch, j).scaled(c)
        want = base.times_function(xi * eta).scaled(sign(d[a] + d[b] + d[x] * d[b]))
        if all(ch.odd):
            lie = base.times_function(xi * eta).scaled(sign(d[a]))
            if lie != want:
                return checked, {"inputs": [a, b, x, y], "general": want, "lie": lie}
        checked += 1
        if got != want:
            return checked, {"inputs": [a, b, x, y], **_diff(got, want)}
    return checked, None


def suite_closedform(ctx: Context) -> list[dict]:
    out = []
    spec, ch, Q = ctx.spec, ctx.chart, ctx.Q
    tower = extract_R(Q, ctx.trivial, ctx.K)
    M = linfty.CEModule(spec, "adjoint")
    words = [xs for n in range(1, ctx.K + 1) for xs in _frames(ch, n)]

    def lam(xs):
        X = [linfty.pairing_frame(ch, x) for x in xs]
        got = linfty.identify_vf(spec, lambda_bracket(tower, Q, *X), M)
        want = linfty.closed_form_lambda(spec, len(xs), xs)
        return None if got == want else {"inputs": xs, **_diff(got, want)}
    n, w = scan(words, lam)
    out.append(_result("closedform", "lambda_n = sum_k q_k(X . -)", n, w))

    bad = None
    for k in range(2, ctx.K + 1):
        bad = explicit_tower_check(ctx, k)
        if bad:
            bad["arity"] = k
            break
    out.append(_result("closedform", "R_n = -(-1)^|I| d_I Q^j d_j", max(ctx.K - 1, 0), bad))

    fields = [VectorField(ch, {(m, (i,)): 1}) for m in ch.monomials(ctx.fn_cap(3)) for i in range(ch.dim)]

    def inter(X):
        left = linfty.identify_vf(spec, vf_commutator(Q, X), M)
        right = linfty.ce_differential(spec, M, linfty.identify_vf(spec, X, M))
        return None if left == right else {"field": X, **_diff(left, right)}
    n, w = scan(fields, inter)
    out.append(_result("closedform", "identify(L_Q X) = d_CE identify(X)", n, w))

    fns = list(ch.monomials(ctx.fn_cap(3)))

    def pairing(m):
        f = FormalFunction(ch, {m: 1})
        Qf = Q(f)
        s = -sign(ch.mono_degree(m))
        for J in ch.monomials(ctx.fn_cap(3) + max(spec.max_arity, 1)):
            left = linfty.fn_pair(spec, Qf, J)
            right = s * sum((c * linfty.fn_pair(spec, f, K) for K, c in linfty.q_tilde(spec, J).items()), Fraction(0))
            if left != right:
                return {"function": m, "input": J, **_diff(left, right)}
        return None
    n, w = scan(fns, pairing)
    out.append(_result("closedform", "<Q f, X> = -(-1)^|f| <f, Q~ X>", n, w))

    if set(spec.brackets) <= {2}:
        n, w = _dgla_check(ctx)
        out.append(_result("closedform", "dgla: lambda_2 on linear fields", n, w))
    return out


# ---------------------------------------------------------------- driver

_RUNNERS = {"jacobi": suite_jacobi, "pbw": suite_pbw, "recursion": suite_recursion,
            "fedosov": suite_fedosov, "connections": suite_connections, "closedform": suite_closedform}


def run_suites(spec: LInftySpec, conn: Connection | None, names, arity_cap: int, weight_cap: int) -> list[dict]:
    names = list(SUITES) if names in ("all", None) else [names] if isinstance(names, str) else list(names)
    try:
        ctx = Context(spec, conn, arity_cap, weight_cap)
    except NotAnLInftyStructure as e:
        j, f = e.witness
        fail = _result("jacobi", "[Q,Q] = 0", 1, {"generator": spec.names[j], "defect": f})
        return [fail] + [_result(n, "all checks", 0, None, "not an L-infinity structure", skipped=True)
                         for n in names if n != "jacobi"]
    results = []
    for n in names:
        results.extend(_RUNNERS[n](ctx))
    return results
