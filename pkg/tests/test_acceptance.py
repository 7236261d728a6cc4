"""Acceptance criteria 1-10. Each test prints one PASS/FAIL line; all comparisons are exact over Q."""

import contextlib
import itertools
import json
import subprocess
import sys
import time
from fractions import Fraction

from gradedkap import examples, linfty
from gradedkap.coalgebra import BundleMap, SymTensorField
from gradedkap.connections import Connection, atiyah_cocycle, is_flat, sym_cov_derivative
from gradedkap.core import NotAnLInftyStructure
from gradedkap.diffops import DiffOp, do_coproduct_eval
from gradedkap.fedosov import (a_nabla, b_via_a, fedosov_chart, homotopy_h, koszul_delta, pi0)
from gradedkap.functions import FormalFunction, VectorField, check_homological, q_from_spec, vf_commutator
from gradedkap.kapranov import b_nabla, check_linfty, connection_compare, extract_R, lambda_bracket, r_recursion
from gradedkap.pbw import c_nabla, c_nabla_recursive, pbw, pbw_coproduct_expand, theorem1_check
from gradedkap.suites import explicit_tower_check, Context, _dgla_check

from conftest import ACCEPTANCE_LINES, load, setup


@contextlib.contextmanager
def criterion(n, text):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        line = f"FAIL criterion {n}: {text}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        raise
    line = f"PASS criterion {n}: {text} ({time.perf_counter() - t0:.2f}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)


def frames(chart, top, low=0):
    return [I for k in range(low, top + 1) for I in chart.monomials(k, k)]


def test_criterion_1_homological_validity():
    with criterion(1, "q_from_spec passes check_homological; Jacobi violation has a witness"):
        for name in ("abelian2", "nonabelian2", "heisenberg3", "sl2", "dgvs"):
            t0 = time.perf_counter()
            spec, chart, Q, _ = setup(name)
            assert check_homological(Q) == (True, None), name
            assert time.perf_counter() - t0 < 1.0
        spec, chart, _ = load("jacobi_bad")
        try:
            q_from_spec(spec, chart)
            raise AssertionError("Jacobi-violating spec accepted")
        except NotAnLInftyStructure as e:
            j, f = e.witness
            assert f == FormalFunction.monomial(chart, [0, 1, 2], -2)


def test_criterion_2_pbw_coalgebra_morphism():
    with criterion(2, "pbw is a coalgebra morphism (arity <= 3 against weight <= 2 pairs)"):
        _, chart, _, curved = setup("nonabelian2g-curved")
        fns = [FormalFunction(chart, {m: 1}) for m in chart.monomials(2)]
        for conn in (Connection.trivial(chart), curved):
            for I in frames(chart, 3):
                T = SymTensorField(chart, {((), I): 1})
                D = pbw(conn, T)
                for f, g in itertools.product(fns, fns):
                    assert do_coproduct_eval(D, f, g) == pbw_coproduct_expand(conn, T, f, g)


def test_criterion_3_base_identities():
    with criterion(3, "C(f) = 0, C(X) = 0, C(XY) = -At(X,Y); recursive C = C to arity 4"):
        for name in ("nonabelian2g-flat", "nonabelian2g-curved"):
            _, chart, Q, conn = setup(name)
            at = atiyah_cocycle(Q, conn)
            for m in chart.monomials(3):
                assert not c_nabla(Q, conn, SymTensorField(chart, {(m, ()): 1}))
            for i in range(chart.dim):
                assert not c_nabla(Q, conn, SymTensorField.frame(chart, (i,)))
            for i, j in itertools.product(range(chart.dim), repeat=2):
                XY = SymTensorField.frame(chart, (i,)) * SymTensorField.frame(chart, (j,))
                want = DiffOp.from_vector_field(at.frame_value(i, j)).scaled(-1)
                assert c_nabla(Q, conn, XY) == want
            for I in frames(chart, 4):
                T = SymTensorField(chart, {((), I): 1})
                assert c_nabla(Q, conn, T) == c_nabla_recursive(Q, conn, T)
        assert not is_flat(setup("nonabelian2g-curved")[3])


def test_criterion_4_theorem_biconditional():
    with criterion(4, "At = 0 => C = 0 (dg vector space); At != 0 => C(d1 d2) != 0 (2-dim nonabelian)"):
        _, chart, Q, conn = setup("dgvs")
        r = theorem1_check(Q, conn, 4)
        assert r["atiyah_zero"] and r["c_zero"]
        _, chart, Q, conn = setup("nonabelian2")
        assert not atiyah_cocycle(Q, conn).is_zero()
        assert c_nabla(Q, conn, SymTensorField.frame(chart, (0, 1)))


def test_criterion_5_tower_consistency():
    with criterion(5, "R0 = R1 = 0, R2 = -At, extraction = recursion, flat formula, delta^2 = 0 at (4, 6)"):
        for name in ("sl2", "nonabelian2g-flat", "nonabelian2g-curved"):
            _, chart, Q, conn = setup(name)
            tower = extract_R(Q, conn, 4)  # raises if R0 or R1 is nonzero
            at = atiyah_cocycle(Q, conn).as_bundle_map()
            assert tower[2] == BundleMap(chart, 2, 1, {I: -v for I, v in at.values.items()})
            assert tower == r_recursion(Q, conn, 4)
            if is_flat(conn):
                for n in (3, 4):
                    d = sym_cov_derivative(conn, tower[n - 1])
                    assert tower[n] == BundleMap(chart, n, 1, {I: v.scaled(Fraction(1, n)) for I, v in d.values.items()})
            r = check_linfty(Q, conn, 4, 6, tower)
            assert r["ok"], r["witness"]


def test_criterion_6_closed_forms():
    with criterion(6, "closed-form brackets, explicit R_n, identify intertwines L_Q, dgla example"):
        for name in ("sl2", "heisenberg3", "nonabelian2g", "cubic"):
            spec, chart, Q, _ = setup(name)
            triv = Connection.trivial(chart)
            tower = extract_R(Q, triv, 4)
            M = linfty.CEModule(spec, "adjoint")
            for xs in frames(chart, 4, 1):
                X = [linfty.pairing_frame(chart, x) for x in xs]
                got = linfty.identify_vf(spec, lambda_bracket(tower, Q, *X), M)
                assert got == linfty.closed_form_lambda(spec, len(xs), xs)
            ctx = Context(spec, triv, 4, 6)
            for n in range(2, 5):
                assert explicit_tower_check(ctx, n) is None
            for m in chart.monomials(3):
                for i in range(chart.dim):
                    X = VectorField(chart, {(m, (i,)): 1})
                    assert linfty.identify_vf(spec, vf_commutator(Q, X), M) == \
                        linfty.ce_differential(spec, M, linfty.identify_vf(spec, X, M))
        for name in ("sl2", "heisenberg3", "nonabelian2"):
            spec, chart, Q, _ = setup(name)
            checked, w = _dgla_check(Context(spec, None, 2, 2))
            assert w is None and checked == chart.dim ** 4


def test_criterion_7_fedosov():
    with criterion(7, "delta^2 = 0, homotopy identity, flat => A = 0, h(A) = 0, B from A = B from PBW"):
        _, chart, Q, curved = setup("nonabelian2g-curved")
        _, _, _, flat = setup("nonabelian2g-flat")
        fc = fedosov_chart(chart)
        for m in fc.ext.monomials(3):
            if fc.bidegree(m)[0] > 2:
                continue
            f = FormalFunction(fc.ext, {m: 1})
            assert not koszul_delta(fc, koszul_delta(fc, f))
            assert koszul_delta(fc, homotopy_h(fc, f)) + homotopy_h(fc, koszul_delta(fc, f)) == f - pi0(fc, f)
        assert a_nabla(flat, 4).is_zero()
        A = a_nabla(curved, 4)
        assert not A.is_zero()
        assert all(not homotopy_h(fc, p) for p in A.parts.values())
        for j in range(chart.dim):
            Y = VectorField.frame(chart, j)
            for I in frames(chart, 3):
                T = SymTensorField(chart, {((), I): 1})
                assert b_via_a(curved, Y, T) == b_nabla(curved, Y, T)


def test_criterion_8_connection_independence():
    with criterion(8, "pbw'^-1 pbw intertwines delta and delta' with phi_1 = id (arity <= 3)"):
        _, chart, Q, flat = setup("nonabelian2g-flat")
        _, _, _, curved = setup("nonabelian2g-curved")
        assert flat.gamma != curved.gamma
        assert flat.is_torsion_free() and curved.is_torsion_free()
        r = connection_compare(Q, flat, curved, 3, 1)
        assert r["intertwines"] and r["phi1_identity"]


def test_criterion_9_cohomology_sanity():
    with criterion(9, "abelian cohomology = cochain blocks; d^2 = 0 on every sl2 block"):
        spec, *_ = setup("abelian2")
        for tag in linfty.CEModule.TAGS:
            for k in range(-3, 6):
                r = linfty.ce_cohomology(spec, tag, k)
                assert r["dimension"] == r["cochain_dimension"]
        spec, *_ = setup("sl2")
        for tag in linfty.CEModule.TAGS:
            assert linfty.ce_square_zero(linfty.CEModule(spec, tag), spec.dim) == (True, None)


def test_criterion_10_determinism(tmp_path):
    with criterion(10, "two runs of verify --suite all give byte-identical JSON"):
        path = tmp_path / "sl2.json"
        path.write_text(json.dumps(examples.document("sl2")), encoding="utf-8")
        outs = []
        for _ in range(2):
            r = subprocess.run([sys.executable, "-m", "gradedkap", "verify", str(path), "--suite", "all",
                                "--max-arity", "4", "--weight-cap", "6"], capture_output=True)
            assert r.returncode == 0, r.stderr
            outs.append(r.stdout)
        assert outs[0] == outs[1] and outs[0]
