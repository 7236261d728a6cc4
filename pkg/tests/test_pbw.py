import itertools
from fractions import Fraction

import pytest

from gradedkap.coalgebra import SymTensorField
from gradedkap.connections import Connection, atiyah_cocycle, nabla
from gradedkap.core import sign
from gradedkap.diffops import DiffOp, do_coproduct_eval, symbol
from gradedkap.functions import FormalFunction, VectorField
from gradedkap.pbw import (c_nabla, c_nabla_recursive, pbw, pbw_coproduct_expand, pbw_inverse,
                           theorem1_check)

from conftest import setup

CURVED = ["nonabelian2g-curved", "dgvs-christoffel", "cubic-christoffel"]


def frames(chart, top):
    return [I for k in range(top + 1) for I in chart.monomials(k, k)]


def test_trivial_connection_is_naive_embedding():
    _, chart, _, _ = setup("nonabelian2g")
    triv = Connection.trivial(chart)
    for I in frames(chart, 4):
        T = SymTensorField(chart, {((1,), I): 1})
        assert pbw(triv, T) == DiffOp.from_tensor(T)


@pytest.mark.parametrize("name", CURVED)
def test_low_arity(name):
    _, chart, _, conn = setup(name)
    f = FormalFunction(chart, {(1,): 2})
    assert pbw(conn, SymTensorField.from_function(f)) == DiffOp.from_function(f)
    for i, j in itertools.product(range(chart.dim), repeat=2):
        X, Y = VectorField.frame(chart, i), VectorField.frame(chart, j)
        assert pbw(conn, SymTensorField.from_vector_field(X)) == DiffOp.from_vector_field(X)
        s = sign(X.degree() * Y.degree())
        dx, dy = DiffOp.from_vector_field(X), DiffOp.from_vector_field(Y)
        want = (dx * dy + (dy * dx).scaled(s)
                - DiffOp.from_vector_field(nabla(conn, X, Y))
                - DiffOp.from_vector_field(nabla(conn, Y, X)).scaled(s)).scaled(Fraction(1, 2))
        XY = SymTensorField.from_vector_field(X) * SymTensorField.from_vector_field(Y)
        assert pbw(conn, XY) == want


@pytest.mark.parametrize("name", CURVED)
def test_inverse_and_symbol(name):
    _, chart, _, conn = setup(name)
    for I in frames(chart, 4):
        for m in chart.monomials(1):
            T = SymTensorField(chart, {(m, I): 1})
            D = pbw(conn, T)
            assert D.order() == len(I)
            assert symbol(D, len(I)) == T
            assert pbw_inverse(conn, D) == T


@pytest.mark.parametrize("name", CURVED)
def test_coalgebra_morphism(name):
    _, chart, _, conn = setup(name)
    fns = [FormalFunction(chart, {m: 1}) for m in chart.monomials(2)]
    for I in frames(chart, 3):
        T = SymTensorField(chart, {((), I): 1})
        D = pbw(conn, T)
        for f, g in itertools.product(fns, fns):
            assert do_coproduct_eval(D, f, g) == pbw_coproduct_expand(conn, T, f, g)


@pytest.mark.parametrize("name", CURVED + ["sl2", "nonabelian2"])
def test_defect_base_cases_and_recursion(name):
    _, chart, Q, conn = setup(name)
    at = atiyah_cocycle(Q, conn)
    for m in chart.monomials(2):
        assert not c_nabla(Q, conn, SymTensorField(chart, {(m, ()): 1}))
    for i in range(chart.dim):
        assert not c_nabla(Q, conn, SymTensorField.frame(chart, (i,)))
    for I in chart.monomials(2, 2):
        C = c_nabla(Q, conn, SymTensorField(chart, {((), I): 1}))
        assert C == DiffOp.from_vector_field(at.frame_value(*I)).scaled(-1)
    for I in frames(chart, 4):
        for m in chart.monomials(1):
            T = SymTensorField(chart, {(m, I): 1})
            assert c_nabla(Q, conn, T) == c_nabla_recursive(Q, conn, T)


def test_theorem1_both_directions():
    _, chart, Q, conn = setup("dgvs")
    r = theorem1_check(Q, conn, 4)
    assert r["atiyah_zero"] and r["c_zero"] and r["consistent"]
    _, chart, Q, conn = setup("nonabelian2")
    r = theorem1_check(Q, conn, 4)
    assert not r["atiyah_zero"] and not r["c_zero"] and r["consistent"]
    C = c_nabla(Q, conn, SymTensorField.frame(chart, (0, 1)))
    assert C
