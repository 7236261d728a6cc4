import itertools

import pytest

from gradedkap.connections import (Connection, atiyah_cocycle, atiyah_direct, cQ_apply, cQ_direct,
                                   curvature, is_flat, nabla, torsion)
from gradedkap.core import InvalidInput, sign
from gradedkap.diffops import multi_deriv
from gradedkap.functions import FormalFunction, VectorField

from conftest import christoffel, setup


def sample_fields(chart, w=2):
    return [VectorField(chart, {(m, (j,)): 1}) for m in chart.monomials(w) for j in range(chart.dim)]


def test_christoffel_degree_checked():
    _, chart, _, _ = setup("nonabelian2g")
    with pytest.raises(InvalidInput):
        christoffel(chart, {(1, 1, 1): {(0,): 1}})
    with pytest.raises(InvalidInput):
        christoffel(chart, {(5, 1, 1): {(): 1}})


def test_torsion_and_symmetrization():
    _, chart, Q, _ = setup("nonabelian2g")
    lopsided = christoffel(chart, {(0, 0, 1): {(): 3}})
    assert not lopsided.is_torsion_free()
    T = torsion(lopsided)
    assert T.frame_value(0, 1) == VectorField.frame(chart, 0).scaled(3)
    with pytest.raises(InvalidInput):
        atiyah_cocycle(Q, lopsided)


def test_curvature_value():
    _, chart, _, _ = setup("nonabelian2g")
    conn = christoffel(chart, {(1, 1, 1): {(): 2}, (0, 0, 1): {(): 3}, (0, 1, 0): {(): 3}})
    R = curvature(conn)
    # (ab - b^2) d_1 with a = 2, b = 3
    assert R[(0, 1, 1)] == VectorField.frame(chart, 0).scaled(-3)
    assert not is_flat(conn)
    assert is_flat(christoffel(chart, {(1, 1, 1): {(): 2}}))


@pytest.mark.parametrize("name", ["nonabelian2g-curved", "dgvs-christoffel", "cubic-christoffel"])
def test_nabla_leibniz(name):
    _, chart, _, conn = setup(name)
    fs = [FormalFunction(chart, {m: 1}) for m in chart.monomials(2)]
    fields = sample_fields(chart, 1)
    for X, Y, f in itertools.product(fields, fields, fs):
        lhs = nabla(conn, X, Y.times_function(f))
        rhs = Y.times_function(X(f)) + nabla(conn, X, Y).times_function(f).scaled(sign(X.degree() * f.degree()))
        assert lhs == rhs
        assert nabla(conn, X.times_function(f), Y) == nabla(conn, X, Y).times_function(f)


@pytest.mark.parametrize("name", ["nonabelian2", "sl2", "nonabelian2g", "cubic", "heisenberg3"])
def test_trivial_atiyah_formula(name):
    _, chart, Q, _ = setup(name)
    at = atiyah_cocycle(Q, Connection.trivial(chart))
    d = chart.degrees
    comps = Q.components()
    for i, j in itertools.product(range(chart.dim), repeat=2):
        want = VectorField(chart, {})
        for l, f in comps.items():
            g = FormalFunction(chart, multi_deriv(chart, (i, j), f.terms))
            want = want + VectorField.frame(chart, l).times_function(g)
        assert at.frame_value(i, j) == want.scaled(sign(d[i] + d[j]))
    assert at.is_symmetric()


@pytest.mark.parametrize("name", ["nonabelian2g-curved", "dgvs-christoffel", "cubic-christoffel", "sl2"])
def test_atiyah_is_tensorial_symmetric_cocycle(name):
    _, chart, Q, conn = setup(name)
    at = atiyah_cocycle(Q, conn)
    assert at.degree == 1 and at.is_symmetric()
    fields = sample_fields(chart, 1)
    for X, Y in itertools.product(fields, fields):
        assert atiyah_direct(Q, conn, X, Y) == at(X, Y)
    assert cQ_apply(Q, at).is_zero()


@pytest.mark.parametrize("name", ["nonabelian2g-curved", "dgvs-christoffel", "cubic-christoffel"])
def test_class_independence(name):
    _, chart, Q, conn = setup(name)
    triv = Connection.trivial(chart)
    diff = conn.difference(triv)
    assert atiyah_cocycle(Q, conn) - atiyah_cocycle(Q, triv) == cQ_apply(Q, diff)
    fields = sample_fields(chart, 1)
    QF = cQ_apply(Q, diff)
    for X, Y in itertools.product(fields, fields):
        assert cQ_direct(Q, diff, X, Y) == QF(X, Y)
    assert cQ_apply(Q, QF).is_zero()


def test_one_two_tensor_bundle_map():
    _, chart, Q, conn = setup("nonabelian2g-curved")
    at = atiyah_cocycle(Q, conn)
    B = at.as_bundle_map()
    assert B.arity == 2 and B.degree == 1
    assert set(B.values) <= {(0, 1), (1, 1)}
    assert B.frame_value((0, 1)) == at.frame_value(0, 1)
