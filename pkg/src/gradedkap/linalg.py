"""Exact linear algebra over Q, backed by sympy's DomainMatrix."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _to_qq(c) -> object:
    c = Fraction(c)
    return QQ(c.numerator, c.denominator)


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def matrix(rows: Sequence[Sequence], ncols: int) -> DomainMatrix:
    data = [[_to_qq(c) for c in row] for row in rows]
    if not data:
        return DomainMatrix.zeros((0, ncols), QQ)
    return DomainMatrix(data, (len(data), ncols), QQ)


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    if not rows or not ncols:
        return 0
    return matrix(rows, ncols).rank()


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {v : M v = 0}."""
    if not ncols:
        return []
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = matrix(rows, ncols).nullspace()
    return [[_to_fraction(ns[i, j].element) for j in range(ncols)] for i in range(ns.shape[0])]


def transpose(rows: Sequence[Sequence], ncols: int) -> list[list]:
    return [[row[j] for row in rows] for j in range(ncols)]


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int):
    """Return (solution, None) for M v = b, or (None, y) with y M = 0 and y b != 0."""
    nrows = len(rows)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    if nrows == 0:
        return [Fraction(0)] * ncols, None
    R, pivots = matrix(aug, ncols + 1).rref()
    if ncols in pivots:
        for y in nullspace(transpose(rows, ncols), nrows):
            if sum(a * b for a, b in zip(y, rhs)):
                return None, y
        raise AssertionError("inconsistent system without certificate")
    sol = [Fraction(0)] * ncols
    for r, p in enumerate(pivots):
        sol[p] = _to_fraction(R[r, ncols].element)
    return sol, None


def independent_extension(base: list[list], candidates: list[list], ncols: int) -> list[list]:
    """Greedily pick candidates that are independent modulo span(base)."""
    chosen = []
    current = [list(v) for v in base]
    r = rank(current, ncols)
    for v in candidates:
        trial = current + [list(v)]
        r2 = rank(trial, ncols)
        if r2 > r:
            chosen.append(list(v))
            current = trial
            r = r2
    return chosen
