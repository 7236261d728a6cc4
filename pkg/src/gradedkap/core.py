"""Exact scalars, Koszul signs and canonical graded-commutative monomials.

Every other module builds on three conventions fixed here: scalars are
``fractions.Fraction``, a monomial is an ascending tuple of coordinate
indices, and zero is the empty sum.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Scalar = Fraction


class GradedKapError(Exception):
    """Base class for engine errors."""


class InvalidInput(GradedKapError):
    pass


class NotAnLInftyStructure(GradedKapError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalInconsistency(GradedKapError):
    def __init__(self, message: str, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class SpecParseError(GradedKapError):
    def __init__(self, message: str, location: str = ""):
        super().__init__(message)
        self.location = location


def to_scalar(value) -> Fraction:
    """Read an int, Fraction or a "p/q" string as an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInput(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"not a rational: {value!r}") from exc
    raise InvalidInput(f"not a rational: {value!r} (floats are refused)")


def format_scalar(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _normalize_permutation(permutation: Sequence[int]) -> list[int]:
    perm = list(permutation)
    n = len(perm)
    if n == 0:
        return perm
    if sorted(perm) == list(range(1, n + 1)):
        return [p - 1 for p in perm]
    if sorted(perm) == list(range(n)):
        return perm
    raise InvalidInput(f"not a permutation: {permutation!r}")


def koszul_sign(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of rearranging objects X_1..X_n into X_s(1)..X_s(n).

    ``degrees[m]`` is the degree of the m-th object in the original order;
    the permutation may be written 0- or 1-based.
    """
    if len(permutation) != len(degrees):
        raise InvalidInput("permutation and degrees differ in length")
    perm = _normalize_permutation(permutation)
    odd = [degrees[p] % 2 for p in perm]
    exponent = 0
    for i in range(len(perm)):
        if not odd[i]:
            continue
        for j in range(i + 1, len(perm)):
            if odd[j] and perm[i] > perm[j]:
                exponent += 1
    return -1 if exponent % 2 else 1


def canonicalize(word: Iterable[int], degrees: Sequence[int]):
    """Sort a word of coordinate indices, tracking the Koszul sign.

    Returns ``(monomial, sign)`` or ``None`` when an odd index repeats.
    """
    w = list(word)
    for i in w:
        if not 0 <= i < len(degrees):
            raise InvalidInput(f"index {i} out of range")
    sign = 1
    # insertion sort; each adjacent swap of two odd letters flips the sign
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            if degrees[w[j - 1]] % 2 and degrees[w[j]] % 2:
                sign = -sign
            w[j - 1], w[j] = w[j], w[j - 1]
            j -= 1
    for a, b in zip(w, w[1:]):
        if a == b and degrees[a] % 2:
            return None
    return tuple(w), sign


def merge(a: tuple, b: tuple, odd: Sequence[bool]):
    """Product of two canonical monomials: ``(sign, monomial)`` or ``None``."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    exponent = 0
    oa = [i for i in a if odd[i]]
    for q in b:
        if odd[q]:
            if q in oa:
                return None
            exponent += sum(1 for p in oa if p > q)
    return (-1 if exponent % 2 else 1), tuple(sorted(a + b))


def parity(m: tuple, odd: Sequence[bool]) -> int:
    return sum(1 for i in m if odd[i]) % 2


def sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1
