from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gradedkap.core import (InvalidInput, canonicalize, format_scalar, koszul_sign, merge, parity,
                            sign, to_scalar)


def test_to_scalar_forms():
    assert to_scalar("3/6") == Fraction(1, 2)
    assert to_scalar(-4) == Fraction(-4)
    assert to_scalar(" 7 ") == 7
    for bad in ("x", "1/0", 0.5, True, None):
        with pytest.raises(InvalidInput):
            to_scalar(bad)


def test_format_scalar_is_p_over_q():
    assert format_scalar(Fraction(3)) == "3/1"
    assert format_scalar(Fraction(-2, 4)) == "-1/2"


def test_koszul_sign_basics():
    assert koszul_sign([1, 0], [1, 1]) == -1
    assert koszul_sign([1, 0], [1, 2]) == 1
    assert koszul_sign([2, 1], [1, 1]) == -1  # 1-based input
    assert koszul_sign([2, 0, 1], [1, 1, 1]) == 1
    with pytest.raises(InvalidInput):
        koszul_sign([0, 0], [1, 1])


perms = st.integers(1, 6).flatmap(lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n)),
                                                     st.lists(st.integers(-3, 3), min_size=n, max_size=n)))


@given(perms)
def test_koszul_sign_is_multiplicative(data):
    s, t, degs = data
    # apply s, then t to the rearranged list
    degs_s = [degs[i] for i in s]
    composed = [s[i] for i in t]
    assert koszul_sign(composed, degs) == koszul_sign(s, degs) * koszul_sign(t, degs_s)


@given(st.lists(st.integers(0, 3), max_size=6), st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_canonicalize_matches_koszul(word, degs):
    r = canonicalize(word, degs)
    odd_repeat = any(word.count(i) > 1 and degs[i] % 2 for i in set(word))
    if odd_repeat:
        assert r is None
        return
    mono, s = r
    assert list(mono) == sorted(word)
    order = sorted(range(len(word)), key=lambda k: (word[k], k))
    assert s == koszul_sign(order, [degs[i] for i in word])


def test_canonicalize_range():
    with pytest.raises(InvalidInput):
        canonicalize([5], [1, 1])


@given(st.lists(st.integers(0, 3), max_size=4), st.lists(st.integers(0, 3), max_size=4))
def test_merge_agrees_with_canonicalize(a, b):
    degs = [1, 0, 1, 2]
    odd = [d % 2 == 1 for d in degs]
    ca, cb = canonicalize(a, degs), canonicalize(b, degs)
    if ca is None or cb is None:
        return
    (ma, _), (mb, _) = ca, cb
    m = merge(ma, mb, odd)
    c = canonicalize(ma + mb, degs)
    if c is None:
        assert m is None
    else:
        assert m == (c[1], c[0])


def test_parity_and_sign():
    assert parity((0, 1, 2), [True, False, True]) == 0
    assert sign(3) == -1 and sign(-2) == 1
