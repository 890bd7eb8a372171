from __future__ import annotations

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from hfktorsion.polynomial import LaurentPoly

polys = st.dictionaries(st.integers(-6, 6), st.integers(-20, 20), max_size=6).map(LaurentPoly)


def test_zero_coefficients_are_dropped():
    assert LaurentPoly({0: 0, 2: 3}).coeffs == {2: 3}
    assert LaurentPoly({1: 0}).is_zero


def test_string_form():
    assert str(LaurentPoly({-1: -1, 0: 3, 1: -1})) == "-t^-1 + 3 - t"
    assert str(LaurentPoly({})) == "0"


def test_evaluation_at_negative_exponents_is_exact():
    p = LaurentPoly({-1: 1, 0: -1, 1: 1})
    assert p(2) == Fraction(1, 2) - 1 + 2
    assert p(1) == 1


def test_normalized_centres_and_fixes_sign():
    p = LaurentPoly.from_list([1, -3, 1], low=4) * -1
    assert p.normalized() == LaurentPoly({-1: -1, 0: 3, 1: -1})


@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == LaurentPoly({})


@given(polys, st.integers(-5, 5))
def test_normalized_is_shift_invariant_and_idempotent(p, k):
    if p.is_zero:
        return
    n = p.normalized()
    assert n.normalized() == n
    assert p.shift(k).normalized() == n
    assert (p * -1).normalized() == n or p(1) == 0
