from fractions import Fraction

import pytest
from flint import fmpq_poly
from hypothesis import given, settings, strategies as st

from ffdyn.errors import NotSplit, ZeroInput
from ffdyn.exact import (
    INFINITY, BinaryForm, Place, RationalFunction, coefficients, gcd_binaryform,
    gcd_unipoly, split_linear_places, unipoly, valuation,
)
from oracles import brute_gcd

coeff_lists = st.lists(st.integers(-6, 6), min_size=1, max_size=5)


def test_rational_function_lowest_terms():
    f = RationalFunction(unipoly([-1, 0, 1]), unipoly([2, 2]))
    assert coefficients(f.num) == [Fraction(-1, 2), Fraction(1, 2)]
    assert coefficients(f.den) == [1]


def test_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        RationalFunction(1, 0)


def test_valuations():
    t = unipoly([0, 1])
    f = RationalFunction(t ** 2 * (t - 1), (t + 2) ** 3)
    assert valuation(f, Place(Fraction(0))) == 2
    assert valuation(f, Place(Fraction(1))) == 1
    assert valuation(f, Place(Fraction(-2))) == -3
    assert valuation(f, INFINITY) == 0
    assert valuation(t, INFINITY) == -1
    with pytest.raises(ZeroInput):
        valuation(RationalFunction(0), INFINITY)


def test_split_and_not_split():
    t = unipoly([0, 1])
    places = split_linear_places((2 * t - 1) ** 2 * t * (t + 3))
    assert [(p.root, m) for p, m in places] == [(-3, 1), (0, 1), (Fraction(1, 2), 2)]
    with pytest.raises(NotSplit) as err:
        split_linear_places((t ** 2 + 1) * (t - 1))
    assert err.value.cofactor_degree == 2


@given(coeff_lists, coeff_lists, coeff_lists)
@settings(max_examples=60, deadline=None)
def test_gcd_matches_euclid(a, b, c):
    A = unipoly(a) * unipoly(c)
    B = unipoly(b) * unipoly(c)
    expected = brute_gcd(coefficients(A), coefficients(B))
    assert coefficients(gcd_unipoly(A, B)) == expected


def test_binary_form_infinity():
    F = BinaryForm(3, unipoly([1, 1]))
    assert F.infinity_multiplicity() == 2
    assert F(1, 0) == 0 and F(0, 1) == 1
    G = BinaryForm(2, unipoly([0, 0, 1]))
    g = gcd_binaryform(F, BinaryForm(2, unipoly([1, 1])))
    assert g.degree == 2
    assert gcd_binaryform(F, G).degree == 0


def test_binary_form_degree_check():
    with pytest.raises(ValueError):
        BinaryForm(1, fmpq_poly([0, 0, 1]))
