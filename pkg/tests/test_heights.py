from fractions import Fraction

import numpy as np
import pytest

from ffdyn.errors import AllZero, NotSplit
from ffdyn.exact import RationalFunction, unipoly
from ffdyn.heights import height_degree, height_valuation, local_heights
from ffdyn.projective import constant_point, point_from_rational_functions
from oracles import point_height, valuation_height


def split_poly(rng, k):
    roots = [int(r) for r in rng.integers(-4, 5, size=k)]
    p = unipoly([int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)])
    for r in roots:
        p *= unipoly([-r, 1])
    return p


def test_example_point():
    fs = [unipoly([0, 1]), 2, 1]
    assert height_degree(point_from_rational_functions(fs)) == 1
    assert height_valuation(fs) == 1


def test_constant_point_has_height_zero():
    assert height_degree(constant_point([1, 2, 1])) == 0
    assert height_valuation([3, 5]) == 0


def test_local_contributions():
    t = unipoly([0, 1])
    lh = local_heights([RationalFunction(1, t), RationalFunction(t)])
    assert sorted(lh.values()) == [1, 1]


def test_errors():
    with pytest.raises(AllZero):
        height_valuation([0, 0])
    with pytest.raises(NotSplit):
        height_valuation([unipoly([1, 0, 1]), 1])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_routes_agree_with_oracles(n):
    rng = np.random.default_rng(n)
    for _ in range(15):
        fs = []
        for _ in range(n + 1):
            num = split_poly(rng, int(rng.integers(0, 3)))
            den = split_poly(rng, int(rng.integers(0, 3)))
            fs.append(RationalFunction(num, den))
        P = point_from_rational_functions(fs)
        fr = [([_q(c) for c in f.num.coeffs()] or [0], [_q(c) for c in f.den.coeffs()])
              for f in fs]
        assert height_degree(P) == height_valuation(fs) == point_height(fr) \
            == valuation_height(fr)


def _q(c):
    return Fraction(int(c.p), int(c.q))
