"""Heights on P^n(Q(t)) relative to the hyperplane class O(1).

Two independent routes are provided:

* :func:`height_degree` reads the common degree of a coprime binary-form
  representation (the degree of the pulled-back hyperplane class);
* :func:`height_valuation` sums ``-min_i v_p(f_i)`` over all places of P^1,
  which requires every numerator and denominator to split over Q.

On split inputs the two must agree.
"""

from .errors import AllZero, NotSplit
from .exact import INFINITY, Place, _as_rf, split_linear_places, valuation


def height_degree(P):
    """Height of a normalized point: its common coordinate degree."""
    return P.D


def height_plus(h):
    return max(h, 1)


def places_of(fs):
    """All places where some coordinate has a zero or pole, plus infinity.

    Raises :class:`NotSplit` if some numerator or denominator has an
    irreducible factor of degree > 1.
    """
    roots = set()
    for f in fs:
        if f.is_zero():
            continue
        for p in (f.num, f.den):
            if p.degree() > 0:
                roots.update(place.root for place, _ in split_linear_places(p))
    return [Place(r) for r in sorted(roots)] + [INFINITY]


def local_heights(fs):
    """Map each contributing place to ``-min_i v_p(f_i)``."""
    fs = [_as_rf(f) for f in fs]
    if all(f.is_zero() for f in fs):
        raise AllZero("all coordinates vanish")
    nonzero = [f for f in fs if not f.is_zero()]
    return {p: -min(valuation(f, p) for f in nonzero) for p in places_of(nonzero)}


def height_valuation(fs):
    """Height as a sum of local contributions over the places of P^1.

    ``fs`` are rational functions (or polynomials / constants, zero allowed).
    Only places where some coordinate has a zero or a pole can contribute, so
    the sum is finite.
    """
    return sum(local_heights(fs).values())
