"""Exact rational, univariate and binary-form arithmetic over Q.

Univariate polynomials in ``t`` are FLINT ``fmpq_poly`` objects (aliased as
:data:`UniPoly`).  Rational scalars are exposed to callers as
:class:`fractions.Fraction`.  The base curve is the projective line with
affine coordinate ``t = t0/t1``; a place is either ``t = a`` or ``t = oo``.

A :class:`BinaryForm` of degree ``D`` is stored through its dehomogenization
``f(t) = F(t, 1)`` together with ``D``; the multiplicity of the place at
infinity is then ``D - deg f``.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd as igcd

from flint import fmpq, fmpq_poly, fmpz, fmpz_poly

from .errors import NotSplit, ZeroInput

UniPoly = fmpq_poly

T = fmpq_poly([0, 1])


def to_fmpq(x):
    if isinstance(x, fmpq):
        return x
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, (int, fmpz)):
        return fmpq(int(x))
    x = Fraction(x)
    return fmpq(x.numerator, x.denominator)


def to_fraction(x):
    if isinstance(x, fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, fmpz):
        return Fraction(int(x))
    return Fraction(x)


def unipoly(coeffs):
    """Build a polynomial in t from ascending coefficients (ints/Fractions)."""
    return fmpq_poly([to_fmpq(c) for c in coeffs])


def coefficients(p):
    """Ascending coefficients of ``p`` as Fractions (empty for zero)."""
    return [to_fraction(c) for c in p.coeffs()]


def leading_coefficient(p):
    return p.coeffs()[-1]


def integer_primitive(p):
    """Return the primitive integer polynomial proportional to ``p``.

    The sign is chosen so the leading coefficient is positive.  Accepts
    ``fmpq_poly`` or ``fmpz_poly``.
    """
    if isinstance(p, fmpq_poly):
        p = p.numer()
    if p.is_zero():
        return p
    c = p.content()
    if c != 1:
        p = fmpz_poly([a // c for a in p.coeffs()])
    if p.coeffs()[-1] < 0:
        p = -p
    return p


def gcd_unipoly(a, b):
    """Monic gcd of two polynomials in t; ``gcd(0, 0) = 0``."""
    a, b = fmpq_poly(a), fmpq_poly(b)
    if a.is_zero() and b.is_zero():
        return fmpq_poly(0)
    g = a.gcd(b)
    return g / leading_coefficient(g)


# ---------------------------------------------------------------------------
# places and valuations

@dataclass(frozen=True)
class Place:
    """A closed point of P^1 over Q: ``t = root`` or, if root is None, ``t = oo``."""

    root: Fraction = None

    @classmethod
    def linear(cls, a):
        return cls(Fraction(a))

    @property
    def is_infinity(self):
        return self.root is None

    def __str__(self):
        return "t=oo" if self.root is None else f"t={self.root}"


INFINITY = Place(None)


def _multiplicity(p, a):
    """Multiplicity of ``(t - a)`` in the nonzero polynomial ``p``."""
    if p.is_zero():
        raise ZeroInput("multiplicity in the zero polynomial")
    lin = fmpq_poly([-to_fmpq(a), 1])
    k = 0
    while True:
        q, r = divmod(p, lin)
        if not r.is_zero():
            return k
        p = q
        k += 1


class RationalFunction:
    """An element of Q(t) kept in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = fmpq_poly(num)
        den = fmpq_poly(1) if den is None else fmpq_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = fmpq_poly(1)
        else:
            g = num.gcd(den)
            if g.degree() > 0:
                num, den = num // g, den // g
        lc = leading_coefficient(den)
        self.num = num / lc
        self.den = den / lc

    @classmethod
    def constant(cls, c):
        return cls(fmpq_poly([to_fmpq(c)]))

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.num.degree() <= 0 and self.den.degree() == 0

    def __add__(self, other):
        other = _as_rf(other)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        other = _as_rf(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rf(other) / self

    def __pow__(self, k):
        if k < 0:
            return RationalFunction(self.den ** (-k), self.num ** (-k))
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other):
        try:
            other = _as_rf(other)
        except TypeError:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def __repr__(self):
        if self.den.degree() == 0:
            return f"RationalFunction({self.num})"
        return f"RationalFunction(({self.num}) / ({self.den}))"


def _as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (fmpq_poly, fmpz_poly)):
        return RationalFunction(x)
    if isinstance(x, (int, Fraction, fmpq, fmpz)):
        return RationalFunction.constant(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational function")


def valuation(f, place):
    """Order of vanishing of ``f`` at ``place`` (negative at poles).

    ``f`` may be a RationalFunction or a polynomial.  The zero function has
    infinite valuation and raises :class:`ZeroInput`.
    """
    f = _as_rf(f)
    if f.is_zero():
        raise ZeroInput("v_p(0) is infinite")
    if place.is_infinity:
        return f.den.degree() - f.num.degree()
    return _multiplicity(f.num, place.root) - _multiplicity(f.den, place.root)


def _divisors(n):
    n = abs(int(n))
    divs = [1]
    for p, e in fmpz(n).factor():
        p = int(p)
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def split_linear_places(f):
    """Rational roots of ``f`` with multiplicities.

    Returns a list of ``(Place, multiplicity)`` sorted by root.  Raises
    :class:`NotSplit` (carrying the degree of the rootless cofactor) when
    ``f`` is not a product of linear factors over Q.  Candidates come from
    the rational root bound ``p | a_0``, ``q | a_D`` on the primitive
    integer form.
    """
    f = fmpq_poly(f)
    if f.is_zero():
        raise ZeroInput("cannot split the zero polynomial")
    g = integer_primitive(f)
    found = {}
    # root 0 first so that the constant term used below is nonzero
    k = 0
    while g.degree() > 0 and g.coeffs()[0] == 0:
        g = fmpz_poly(g.coeffs()[1:])
        k += 1
    if k:
        found[Fraction(0)] = k
    while g.degree() > 0:
        a0, ad = g.coeffs()[0], g.coeffs()[-1]
        hit = None
        for q in _divisors(ad):
            for p in _divisors(a0):
                for s in (p, -p):
                    if igcd(s, q) != 1:
                        continue
                    if _vanishes(g, s, q):
                        hit = Fraction(s, q)
                        break
                if hit is not None:
                    break
            if hit is not None:
                break
        if hit is None:
            break
        lin = fmpz_poly([-hit.numerator, hit.denominator])
        m = 0
        while True:
            quo, rem = divmod(g, lin)
            if not rem.is_zero():
                break
            g = quo
            m += 1
        found[hit] = found.get(hit, 0) + m
    places = [(Place(r), m) for r, m in sorted(found.items())]
    if g.degree() > 0:
        raise NotSplit(g.degree(), places)
    return places


def _vanishes(g, s, q):
    """Whether the integer polynomial g has the root s/q."""
    coeffs = [int(c) for c in g.coeffs()]
    d = len(coeffs) - 1
    # q^d g(s/q) = sum c_i s^i q^(d-i)
    total = 0
    sp, qp = 1, q ** d
    for c in coeffs:
        total += c * sp * qp
        sp *= s
        qp //= q
    return total == 0


# ---------------------------------------------------------------------------
# binary forms

class BinaryForm:
    """A homogeneous polynomial F(t0, t1) of a declared degree.

    ``coefficients[i]`` is the coefficient of ``t0^(D-i) t1^i``.  The form
    is stored as ``poly = F(t, 1)``, so ``deg poly <= degree`` and the
    place ``t = oo`` (``t1 = 0``) has multiplicity ``degree - deg poly``.
    """

    __slots__ = ("degree", "poly")

    def __init__(self, degree, poly):
        poly = fmpq_poly(poly)
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        if poly.degree() > degree:
            raise ValueError(f"polynomial of degree {poly.degree()} does not fit "
                             f"a binary form of degree {degree}")
        self.degree = degree
        self.poly = poly

    @classmethod
    def from_coefficients(cls, coeffs):
        coeffs = [to_fmpq(c) for c in coeffs]
        if not coeffs:
            raise ValueError("a binary form needs at least one coefficient")
        return cls(len(coeffs) - 1, fmpq_poly(list(reversed(coeffs))))

    @classmethod
    def homogenize(cls, poly, degree=None):
        poly = fmpq_poly(poly)
        if degree is None:
            degree = max(poly.degree(), 0)
        return cls(degree, poly)

    def dehomogenize(self):
        return self.poly

    @property
    def coefficients(self):
        asc = coefficients(self.poly)
        asc += [Fraction(0)] * (self.degree + 1 - len(asc))
        return list(reversed(asc))

    def is_zero(self):
        return self.poly.is_zero()

    def infinity_multiplicity(self):
        """Multiplicity of ``t1`` in the form (order at ``t = oo``)."""
        if self.is_zero():
            raise ZeroInput("zero form")
        return self.degree - self.poly.degree()

    def __call__(self, t0, t1):
        """Evaluate at a point ``(t0 : t1)`` of P^1 (rational values)."""
        t0, t1 = Fraction(t0), Fraction(t1)
        return sum((c * t0 ** (self.degree - i) * t1 ** i
                    for i, c in enumerate(self.coefficients)), Fraction(0))

    def __mul__(self, other):
        if isinstance(other, BinaryForm):
            return BinaryForm(self.degree + other.degree, self.poly * other.poly)
        return BinaryForm(self.degree, self.poly * to_fmpq(other))

    __rmul__ = __mul__

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("cannot add binary forms of different degrees")
        return BinaryForm(self.degree, self.poly + other.poly)

    def __neg__(self):
        return BinaryForm(self.degree, -self.poly)

    def __sub__(self, other):
        return self + (-other)

    def exact_divide(self, other):
        q, r = divmod(self.poly, other.poly)
        if not r.is_zero():
            raise ValueError("binary form division is not exact")
        return BinaryForm(self.degree - other.degree, q)

    def pivot_normalized(self):
        """Scale so the first nonzero coefficient equals 1."""
        if self.is_zero():
            return self
        return BinaryForm(self.degree, self.poly / leading_coefficient(self.poly))

    def __eq__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        return self.degree == other.degree and self.poly == other.poly

    def __hash__(self):
        return hash((self.degree, str(self.poly)))

    def __repr__(self):
        return f"BinaryForm({self.degree}, {self.poly})"


def gcd_binaryform(a, b):
    """Gcd of two binary forms, normalized to leading coefficient 1.

    The finite part comes from :func:`gcd_unipoly` on the dehomogenizations;
    the shared power of ``t1`` accounts for a common zero at ``(1 : 0)``.
    """
    if a.is_zero():
        return b.pivot_normalized() if not b.is_zero() else BinaryForm(0, 0)
    if b.is_zero():
        return a.pivot_normalized()
    g = gcd_unipoly(a.poly, b.poly)
    k = min(a.infinity_multiplicity(), b.infinity_multiplicity())
    return BinaryForm(g.degree() + k, g)


def gcd_binaryforms(forms):
    return reduce(gcd_binaryform, forms, BinaryForm(0, 0))
