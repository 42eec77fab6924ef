"""Points and rational self-maps of P^n over Q(t).

A point of P^n(Q(t)) is kept in *section form*: n+1 coprime binary forms of
a common degree D, pivot-normalized so that comparison is syntactic.  D is
the height of the point.

A self-map is kept as n+1 polynomials in ``x_0..x_n`` and ``t`` with integer
coefficients: homogeneous of degree ``d`` in the x-variables, with
t-coefficients read as binary forms of degree ``e`` (homogenized with powers
of ``t1``).  The forms never share a common factor.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from flint import (
    fmpq, fmpq_mpoly, fmpq_poly, fmpz, fmpz_mpoly, fmpz_mpoly_ctx, fmpz_poly, nmod_poly,
)

from .errors import AllZero, DimensionMismatch, IndeterminacyHit
from .exact import (
    T, BinaryForm, RationalFunction, _as_rf, gcd_binaryforms, leading_coefficient,
    to_fmpq,
)

VARIABLE_NAMES = ("x", "y", "z", "w")


def variable_names(n):
    if n + 1 <= len(VARIABLE_NAMES):
        return VARIABLE_NAMES[:n + 1]
    return tuple(f"x{i}" for i in range(n + 1))


def map_context(n):
    """Polynomial ring Z[x_0..x_n, t] used for the forms of a self-map on P^n."""
    return fmpz_mpoly_ctx.get(variable_names(n) + ("t",), "lex")


# ---------------------------------------------------------------------------
# points

def _bits(p):
    return (p.degree() + 1) * max(int(p.height_bits()), 1) if not p.is_zero() else 0


_PRIMES = (2 ** 61 - 1, 2 ** 59 - 55, 2 ** 57 - 13)


def _coprime_mod_p(polys):
    """True if the polys are certainly coprime over Q, via a gcd mod p.

    The prime must not divide the leading coefficient of the first poly;
    then a common factor over Q survives reduction with its full degree, so
    a constant gcd mod p proves coprimality.  False means "undecided".
    """
    if any(p.degree() == 0 for p in polys):
        return True
    if len(polys) < 2:
        return False
    lc = polys[0].coeffs()[-1]
    prime = next((q for q in _PRIMES if lc % q != 0), None)
    if prime is None:
        return False
    g = nmod_poly(polys[0], prime)
    for p in polys[1:]:
        g = g.gcd(nmod_poly(p, prime))
        if g.degree() == 0:
            return True
    return False


def _gcd_all(polys):
    g = polys[0]
    for p in polys[1:]:
        if g.degree() <= 0:
            break
        g = g.gcd(p)
    return g


def _normalize_int(polys, D):
    """Remove the common factor of integer polynomials declared of degree D.

    Returns ``(coords, ints, D_new)`` where ``coords`` are pivot-normalized
    ``fmpq_poly`` objects and ``ints`` the proportional integer polynomials.
    """
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        raise AllZero("all coordinates vanish")
    at_infinity = min(D - p.degree() for p in nonzero)
    g = fmpz_poly(1) if _coprime_mod_p(nonzero) else _gcd_all(nonzero)
    if g.degree() > 0:
        polys = [p if p.is_zero() else p / g for p in polys]
        cut = g.degree()
    else:
        cut = 0
    content = fmpz(0)
    for p in polys:
        if not p.is_zero():
            content = content.gcd(p.content())
            if content == 1:
                break
    if content != 1:
        polys = [p if p.is_zero() else p / content for p in polys]
    first = next(p for p in polys if not p.is_zero())
    lc = fmpq(first.coeffs()[-1])
    coords = tuple(fmpq_poly(p) / lc for p in polys)
    return coords, polys, D - cut - at_infinity


class PointFF:
    """A point of P^n(Q(t)) as coprime, pivot-normalized binary forms.

    Construct through :func:`normalize_point` or
    :func:`point_from_rational_functions`; the constructor trusts its input.
    """

    __slots__ = ("n", "D", "_polys", "_ints", "_hash")

    def __init__(self, polys, D, ints=None):
        self._polys = tuple(polys)
        self.n = len(self._polys) - 1
        self.D = D
        self._ints = ints
        self._hash = None

    @property
    def coords(self):
        return tuple(BinaryForm(self.D, p) for p in self._polys)

    @property
    def polys(self):
        """Dehomogenized coordinates ``F_i(t, 1)``."""
        return self._polys

    @property
    def height(self):
        return self.D

    def integer_polys(self):
        """Integer polynomials proportional to the coordinates."""
        if self._ints is None:
            den = reduce(lambda a, b: a * b // a.gcd(b),
                         (p.denom() for p in self._polys), fmpz(1))
            self._ints = [(p * den).numer() for p in self._polys]
        return self._ints

    def bit_size(self):
        return sum(_bits(p) for p in self.integer_polys())

    def is_constant(self):
        return self.D == 0

    def __eq__(self, other):
        if not isinstance(other, PointFF):
            return NotImplemented
        return self.D == other.D and self._polys == other._polys

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.D,) + tuple(str(p) for p in self._polys))
        return self._hash

    def __repr__(self):
        return f"PointFF(({' : '.join(str(p) for p in self._polys)}), D={self.D})"


def normalize_point(coords):
    """Coprime, pivot-normalized point from n+1 binary forms of equal degree."""
    coords = list(coords)
    if len({c.degree for c in coords}) != 1:
        raise ValueError("all coordinates must have the same degree")
    if all(c.is_zero() for c in coords):
        raise AllZero("all coordinates vanish")
    D = coords[0].degree
    den = reduce(lambda a, b: a * b // a.gcd(b),
                 (c.poly.denom() for c in coords), fmpz(1))
    ints = [(c.poly * den).numer() for c in coords]
    polys, ints, D_new = _normalize_int(ints, D)
    return PointFF(polys, D_new, ints)


def point_from_rational_functions(fs):
    """Point of P^n(Q(t)) from n+1 rational functions (zero allowed)."""
    fs = [_as_rf(f) for f in fs]
    if all(f.is_zero() for f in fs):
        raise AllZero("all coordinates vanish")
    lcm = reduce(lambda a, b: a * b // a.gcd(b), (f.den for f in fs), fmpq_poly(1))
    nums = [f.num * (lcm // f.den) for f in fs]
    D = max(p.degree() for p in nums if not p.is_zero())
    return normalize_point([BinaryForm(D, p) for p in nums])


def point_from_polys(polys, D=None):
    """Point from dehomogenized coordinates, homogenized to degree D."""
    polys = [fmpq_poly(p) for p in polys]
    if D is None:
        D = max((p.degree() for p in polys if not p.is_zero()), default=0)
    return normalize_point([BinaryForm(D, p) for p in polys])


def constant_point(values):
    return point_from_polys([fmpq_poly([to_fmpq(v)]) for v in values], 0)


def to_rational_functions(P, chart=None):
    """Affine coordinates of P in Q(t).

    With ``chart=None`` the coordinates ``F_i(t, 1)`` are returned (a valid
    representation of the point); with ``chart=j`` every coordinate is
    divided by the j-th one, which must be nonzero.
    """
    fs = [RationalFunction(p) for p in P.polys]
    if chart is None:
        return fs
    if fs[chart].is_zero():
        raise ZeroDivisionError(f"coordinate {chart} vanishes")
    return [f / fs[chart] for f in fs]


# ---------------------------------------------------------------------------
# maps

def _x_degree(form, n):
    exps = form.monoms()[0]
    return int(sum(exps[:n + 1]))


def _is_x_homogeneous(form, n):
    degs = {sum(m[:n + 1]) for m in form.monoms()}
    return len(degs) <= 1


def _primitive_forms(forms):
    content = fmpz(0)
    for f in forms:
        if not f.is_zero():
            content = content.gcd(f.content())
    if content == 0:
        raise AllZero("all forms vanish")
    sign = 1
    for f in forms:
        if not f.is_zero():
            sign = -1 if f.leading_coefficient() < 0 else 1
            break
    scale = content * sign
    if scale != 1:
        forms = [f / scale if not f.is_zero() else f for f in forms]
    return forms


class SelfMapFF:
    """A rational self-map of P^n over Q(t), given by coprime forms.

    Parameters
    ----------
    forms : sequence of ``fmpz_mpoly`` or ``fmpq_mpoly``
        n+1 polynomials in ``map_context(n)``, homogeneous of one common
        degree in the x-variables.
    remove_content : bool
        Divide out the common factor of the forms (exactly).  Pass False only
        when the forms are already known to be coprime.
    dominant : bool or None
        Dominance is a precondition that is not verified here; the flag is
        recorded for reports.
    """

    def __init__(self, forms, *, remove_content=True, dominant=None,
                 content_provenance="exact"):
        forms = list(forms)
        n = len(forms) - 1
        if n < 1:
            raise ValueError("need at least two forms")
        ctx = map_context(n)
        converted = []
        for f in forms:
            if isinstance(f, fmpq_mpoly):
                den = reduce(lambda a, b: a * b // a.gcd(b),
                             (c.q for c in f.coeffs()), fmpz(1))
                f = ctx.from_dict({m: (c * den).p for m, c in f.to_dict().items()})
            elif isinstance(f, fmpz_mpoly):
                if f.context() is not ctx:
                    f = ctx.from_dict(f.to_dict())
            else:
                f = ctx.from_dict(f) if isinstance(f, dict) else ctx.constant(int(f))
            converted.append(f)
        if all(f.is_zero() for f in converted):
            raise AllZero("all forms vanish")
        if remove_content:
            converted = remove_common_factor(converted, n)
        converted = _primitive_forms(converted)
        degs = set()
        for f in converted:
            if f.is_zero():
                continue
            if not _is_x_homogeneous(f, n):
                raise ValueError("form is not homogeneous in the x-variables")
            degs.add(_x_degree(f, n))
        if len(degs) != 1:
            raise ValueError(f"forms have different degrees {sorted(degs)}")
        self.n = n
        self.forms = tuple(converted)
        self.d = degs.pop()
        self.e = int(max(f.degrees()[n + 1] for f in converted if not f.is_zero()))
        self.dominant = dominant
        self.content_provenance = content_provenance
        self._grouped = None

    @classmethod
    def from_terms(cls, n, forms, **kw):
        """Build from per-form dicts ``{x_exponents: coefficient}``.

        Coefficients may be ints, Fractions, or polynomials in t.
        """
        from flint import fmpq_mpoly_ctx
        qctx = fmpq_mpoly_ctx.get(variable_names(n) + ("t",), "lex")
        out = []
        for terms in forms:
            acc = {}
            for exps, c in terms.items():
                c = c.poly if isinstance(c, BinaryForm) else c
                if isinstance(c, (fmpq_poly, fmpz_poly)):
                    coeffs = fmpq_poly(c).coeffs()
                else:
                    coeffs = [to_fmpq(c)]
                for k, ck in enumerate(coeffs):
                    if ck != 0:
                        key = tuple(exps) + (k,)
                        acc[key] = acc.get(key, fmpq(0)) + ck
            out.append(qctx.from_dict(acc) if acc else qctx.from_dict({}))
        return cls(out, **kw)

    @classmethod
    def monomial(cls, B, coefficients=None, **kw):
        n = len(B) - 1
        coefficients = coefficients or [1] * (n + 1)
        return cls.from_terms(n, [{tuple(row): c} for row, c in zip(B, coefficients)], **kw)

    @classmethod
    def identity(cls, n):
        return cls.monomial([[int(i == j) for j in range(n + 1)] for i in range(n + 1)],
                            dominant=True)

    @property
    def context(self):
        return map_context(self.n)

    @property
    def bidegree(self):
        return (self.d, self.e)

    def grouped_terms(self):
        """Per form: list of ``(x_exponents, coefficient poly in t)``."""
        if self._grouped is None:
            n = self.n
            grouped = []
            for f in self.forms:
                acc = {}
                for m, c in zip(f.monoms(), f.coeffs()):
                    xs, k = tuple(int(v) for v in m[:n + 1]), int(m[n + 1])
                    acc.setdefault(xs, {})[k] = c
                grouped.append([(xs, fmpz_poly([cs.get(k, 0) for k in range(max(cs) + 1)]))
                                for xs, cs in sorted(acc.items())])
            self._grouped = grouped
        return self._grouped

    def terms(self):
        """Per form: dict x-monomial -> BinaryForm coefficient of degree e."""
        return [{xs: BinaryForm(self.e, fmpq_poly(c)) for xs, c in g}
                for g in self.grouped_terms()]

    def is_monomial(self):
        """Every form is a single monomial in the x-variables and t."""
        return all(len(g) <= 1 and (not g or sum(1 for c in g[0][1].coeffs() if c != 0) == 1)
                   for g in self.grouped_terms())

    def size_bits(self):
        total = 0
        for f in self.forms:
            if not f.is_zero():
                total += len(f) * max(max(int(abs(c)).bit_length() for c in f.coeffs()), 1)
        return total

    def n_terms(self):
        return sum(len(f) for f in self.forms)

    def key(self):
        """Stable text key identifying the map (used for caching)."""
        return f"P{self.n}:" + "|".join(str(f) for f in self.forms)

    def indeterminacy(self, m=1):
        return IndeterminacySet(self.forms, m)

    def __eq__(self, other):
        if not isinstance(other, SelfMapFF):
            return NotImplemented
        return self.n == other.n and self.forms == other.forms

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"SelfMapFF(P{self.n}, d={self.d}, e={self.e}, [{', '.join(map(str, self.forms))}])"


def remove_common_factor(forms, n):
    """Divide forms by their gcd in Z[x, t] (exact)."""
    nonzero = [f for f in forms if not f.is_zero()]
    g = nonzero[0]
    for f in nonzero[1:]:
        if g.is_constant():
            break
        g = g.gcd(f)
    if g.is_constant():
        return forms
    return [f if f.is_zero() else f / g for f in forms]


@dataclass(frozen=True)
class MonomialMap:
    """Exponent-matrix description of a monomial self-map of P^n.

    Row i holds the exponents of coordinate i; all rows share one sum d and
    every column has minimum 0 (no common monomial factor).
    """

    B: tuple

    def __post_init__(self):
        B = tuple(tuple(int(v) for v in row) for row in self.B)
        object.__setattr__(self, "B", B)
        if any(len(row) != len(B) for row in B):
            raise ValueError("exponent matrix must be square")
        if any(v < 0 for row in B for v in row):
            raise ValueError("exponents must be nonnegative")
        if len({sum(row) for row in B}) != 1:
            raise ValueError("rows must have a common degree")
        if any(min(col) > 0 for col in zip(*B)):
            raise ValueError("common monomial factor not removed")

    @classmethod
    def reduced(cls, B):
        mins = [min(col) for col in zip(*B)]
        return cls(tuple(tuple(v - m for v, m in zip(row, mins)) for row in B))

    @property
    def n(self):
        return len(self.B) - 1

    @property
    def d(self):
        return sum(self.B[0])

    def to_selfmap(self):
        return SelfMapFF.monomial(self.B)


@dataclass(frozen=True)
class IndeterminacySet:
    """Common zero locus of the (content-removed) forms of an iterate."""

    forms: tuple
    m: int = 1

    def contains(self, x, t0=1, t1=0):
        """Brute-force membership of ``(x ; (t0 : t1))`` in the locus."""
        return all(_evaluate_form(f, x, t0, t1) == 0 for f in self.forms)


def _evaluate_form(f, x, t0, t1):
    """Value of a homogenized form at rational ``x`` and place ``(t0 : t1)``."""
    n = len(x) - 1
    e = int(max(m[n + 1] for m in f.monoms())) if not f.is_zero() else 0
    total = Fraction(0)
    for m, c in zip(f.monoms(), f.coeffs()):
        term = Fraction(int(c))
        for xi, a in zip(x, m[:n + 1]):
            term *= Fraction(xi) ** int(a)
        k = int(m[n + 1])
        term *= Fraction(t0) ** k * Fraction(t1) ** (e - k)
        total += term
    return total


# ---------------------------------------------------------------------------
# evaluation

def _substitute(grouped, ints, const=fmpz_poly):
    """Substitute coordinate polynomials into grouped forms.

    ``const`` builds constant polynomials of the coordinates' ring, so the
    same code runs over Z[t] and over (Z/p)[t].
    """
    powers = {}

    def power(j, a):
        key = (j, a)
        if key not in powers:
            powers[key] = ints[j] ** a
        return powers[key]

    monos = {}
    out = []
    for terms in grouped:
        acc = const(0)
        for xs, c in terms:
            if xs not in monos:
                val = const(1)
                for j, a in enumerate(xs):
                    if a:
                        if ints[j].is_zero():
                            val = const(0)
                            break
                        val = val * power(j, a)
                monos[xs] = val
            val = monos[xs]
            if not val.is_zero():
                acc += c * val
        out.append(acc)
    return out


def _gcd_nmod(polys):
    g = polys[0]
    for p in polys[1:]:
        if g.degree() == 0:
            break
        g = g.gcd(p)
    return g


def reduce_mod_p(ints, D, prime):
    """Coordinates mod p if the reduction keeps degree D and coprimality, else None."""
    polys = [nmod_poly(p, prime) for p in ints]
    live = [p for p in polys if not p.is_zero()]
    if not live or max(p.degree() for p in live) != D or _gcd_nmod(live).degree() > 0:
        return None
    return polys


def grouped_mod_p(grouped, prime):
    return [[(xs, nmod_poly(c, prime)) for xs, c in terms] for terms in grouped]


def iterate_mod_p(grouped, d, e, polys, D, M, prime, max_height=None):
    """Yield ``(height, cancellation)`` for M steps of an orbit mod ``prime``.

    Yields ``(None, "hit")`` if every form vanishes on the current point and
    ``(None, "height")`` when the next height would exceed ``max_height``;
    iteration stops after either.
    """
    def const(k):
        return nmod_poly([k], prime)

    for _ in range(M):
        Dn = d * D + e
        if max_height is not None and Dn > max_height:
            yield None, "height"
            return
        out = _substitute(grouped, polys, const)
        live = [p for p in out if not p.is_zero()]
        if not live:
            yield None, "hit"
            return
        g = _gcd_nmod(live)
        if g.degree() > 0:
            out = [p if p.is_zero() else p // g for p in out]
        cut = g.degree() + min(Dn - p.degree() for p in live)
        D = Dn - cut
        polys = out
        yield D, cut


def substitute(forms_or_map, P):
    """Substituted coordinate forms ``F_i(P)`` as binary forms (no reduction)."""
    f = forms_or_map if isinstance(forms_or_map, SelfMapFF) else SelfMapFF(
        forms_or_map, remove_content=False)
    if f.n != P.n:
        raise DimensionMismatch(f"map on P^{f.n}, point in P^{P.n}")
    polys = _substitute(f.grouped_terms(), P.integer_polys())
    Dn = f.d * P.D + f.e
    return [BinaryForm(Dn, fmpq_poly(p)) for p in polys]


def evaluate(f, P):
    """Image of P under f together with the cancellation amount.

    Returns ``(image, c)`` with ``c = d*D + e - D_out >= 0``.  Raises
    :class:`IndeterminacyHit` when every substituted form is identically
    zero.
    """
    if f.n != P.n:
        raise DimensionMismatch(f"map on P^{f.n}, point in P^{P.n}")
    polys = _substitute(f.grouped_terms(), P.integer_polys())
    if all(p.is_zero() for p in polys):
        raise IndeterminacyHit()
    Dn = f.d * P.D + f.e
    coords, ints, D_out = _normalize_int(polys, Dn)
    return PointFF(coords, D_out, ints), Dn - D_out


def meets_indeterminacy(f, P):
    """Whether the section of P meets the indeterminacy locus of f.

    ``f`` is a SelfMapFF (or its content-removed forms).  True iff the
    forms ``F_i(P)`` share a zero on P^1, including ``t = oo``.
    """
    forms = substitute(f, P)
    if all(F.is_zero() for F in forms):
        return True
    return gcd_binaryforms([F for F in forms if not F.is_zero()]).degree > 0


# ---------------------------------------------------------------------------
# factored points for monomial maps

def coprime_basis(polys):
    """Pairwise coprime monic polynomials generating every input.

    Each nonconstant input equals a constant times a product of powers of
    basis elements.
    """
    work = [p / leading_coefficient(p) for p in polys if p.degree() > 0]
    basis = []
    while work:
        a = work.pop()
        if any(a == b for b in basis):
            continue
        for i, b in enumerate(basis):
            g = a.gcd(b)
            if g.degree() > 0:
                basis.pop(i)
                g = g / leading_coefficient(g)
                for piece in (g, a // g, b // g):
                    if piece.degree() > 0:
                        work.append(piece / leading_coefficient(piece))
                break
        else:
            basis.append(a)
    basis.sort(key=lambda p: (p.degree(), str(p)))
    return basis


def _exponents_in(p, basis):
    exps = []
    for q in basis:
        k = 0
        while p.degree() >= q.degree():
            quo, rem = divmod(p, q)
            if not rem.is_zero():
                break
            p = quo
            k += 1
        exps.append(k)
    if p.degree() != 0:
        raise ValueError("polynomial is not generated by the basis")
    return exps


@dataclass
class FactoredPoint:
    """A point whose coordinates are ``c_i * t1^a * prod q_k^(a_ik)``.

    Used to run orbits of monomial maps without expanding the coordinate
    forms.  ``basis`` always contains ``t``; the last exponent of every row
    belongs to the place at infinity (the factor ``t1``).
    """

    basis: tuple
    constants: tuple  # fmpq, or None for a zero coordinate
    exponents: tuple  # per coordinate: tuple of ints (len(basis) + 1) or None
    D: int
    degrees: tuple = field(init=False)

    def __post_init__(self):
        self.degrees = tuple(q.degree() for q in self.basis) + (1,)

    @classmethod
    def from_point(cls, P):
        nonzero = [p for p in P.polys if not p.is_zero()]
        basis = tuple(coprime_basis([T] + nonzero))
        consts, exps = [], []
        for p in P.polys:
            if p.is_zero():
                consts.append(None)
                exps.append(None)
                continue
            consts.append(leading_coefficient(p))
            exps.append(tuple(_exponents_in(p, basis)) + (P.D - p.degree(),))
        return cls(basis, tuple(consts), tuple(exps), P.D)

    @property
    def n(self):
        return len(self.constants) - 1

    def key(self):
        return (self.D, self.exponents, tuple(str(c) for c in self.constants))

    def to_point(self):
        polys = []
        for c, a in zip(self.constants, self.exponents):
            if c is None:
                polys.append(fmpq_poly(0))
                continue
            p = fmpq_poly([c])
            for q, k in zip(self.basis, a):
                if k:
                    p = p * q ** k
            polys.append(p)
        return point_from_polys(polys, self.D)

    def substituted(self, f):
        """Constants and exponent rows of ``F_i(P)`` before reduction."""
        t_index = next(i for i, q in enumerate(self.basis) if q == T)
        width = len(self.basis) + 1
        consts, rows = [], []
        for terms in f.grouped_terms():
            if not terms:
                consts.append(None)
                rows.append(None)
                continue
            (xs, c), = terms
            cs = c.coeffs()
            u = len(cs) - 1  # single nonzero coefficient sits at t^u
            const = fmpq(cs[u])
            row = [0] * width
            row[t_index] += u
            row[-1] += f.e - u
            zero = False
            for j, a in enumerate(xs):
                if not a:
                    continue
                if self.constants[j] is None:
                    zero = True
                    break
                const = const * self.constants[j] ** a
                for k, v in enumerate(self.exponents[j]):
                    row[k] += a * v
            consts.append(None if zero else const)
            rows.append(None if zero else row)
        return consts, rows

    def apply(self, f):
        """Image under a monomial map; returns ``(image, cancellation)``."""
        consts, rows = self.substituted(f)
        live = [r for r in rows if r is not None]
        if not live:
            raise IndeterminacyHit()
        mins = [min(col) for col in zip(*live)]
        cancel = sum(m * deg for m, deg in zip(mins, self.degrees))
        rows = [None if r is None else tuple(v - m for v, m in zip(r, mins)) for r in rows]
        pivot = next(c for c in consts if c is not None)
        consts = tuple(None if c is None else c / pivot for c in consts)
        Dn = f.d * self.D + f.e
        return FactoredPoint(self.basis, consts, tuple(rows), Dn - cancel), cancel

    def meets(self, f):
        """Monomial-map analogue of :func:`meets_indeterminacy`."""
        _, rows = self.substituted(f)
        live = [r for r in rows if r is not None]
        if not live:
            return True
        return any(min(col) > 0 for col in zip(*live))
