"""Orbits, arithmetic-degree estimates and bounded certificates.

The arithmetic degree of f at P is the growth rate of ``h^+(f^m(P))`` with
``h^+ = max(h, 1)``.  Every check in this module is a finite-window
statement: it certifies what happens up to the iteration bound M and never
claims more.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations_with_replacement

from flint import fmpq_poly, fmpz_poly, nmod, nmod_mat, nmod_poly

from .dynamics import (
    DEFAULT_BUDGET, IterateCache, degree_sequence, delta_estimate, extend_by_lines,
)
from .errors import IndeterminacyHit, ResourceLimit, TooFewPoints, TooShort
from .estimates import geometric_ratio, ratio_series, root_series, window_bounds
from .exact import RationalFunction
from .heights import height_plus
from .projective import (
    FactoredPoint, evaluate, grouped_mod_p, iterate_mod_p, meets_indeterminacy, reduce_mod_p,
    variable_names,
)

log = logging.getLogger(__name__)


@dataclass
class OrbitRecord:
    """Heights ``h_0..h_M`` of an orbit and what happened along the way.

    ``cancellations[m-1]`` is the deficit of ``h_m`` below ``d*h_(m-1) + e``.
    ``period`` is ``(preperiod, period)`` when the orbit was seen to repeat;
    heights past the repetition are filled in from it.  ``truncated`` holds
    the reason when a budget stopped the iteration early.  Heights up to
    index ``certified_to`` are proven exact; later ones (from a modular run
    confirmed by a second prime) are correct with high probability.
    """

    heights: list
    cancellations: list = field(default_factory=list)
    indeterminacy_hit: int = None
    period: tuple = None
    points: list = None
    truncated: str = None
    bidegree: tuple = None
    certified_to: int = None
    method: str = "exact"

    def __post_init__(self):
        if self.certified_to is None:
            self.certified_to = len(self.heights) - 1

    @property
    def steps(self):
        return len(self.heights) - 1

    @property
    def exact(self):
        return self.certified_to >= self.steps

    def scaled(self, factor):
        """Copy with every height multiplied (models replacing O(1) by O(k))."""
        return OrbitRecord([factor * h for h in self.heights],
                           [factor * c for c in self.cancellations],
                           self.indeterminacy_hit, self.period, None, self.truncated,
                           self.bidegree, self.certified_to, self.method)


MODULAR_PRIMES = (2 ** 31 - 1, 2 ** 31 - 19, 2 ** 31 - 61, 2 ** 31 - 69)
EXACT_PREFIX_BITS = 2 ** 20


def orbit(f, P, M, keep_points=False, budget=DEFAULT_BUDGET, fast=True, method="auto"):
    """Iterate f on P up to M times.

    ``method`` picks the arithmetic:

    * ``"exact"`` iterates over Q(t); monomial maps use a factored
      representation of the point (``fast=True``) that never expands forms.
    * ``"modular"`` iterates over Q(t) while the point is small, then
      continues modulo a 61-bit prime from the last exact point.  Reduction
      can only lower heights and ``h_m <= d*h_(m-1) + e`` always holds, so
      every modular step before the first cancellation seen mod p is proven
      exact.  Later steps are accepted when a second prime agrees.
    * ``"auto"`` is ``"exact"`` for monomial maps, constant points and
      ``keep_points``, and ``"modular"`` otherwise.

    Raises :class:`ResourceLimit` with the partial record on budget exhaustion.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if method not in ("auto", "exact", "modular"):
        raise ValueError(f"unknown orbit method {method!r}")
    if method == "exact" or (method == "auto" and (
            keep_points or P.D == 0 or (fast and f.is_monomial()))):
        return _exact_orbit(f, P, M, keep_points, budget, fast)
    small = replace(budget, max_bits=min(budget.max_bits, EXACT_PREFIX_BITS))
    try:
        return _exact_orbit(f, P, M, False, small, fast)
    except ResourceLimit as exc:
        prefix = exc.partial
        if budget.max_bits <= EXACT_PREFIX_BITS or "height" in prefix.truncated:
            raise
    start = prefix.last_point
    runs = []
    for prime in MODULAR_PRIMES:
        run = _modular_orbit(f, start, M - prefix.steps, prime, budget)
        if run is None:
            continue
        if run.exact and run.indeterminacy_hit is None:
            return _join(prefix, run, "exact, then modular")
        runs.append(run)
        if len(runs) == 2:
            a, b = runs
            if (a.heights == b.heights and a.indeterminacy_hit is None
                    and b.indeterminacy_hit is None):
                a.certified_to = max(a.certified_to, b.certified_to)
                return _join(prefix, a, "exact, then modular with two primes")
            break
    return _exact_orbit(f, P, M, False, budget, fast)


def _join(prefix, tail, method):
    k = prefix.steps
    return OrbitRecord(prefix.heights + tail.heights[1:],
                       prefix.cancellations + tail.cancellations,
                       bidegree=prefix.bidegree, certified_to=k + tail.certified_to,
                       method=method)


def _modular_orbit(f, P, M, prime, budget):
    """Orbit heights of the reduction mod ``prime``; None for a bad reduction."""
    start = reduce_mod_p(P.integer_polys(), P.D, prime)
    if start is None:
        return None
    rec = OrbitRecord([P.D], bidegree=(f.d, f.e), method="modular")
    grouped = grouped_mod_p(f.grouped_terms(), prime)
    clean = True
    for m, (D, cut) in enumerate(iterate_mod_p(grouped, f.d, f.e, start, P.D, M, prime,
                                               budget.max_height), 1):
        if D is None:
            if cut == "hit":
                rec.indeterminacy_hit = m
                break
            rec.truncated = f"height budget at step {m}"
            raise ResourceLimit(rec.truncated, partial=rec)
        rec.heights.append(D)
        rec.cancellations.append(cut)
        clean = clean and not cut
        if clean:
            rec.certified_to = m
    if clean:
        rec.certified_to = rec.steps
    return rec


def _exact_orbit(f, P, M, keep_points, budget, fast):
    d, e = f.d, f.e
    factored = fast and f.is_monomial()
    cur = FactoredPoint.from_point(P) if factored else P
    rec = OrbitRecord([P.D], bidegree=(d, e))
    rec.last_point = P
    if keep_points:
        rec.points = [P]
    seen = {P.D: [(0, cur)]}
    for m in range(1, M + 1):
        h = rec.heights[-1]
        if d * h + e > budget.max_height:
            rec.truncated = f"height budget at step {m}"
            raise ResourceLimit(rec.truncated, partial=rec)
        size = (sum(int(c.p).bit_length() + int(c.q).bit_length()
                    for c in cur.constants if c is not None) if factored else cur.bit_size())
        if size * max(d, 1) > budget.max_bits:
            rec.truncated = f"bit budget at step {m}"
            raise ResourceLimit(rec.truncated, partial=rec)
        try:
            cur, c = cur.apply(f) if factored else evaluate(f, cur)
        except IndeterminacyHit:
            rec.indeterminacy_hit = m
            break
        rec.heights.append(cur.D)
        rec.cancellations.append(c)
        rec.certified_to = m
        rec.last_point = cur
        if keep_points:
            if factored and _expanded_bits(cur) > budget.max_bits:
                rec.truncated = f"bit budget for expanded point at step {m}"
                raise ResourceLimit(rec.truncated, partial=rec)
            rec.points.append(cur.to_point() if factored else cur)
        same = seen.setdefault(cur.D, [])
        match = next((j for j, q in same if (q.key() == cur.key() if factored else q == cur)),
                     None)
        if match is not None:
            rec.period = (match, m - match)
            _extend_periodic(rec, M)
            break
        same.append((m, cur))
    return rec


def _expanded_bits(F):
    """Upper bound on the coefficient bits of a factored point once expanded.

    Uses ``|prod q^a|_inf <= prod |q|_1^a`` on the integer forms of the basis.
    """
    logs = [math.log2(max(sum(abs(int(c)) for c in q.numer().coeffs()), 2)) +
            int(q.denom()).bit_length() for q in F.basis] + [0.0]
    total = 0.0
    for c, row in zip(F.constants, F.exponents):
        if c is None:
            continue
        per = int(c.p).bit_length() + int(c.q).bit_length() + sum(
            a * w for a, w in zip(row, logs))
        total += per * (F.D + 1)
    return total


def _extend_periodic(rec, M):
    pre, p = rec.period
    while rec.steps < M:
        m = rec.steps + 1
        rec.certified_to = m
        src = pre + (m - pre) % p
        rec.heights.append(rec.heights[src])
        rec.cancellations.append(rec.cancellations[src - 1] if src >= 1
                                 else rec.cancellations[src + p - 1])
        if rec.points is not None:
            rec.points.append(rec.points[src])


@dataclass
class AlphaEstimate:
    root_series: list
    ratio_series: list
    window_limsup: float
    window_liminf: float
    exact: Fraction = None

    @property
    def value(self):
        return float(self.exact) if self.exact is not None else self.window_limsup


def alpha_estimate(rec):
    """Arithmetic-degree estimators for an orbit record.

    The exact value is reported when the orbit is periodic (1), or when
    ``h^+`` is geometric over the tail window (its ratio; constant heights
    give 1).
    """
    heights = rec.heights if isinstance(rec, OrbitRecord) else list(rec)
    if len(heights) < 2:
        raise TooShort("need at least two heights")
    hp = [height_plus(h) for h in heights]
    roots = root_series(hp, start=0)
    ratios = ratio_series(hp)
    hi, lo = window_bounds(ratios)
    if isinstance(rec, OrbitRecord) and rec.period is not None:
        exact = Fraction(1)
    else:
        exact = geometric_ratio(hp)
    return AlphaEstimate(roots, ratios, hi, lo, exact)


# ---------------------------------------------------------------------------
# checks

@dataclass
class InequalityReport:
    alpha_hat: float
    delta_hat: float
    tol: float
    passed: bool
    alpha: AlphaEstimate
    delta: object
    orbit: OrbitRecord
    degrees: object

    @property
    def verdict(self):
        return "PASS" if self.passed else "VIOLATION"


def check_fundamental_inequality(f, P, M, tol=1e-2, budget=DEFAULT_BUDGET,
                                 strategy="auto", cache=None):
    """Compare the orbit growth of P with the degree growth of f.

    A failure means ``alpha_hat > delta_hat + tol``; since the inequality
    holds for every point whose orbit avoids the indeterminacy locus, a
    failure is logged as a sign of an implementation problem.
    """
    try:
        rec = orbit(f, P, M, budget=budget)
    except ResourceLimit as exc:
        rec = exc.partial
    alpha = alpha_estimate(rec)
    try:
        seq = degree_sequence(f, M, budget, strategy, cache)
    except ResourceLimit as exc:
        seq = extend_by_lines(exc.partial, f, M)
    delta = delta_estimate(seq)
    a, dl = alpha.value, delta.value
    ok = a <= dl + tol
    if not ok:
        log.error("growth-rate inequality violated (alpha %.6f > delta %.6f): "
                  "implementation error suspected", a, dl)
    return InequalityReport(a, dl, tol, ok, alpha, delta, rec, seq)


@dataclass
class SufficientConditionCertificate:
    """Finite certificate for the premises of the equality criterion.

    ``positivity``: the section is non-constant (height >= 1), which on
    P^n x P^1 is the same as meeting every nonzero pseudo-effective class
    positively.  ``avoidance_certified_to``: largest m <= M such that the
    section misses the indeterminacy locus of every iterate up to m.
    """

    positivity: bool
    avoidance_certified_to: int
    M: int
    first_meeting: int = None
    methods: list = field(default_factory=list)
    pullback_identity: list = field(default_factory=list)

    @property
    def holds(self):
        return self.positivity and self.avoidance_certified_to >= self.M

    @property
    def summary(self):
        if self.holds:
            return f"premises certified to M={self.M}: expect alpha = delta"
        if not self.positivity:
            return "section is constant: equality criterion does not apply"
        if self.first_meeting is not None:
            return f"section meets the indeterminacy locus of iterate {self.first_meeting}"
        return f"avoidance certified only to m={self.avoidance_certified_to}"


def check_sufficient_condition(f, P, M, budget=DEFAULT_BUDGET, strategy="auto",
                               cache=None, record=None):
    """Bounded check of: P non-constant and its section avoids every I(f^m).

    Avoidance is certified stepwise while the orbit shows no cancellation
    (if f^(j-1)(P) misses I(f) for all j <= m, then P misses I(f^m)), and
    otherwise by substituting P into the content-removed iterate f^m.
    """
    positivity = P.D >= 1
    cache = cache or IterateCache(f, budget, strategy)
    if record is None:
        try:
            record = orbit(f, P, M, budget=budget)
        except ResourceLimit as exc:
            record = exc.partial
    clean = 0
    for c in record.cancellations[:record.certified_to]:
        if c != 0:
            break
        clean += 1
    if record.indeterminacy_hit is not None:
        clean = min(clean, record.indeterminacy_hit - 1)
    cert = SufficientConditionCertificate(positivity, 0, M)
    factored = FactoredPoint.from_point(P) if f.is_monomial() else None
    for m in range(1, M + 1):
        if m <= clean:
            cert.methods.append("stepwise")
        else:
            try:
                it = cache.get(m)
                meets = factored.meets(it) if factored is not None else meets_indeterminacy(it, P)
            except ResourceLimit:
                cert.methods.append("budget")
                break
            if meets:
                cert.first_meeting = m
                cert.methods.append("iterate: meets")
                break
            cert.methods.append("iterate")
        cert.avoidance_certified_to = m
        if m in cache._iterates and m < len(record.heights):
            it = cache._iterates[m]
            cert.pullback_identity.append(
                (m, record.heights[m], it.d * P.D + it.e))
    return cert


@dataclass
class GrowthPremiseReport:
    schedule: list
    nonconstant_through: int
    gaps_avoid: list
    ratios: list
    note: str = ("the limit condition m_k/m_(k+1) -> 0 concerns an infinite schedule "
                 "and cannot be certified from finitely many terms")


def check_growth_premises(f, P, schedule, budget=DEFAULT_BUDGET, strategy="auto"):
    """Check the finite part of the schedule-based premises.

    For ``m_1 < ... < m_r``: every ``f^m(P)`` with ``m <= m_r`` must be
    non-constant, and each ``f^(m_k)(P)`` must avoid the indeterminacy of
    ``f^(m_(k+1) - m_k)``.  ``gaps_avoid[k]`` is True/False, or None when a
    budget prevented the decision.
    """
    schedule = sorted(set(int(m) for m in schedule))
    if not schedule or schedule[0] < 1:
        raise ValueError("schedule must be positive integers")
    try:
        rec = orbit(f, P, schedule[-1], keep_points=True, budget=budget)
    except ResourceLimit as exc:
        rec = exc.partial
    nonconstant = 0
    for m, h in enumerate(rec.heights):
        if h < 1:
            break
        nonconstant = m
    cache = IterateCache(f, budget, strategy)
    gaps = []
    for a, b in zip(schedule, schedule[1:]):
        if rec.points is None or a >= len(rec.points):
            gaps.append(None)
            continue
        try:
            gaps.append(not meets_indeterminacy(cache.get(b - a), rec.points[a]))
        except ResourceLimit:
            gaps.append(None)
    ratios = [a / b for a, b in zip(schedule, schedule[1:])]
    return GrowthPremiseReport(schedule, nonconstant, gaps, ratios)


# ---------------------------------------------------------------------------
# density heuristic

@dataclass
class DensityVerdict:
    contained: bool
    degree: int
    witness: list = None  # [(x-exponents, coefficient poly in t)]

    def __str__(self):
        if self.contained:
            return f"CONTAINED(degree {self.degree})"
        return f"NOT_CONTAINED(up to degree {self.degree})"


def _monomials(n, b):
    out = []
    for combo in combinations_with_replacement(range(n + 1), b):
        exps = [0] * (n + 1)
        for j in combo:
            exps[j] += 1
        out.append(tuple(exps))
    return sorted(out, reverse=True)


def _bareiss(rows):
    """Fraction-free row echelon form over Z[t]; returns (rows, pivots)."""
    A = [list(r) for r in rows]
    k, N = len(A), len(A[0])
    prev = fmpz_poly(1)
    r = 0
    pivots = []
    for c in range(N):
        i = next((i for i in range(r, k) if not A[i][c].is_zero()), None)
        if i is None:
            continue
        A[r], A[i] = A[i], A[r]
        for i in range(r + 1, k):
            for j in range(c + 1, N):
                A[i][j] = (A[r][c] * A[i][j] - A[i][c] * A[r][j]) / prev
            A[i][c] = fmpz_poly(0)
        prev = A[r][c]
        pivots.append(c)
        r += 1
        if r == k:
            break
    return A[:r], pivots


def _kernel_vector(echelon, pivots, N):
    free = next(c for c in range(N) if c not in pivots)
    x = [RationalFunction(0)] * N
    x[free] = RationalFunction(1)
    for row, p in reversed(list(zip(echelon, pivots))):
        acc = RationalFunction(0)
        for j in range(p + 1, N):
            if not row[j].is_zero() and not x[j].is_zero():
                acc = acc + x[j] * RationalFunction(fmpq_poly(row[j]))
        x[p] = -acc / RationalFunction(fmpq_poly(row[p]))
    den = fmpq_poly(1)
    for v in x:
        den = den * v.den // den.gcd(v.den)
    return [v.num * (den // v.den) for v in x]


_PRIME = 2 ** 61 - 1


def _specialized_rank(points, monos, tau):
    """Rank of the evaluation matrix at ``t = tau`` modulo a large prime.

    It never exceeds the rank over Q(t), so a full rank here is a proof.
    """
    vals = [[nmod_poly(list(map(int, p.coeffs())), _PRIME)(nmod(tau, _PRIME)) if not p.is_zero()
             else nmod(0, _PRIME) for p in P.integer_polys()] for P in points]
    rows = []
    for v in vals:
        row = []
        for exps in monos:
            acc = nmod(1, _PRIME)
            for j, a in enumerate(exps):
                if a:
                    acc *= v[j] ** a
            row.append(int(acc))
        rows.append(row)
    return nmod_mat(rows, _PRIME).rank()


def orbit_density_heuristic(points, degree_bound):
    """Whether the points lie on a common hypersurface of degree <= bound.

    The test is exact linear algebra over Q(t): the points fail to impose
    independent conditions on forms of degree b exactly when the evaluation
    matrix of the degree-b monomials has a nonzero kernel.  A full rank at a
    specialization of t modulo a prime settles the question cheaply; only
    rank-deficient cases go through fraction-free elimination over Z[t].
    """
    points = list(points)
    if len(points) < 2:
        raise TooFewPoints("need at least two points")
    n = points[0].n
    if any(P.n != n for P in points):
        raise ValueError("points live in different projective spaces")
    for b in range(1, degree_bound + 1):
        monos = _monomials(n, b)
        if len(points) >= len(monos) and _specialized_rank(points, monos, 1009) == len(monos):
            continue
        rows = []
        for P in points:
            ints = P.integer_polys()
            row = []
            for exps in monos:
                v = fmpz_poly(1)
                for j, a in enumerate(exps):
                    if a:
                        v = v * ints[j] ** a
                row.append(v)
            rows.append(row)
        echelon, pivots = _bareiss(rows)
        if len(pivots) < len(monos):
            coeffs = _kernel_vector(echelon, pivots, len(monos))
            witness = [(m, c) for m, c in zip(monos, coeffs) if not c.is_zero()]
            return DensityVerdict(True, b, witness)
    return DensityVerdict(False, degree_bound)


def format_witness(witness, n):
    names = variable_names(n)
    parts = []
    for exps, c in witness:
        mono = "*".join(f"{v}^{a}" if a > 1 else v for v, a in zip(names, exps) if a)
        parts.append(f"({str(c).replace('x', 't')})*{mono}")
    return " + ".join(parts)
