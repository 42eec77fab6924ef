"""Iterates, degree sequences and dynamical-degree estimates.

For a self-map f of P^n over Q(t) the m-th iterate, after removing the
common factor of its forms, has bidegree ``(d_m, e_m)``: ``d_m`` is the
degree of the pulled-back hyperplane class and ``e_m`` the multiplicity of
the fibre class.  The dynamical degree is ``lim d_m^(1/m)``.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from flint import fmpz_poly, nmod_poly

from .errors import AllZero, DimensionMismatch, ResourceLimit
from .estimates import (
    eventual_period, geometric_ratio, ratio_series, root_series, tail, window_bounds,
)
from .projective import (
    MonomialMap, SelfMapFF, iterate_mod_p, map_context, remove_common_factor,
)


@dataclass(frozen=True)
class Budget:
    """Hard caps protecting exact computations from exponential blow-up."""

    max_degree: int = 10 ** 4
    max_bits: int = 2 ** 26
    max_height: int = 10 ** 6


DEFAULT_BUDGET = Budget()


# ---------------------------------------------------------------------------
# content removal

def _restrict_to_line(f, a, b, tau):
    """Forms restricted to ``x = a*s + b`` at ``t = tau`` (polys in s)."""
    line = [fmpz_poly([int(bj), int(aj)]) for aj, bj in zip(a, b)]
    out = []
    for terms in f.grouped_terms():
        acc = fmpz_poly(0)
        for xs, c in terms:
            val = fmpz_poly([int(c(tau))])
            for j, k in enumerate(xs):
                if k:
                    val = val * line[j] ** k
            acc += val
        out.append(acc)
    return out


def _restrict_to_point(f, x):
    out = []
    for terms in f.grouped_terms():
        acc = fmpz_poly(0)
        for xs, c in terms:
            acc += c * int(np.prod([int(xj) ** k for xj, k in zip(x, xs)], dtype=object))
        out.append(acc)
    return out


def _common_degree(polys, declared):
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        return declared
    g = nonzero[0]
    for p in nonzero[1:]:
        g = g.gcd(p)
    return max(g.degree(), 0) + min(declared - p.degree() for p in nonzero)


def certify_coprime(f, trials=3, rng=None):
    """Probabilistic check that the forms of ``f`` share no factor.

    Each trial restricts the forms to a random line at a random fibre and to
    a random constant x.  A common factor involving x shows up on every
    line, a factor in t alone on every constant x, so a factor is reported
    only when all trials of one kind see a shared zero; a single hit can be
    a line or fibre that happens to meet the indeterminacy locus.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    n = f.n
    line_hits = point_hits = 0
    for _ in range(trials):
        a = rng.integers(-50, 51, size=n + 1)
        b = rng.integers(-50, 51, size=n + 1)
        tau = int(rng.integers(-50, 51))
        line_hits += _common_degree(_restrict_to_line(f, a, b, tau), f.d) > 0
        c = rng.integers(-50, 51, size=n + 1)
        point_hits += _common_degree(_restrict_to_point(f, c), f.e) > 0
    return line_hits < trials and point_hits < trials


def compose(f, g, strategy="auto", rng=None):
    """The map ``f o g`` with the common factor of its forms removed.

    ``strategy`` selects content removal: ``"exact"`` uses a multivariate
    gcd; ``"probabilistic"`` first runs :func:`certify_coprime` and only
    falls back to the exact gcd when it detects a common factor; ``"auto"``
    is exact for n <= 2 and probabilistic above.
    """
    if f.n != g.n:
        raise DimensionMismatch(f"P^{f.n} and P^{g.n}")
    n = f.n
    ctx = map_context(n)
    subs = list(g.forms) + [ctx.gens()[-1]]
    raw = [F.compose(*subs) if not F.is_zero() else F for F in f.forms]
    if all(F.is_zero() for F in raw):
        raise AllZero("composite has all forms zero (inner map not dominant)")
    if strategy == "auto":
        strategy = "exact" if n <= 2 else "probabilistic"
    if strategy == "probabilistic":
        trial = SelfMapFF(raw, remove_content=False)
        if certify_coprime(trial, rng=rng):
            trial.content_provenance = "probabilistic"
            trial.dominant = f.dominant and g.dominant
            return trial
    elif strategy != "exact":
        raise ValueError(f"unknown content strategy {strategy!r}")
    reduced = remove_common_factor(raw, n)
    return SelfMapFF(reduced, remove_content=False,
                     dominant=f.dominant and g.dominant)


def predicted_bits(f, g):
    """Rough upper estimate of the size of ``f o g`` in coefficient bits."""
    n = f.n
    d = f.d * g.d
    e = f.e + f.d * g.e
    dense = math.comb(d + n, n) * (e + 1)
    per_form_g = max(g.n_terms() / (n + 1), 1)
    sparse = f.n_terms() * math.comb(int(per_form_g) + f.d - 1, f.d) * (f.e + 1)
    terms = min(dense, max(sparse, 1))
    bits_g = g.size_bits() / max(g.n_terms(), 1)
    bits_f = f.size_bits() / max(f.n_terms(), 1)
    coeff_bits = bits_f + f.d * (bits_g + math.log2(per_form_g + 1)) + math.log2(f.n_terms() + 1)
    return terms * coeff_bits


class IterateCache:
    """Memoized content-removed iterates ``f^m``.

    ``f^(2k)`` is built as ``f^k o f^k`` and ``f^(2k+1)`` as ``f o f^(2k)``.
    An optional ``store`` (see :class:`ffdyn.experiments.IterateStore`)
    persists iterates on disk keyed by the map and m.
    """

    def __init__(self, f, budget=DEFAULT_BUDGET, strategy="auto", seed=0, store=None):
        self.f = f
        self.budget = budget
        self.strategy = strategy
        self.rng = np.random.default_rng(seed)
        self.store = store
        self._iterates = {1: f}

    def get(self, m):
        if m < 1:
            raise ValueError("iterates start at m = 1")
        if m in self._iterates:
            return self._iterates[m]
        if self.store is not None:
            cached = self.store.get(self.f, m)
            if cached is not None:
                self._iterates[m] = cached
                return cached
        if m % 2 == 0:
            a = b = self.get(m // 2)
        else:
            a, b = self.f, self.get(m - 1)
        if a.d * b.d > self.budget.max_degree:
            raise ResourceLimit(f"iterate {m}: degree {a.d * b.d} exceeds budget")
        if predicted_bits(a, b) > self.budget.max_bits:
            raise ResourceLimit(f"iterate {m}: predicted size exceeds bit budget")
        it = compose(a, b, self.strategy, self.rng)
        if it.size_bits() > self.budget.max_bits:
            raise ResourceLimit(f"iterate {m}: size {it.size_bits()} bits exceeds budget")
        self._iterates[m] = it
        if self.store is not None:
            self.store.put(self.f, m, it)
        return it

    def computed(self):
        return sorted(self._iterates)


@dataclass
class DegreeSequence:
    """Bidegrees ``(d_m, e_m)`` of the iterates ``m = 1..len(d)``."""

    d: list = field(default_factory=list)
    e: list = field(default_factory=list)
    certified: list = field(default_factory=list)
    requested: int = 0

    def __len__(self):
        return len(self.d)

    @property
    def complete(self):
        return len(self.d) >= self.requested

    def submultiplicativity_violations(self):
        """Pairs ``(m, k)`` with ``d_(m+k) > d_m * d_k`` inside the window."""
        bad = []
        L = len(self.d)
        for m in range(1, L + 1):
            for k in range(1, L + 1 - m):
                if self.d[m + k - 1] > self.d[m - 1] * self.d[k - 1]:
                    bad.append((m, k))
        return bad


def degree_sequence(f, M, budget=DEFAULT_BUDGET, strategy="auto", cache=None):
    """Degree sequence of the first M iterates of f.

    Raises :class:`ResourceLimit` when a budget is exceeded; its ``partial``
    attribute holds the sequence computed so far.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    cache = cache or IterateCache(f, budget, strategy)
    seq = DegreeSequence(requested=M)
    for m in range(1, M + 1):
        try:
            it = cache.get(m)
        except ResourceLimit as exc:
            exc.partial = seq
            raise
        seq.d.append(it.d)
        seq.e.append(it.e)
        seq.certified.append(it.content_provenance)
    return seq


LINE_PRIMES = (2**31 - 1, 2**31 - 19, 2**31 - 61)


def degree_sequence_by_lines(f, M, trials=2, seed=0):
    """Degree sequence from the orbit of a random line, mod p and at random t.

    Pushing a generic line forward m times yields a curve whose degree is
    ``d_m`` of the specialized map, a lower bound for ``d_m`` that is
    attained for generic choices.  The elementwise maximum over ``trials``
    independent probes is returned, marked probabilistic.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    rng = np.random.default_rng(seed)
    best = [0] * M
    for k in range(trials):
        prime = LINE_PRIMES[k % len(LINE_PRIMES)]
        tau = int(rng.integers(1, 2**31))
        grouped = [[(xs, nmod_poly([int(c(tau)) % prime], prime)) for xs, c in terms]
                   for terms in f.grouped_terms()]
        line = [nmod_poly([int(rng.integers(0, 2**62)) % prime,
                           int(rng.integers(1, 2**62)) % prime], prime)
                for _ in range(f.n + 1)]
        for m, (D, _) in enumerate(iterate_mod_p(grouped, f.d, 0, line, 1, M, prime)):
            if D is None:
                break
            best[m] = max(best[m], D)
    return DegreeSequence(best, [None] * M, ["probabilistic"] * M, M)


def extend_by_lines(seq, f, M, seed=0):
    """Fill a truncated exact sequence up to M with line-probe degrees.

    Raises ValueError if the probe disagrees with an exactly computed entry.
    """
    if len(seq) >= M:
        return seq
    probe = degree_sequence_by_lines(f, M, seed=seed)
    for m, (a, b) in enumerate(zip(seq.d, probe.d), 1):
        if a != b:
            raise ValueError(f"line probe gives d_{m} = {b}, exact value is {a}")
    k = len(seq)
    return DegreeSequence(seq.d + probe.d[k:], seq.e + probe.e[k:],
                          seq.certified + probe.certified[k:], M)


def monomial_degree_sequence(B, M):
    """Degree sequence of a monomial map from exponent-matrix products."""
    if not isinstance(B, MonomialMap):
        B = MonomialMap(B)
    base = [list(row) for row in B.B]
    cur = [list(row) for row in base]
    seq = DegreeSequence(requested=M)
    for m in range(1, M + 1):
        if m > 1:
            prod = [[sum(base[i][j] * cur[j][k] for j in range(len(base)))
                     for k in range(len(base))] for i in range(len(base))]
            mins = [min(col) for col in zip(*prod)]
            cur = [[v - mn for v, mn in zip(row, mins)] for row in prod]
        seq.d.append(sum(cur[0]))
        seq.e.append(0)
        seq.certified.append("exact")
    return seq


@dataclass
class DegreeEstimate:
    """Dynamical-degree estimates from a finite degree sequence.

    ``exact`` is set when the sequence is eventually periodic (limit 1) or
    geometric over its tail window.  Otherwise ``value`` is the largest
    ratio in the tail window, the same statistic used for orbit growth.
    """

    root_estimates: list
    ratio_estimates: list
    final: float
    window_limsup: float
    window_liminf: float
    exact: Fraction = None
    period: tuple = None

    @property
    def value(self):
        return float(self.exact) if self.exact is not None else self.window_limsup


def delta_estimate(seq):
    d = list(seq.d if isinstance(seq, DegreeSequence) else seq)
    if not d:
        raise ValueError("empty degree sequence")
    roots = root_series(d, start=1)
    ratios = ratio_series(d)
    exact = None
    period = eventual_period(d) if len(d) >= 2 else None
    r = geometric_ratio(d)
    if r is not None:
        exact = r
    elif period is not None:
        exact = Fraction(1)
    if exact is not None and exact == 1 and period is None and len(d) >= 2:
        period = (0, 1)
    series = ratios or roots
    hi, lo = window_bounds(series)
    final = series[-1]
    return DegreeEstimate(roots, ratios, final, hi, lo, exact, period)
