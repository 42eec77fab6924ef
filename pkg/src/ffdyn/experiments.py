"""Seeded experiments: section sampling, random suites, records and caching."""

import hashlib
import itertools
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from flint import fmpq_poly, nmod_mat

from .dynamics import (
    Budget, IterateCache, degree_sequence, delta_estimate, extend_by_lines,
    monomial_degree_sequence,
)
from .errors import AllZero, ResourceLimit, SamplingExhausted
from .orbits import alpha_estimate, check_sufficient_condition, orbit
from .projective import MonomialMap, SelfMapFF, map_context, point_from_polys

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_ATTEMPTS = 1000


@dataclass
class ExperimentConfig:
    seed: int = 0
    n: int = None
    map: str = None
    map_file: str = None
    points: list = field(default_factory=list)
    M: int = 8
    B: int = 5
    degree: int = 2
    count: int = 100
    tol: float = 1e-2
    max_height: int = Budget.max_height
    max_bits: int = Budget.max_bits
    max_degree: int = Budget.max_degree
    format: str = "json"
    jobs: int = 1
    cache_dir: str = None
    timing: bool = False

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("section degree must be >= 1")
        if self.count < 1:
            raise ValueError("sample count must be >= 1")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.format not in ("json", "csv", "human"):
            raise ValueError(f"unknown format {self.format!r}")

    @property
    def budget(self):
        return Budget(self.max_degree, self.max_bits, self.max_height)

    def echo(self):
        out = {k: v for k, v in asdict(self).items() if v is not None and k != "timing"}
        out.pop("cache_dir", None)
        out.pop("jobs", None)
        return out


_LIST_KEYS = {"points"}


def read_config_file(path):
    """Flat ``key = value`` file; ``#`` comments; ``point`` may repeat."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key in ("point", "points"):
                values.setdefault("points", []).append(value)
            else:
                values[key] = value
    return values


def make_config(file_values=None, overrides=None):
    """Merge file values and flag overrides (flags win), coercing types."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    kw = {}
    for key, value in merged.items():
        if key not in kinds:
            raise ValueError(f"unknown config key {key!r}")
        kind = kinds[key]
        if key in _LIST_KEYS:
            kw[key] = list(value)
        elif kind is bool and isinstance(value, str):
            kw[key] = value.lower() in ("1", "true", "yes", "on")
        elif kind in (int, float) and isinstance(value, str):
            kw[key] = kind(float(value)) if kind is int and "e" in value.lower() else kind(value)
        else:
            kw[key] = value
    return ExperimentConfig(**kw)


# ---------------------------------------------------------------------------
# sampling

def random_section(rng, n, degree, B):
    """One section of exact degree ``degree``, or None if the draw is rejected."""
    coeffs = rng.integers(-B, B + 1, size=(n + 1, degree + 1))
    polys = [fmpq_poly([int(c) for c in row]) for row in coeffs]
    try:
        P = point_from_polys(polys, degree)
    except AllZero:
        return None
    return P if P.D == degree else None


def sample_sections(config=None, *, n=None, degree=None, count=None, B=None, seed=None):
    """Sections given by n+1 coprime binary forms of exact degree d.

    Coefficients are independent uniform integers in ``[-B, B]``; a draw is
    repeated until the forms are coprime of exact degree d, at most 1000
    times per section.
    """
    if config is not None:
        n = config.n if n is None else n
        degree = config.degree if degree is None else degree
        count = config.count if count is None else count
        B = config.B if B is None else B
        seed = config.seed if seed is None else seed
    if degree < 1:
        raise ValueError("section degree must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        for _ in range(MAX_ATTEMPTS):
            P = random_section(rng, n, degree, B)
            if P is not None:
                out.append(P)
                break
        else:
            raise SamplingExhausted(f"no coprime degree-{degree} section in "
                                    f"{MAX_ATTEMPTS} draws with B = {B}")
    return out


def is_dominant(f, rng):
    """Jacobian determinant of the forms is nonzero at a random point mod p."""
    prime = 2 ** 61 - 1
    n = f.n
    at = [int(v) for v in rng.integers(1, 10 ** 6, size=n + 2)]
    rows = []
    for F in f.forms:
        row = []
        for j in range(n + 1):
            dF = F.derivative(j) if not F.is_zero() else F
            row.append(int(dF(*at)) % prime if not dF.is_zero() else 0)
        rows.append(row)
    return nmod_mat(rows, prime).rank() == n + 1


def random_map(rng, n, d, e, terms=3, C=2):
    """Random self-map with exact bidegree (d, e) after content removal.

    Each form gets ``terms`` distinct x-monomials of degree d with
    coefficient polynomials in t of degree <= e and entries in ``[-C, C]``.
    Maps that are not dominant are redrawn.
    """
    monos = [m for m in itertools.product(range(d + 1), repeat=n + 1) if sum(m) == d]
    for _ in range(MAX_ATTEMPTS):
        forms = []
        for _ in range(n + 1):
            picks = rng.choice(len(monos), size=min(terms, len(monos)), replace=False)
            form = {}
            for j in sorted(int(j) for j in picks):
                c = [int(v) for v in rng.integers(-C, C + 1, size=e + 1)]
                if any(c):
                    form[monos[j]] = fmpq_poly(c)
            forms.append(form)
        if not any(forms):
            continue
        f = SelfMapFF.from_terms(n, forms)
        if f.bidegree == (d, e) and is_dominant(f, rng):
            return f
    raise SamplingExhausted(f"no dominant map of bidegree ({d}, {e})")


# ---------------------------------------------------------------------------
# on-disk iterate cache

class IterateStore:
    """Iterate forms on disk, one JSON file per (map, m)."""

    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def _path(self, f, m):
        digest = hashlib.sha256(f.key().encode()).hexdigest()[:32]
        return os.path.join(self.directory, f"{digest}-{m}.json")

    def get(self, f, m):
        path = self._path(f, m)
        if not os.path.exists(path):
            return None
        with open(path) as fh:
            data = json.load(fh)
        if data["map"] != f.key():
            return None
        ctx = map_context(f.n)
        forms = [ctx.from_dict({tuple(e): int(c) for e, c in form}) for form in data["forms"]]
        return SelfMapFF(forms, remove_content=False, content_provenance=data["provenance"])

    def put(self, f, m, it):
        data = {"map": f.key(), "m": m, "provenance": it.content_provenance,
                "forms": [[[list(map(int, e)), str(c)] for e, c in F.to_dict().items()]
                          for F in it.forms]}
        path = self._path(f, m)
        tmp = path + f".{os.getpid()}.tmp"
        with open(tmp, "w") as fh:
            json.dump(data, fh)
        os.replace(tmp, path)


# ---------------------------------------------------------------------------
# records

def num(value, provenance):
    return {"value": value, "provenance": provenance}


def opt_num(value, provenance):
    return None if value is None else num(value, provenance)


def estimate_fields(est):
    """Series and window of an alpha/delta estimate with provenance flags."""
    out = {
        "root_series": num(est.root_series if hasattr(est, "root_series") else est.root_estimates,
                           "estimated"),
        "ratio_series": num(est.ratio_series if hasattr(est, "ratio_series") else est.ratio_estimates,
                            "estimated"),
        "window_limsup": num(est.window_limsup, "estimated"),
        "window_liminf": num(est.window_liminf, "estimated"),
        "value": num(est.value, "exact" if est.exact is not None else "estimated"),
    }
    if est.exact is not None:
        out["exact"] = num(str(est.exact), "exact")
    return out


def degree_fields(seq):
    prov = "probabilistic" if "probabilistic" in seq.certified else "exact"
    return {"d": num(seq.d, prov), "e": num(seq.e, prov),
            "certified": seq.certified, "complete": seq.complete}


def orbit_fields(rec):
    prov = "exact" if rec.exact else "probabilistic"
    return {
        "heights": num(rec.heights, prov),
        "cancellations": num(rec.cancellations, prov),
        "certified_to": num(rec.certified_to, "exact"),
        "method": rec.method,
        "indeterminacy_hit": opt_num(rec.indeterminacy_hit, "exact"),
        "period": opt_num(list(rec.period) if rec.period else None, "exact"),
        "truncated": rec.truncated,
    }


def record(command, config, **payload):
    out = {"schema_version": SCHEMA_VERSION, "command": command, "config": config.echo()}
    out.update(payload)
    return out


def dumps(rec):
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# section experiment

def section_job(args):
    """Orbit, alpha and certificate for one sampled section (picklable job)."""
    map_text, point_text, M, budget_tuple = args
    from .dsl import parse_map, parse_point

    f = parse_map(map_text)
    P = parse_point(point_text)
    budget = Budget(*budget_tuple)
    rec = orbit(f, P, M, budget=budget)
    alpha = alpha_estimate(rec)
    cert = check_sufficient_condition(f, P, M, budget=budget, record=rec)
    rec.last_point = rec.points = None
    return rec, alpha, cert


def run_jobs(fn, jobs, workers=1):
    """Apply fn to every job; results come back in submission order."""
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def map_delta(f, M, budget, strategy="auto"):
    """Degree sequence and estimate, via exponent matrices for monomial maps.

    Entries the budget cuts off are filled in by line probes.
    """
    if f.is_monomial() and f.e == 0 and all(f.grouped_terms()):
        B = [list(xs) for (xs, _), in f.grouped_terms()]
        seq = monomial_degree_sequence(MonomialMap.reduced(B), M)
    else:
        try:
            seq = degree_sequence(f, M, budget, strategy, IterateCache(f, budget, strategy))
        except ResourceLimit as exc:
            seq = extend_by_lines(exc.partial, f, M)
    return seq, delta_estimate(seq)


# ---------------------------------------------------------------------------
# randomized inequality suite

@dataclass
class SuiteCase:
    index: int
    map: SelfMapFF
    degrees: object
    delta: object
    points: list
    orbits: list
    alphas: list


HEIGHT_TARGET = 150


def section_degree_for(delta_hat, M, target=HEIGHT_TARGET):
    """Smallest section degree whose orbit should reach ``target`` by step M/2.

    The ratio estimator overshoots by about ``e / h_(M/2)``, so the start
    height is chosen to push that below the suite tolerance.
    """
    growth = max(delta_hat, 1.0) ** (M // 2)
    return max(1, int(np.ceil(target / growth)))


def inequality_suite(seed=0, maps=50, points_per_map=3, M=8, budget=None,
                     delta_budget=Budget(max_degree=81, max_bits=2 ** 24), box=5):
    """Random (map, point) pairs for comparing orbit growth with degree growth.

    Maps: n in {1, 2}, d in {2, 3}, e in {0, 1}, three terms per form with
    small coefficients, dominant, exact bidegree (d, e) after content
    removal.  Sections are sized by :func:`section_degree_for`, with
    coefficients in ``[-box, box]``.
    """
    budget = budget or Budget()
    rng = np.random.default_rng(seed)
    cases = []
    for k in range(maps):
        n = int(rng.integers(1, 3))
        d = int(rng.integers(2, 4))
        e = int(rng.integers(0, 2))
        f = random_map(rng, n, d, e)
        seq, dl = map_delta(f, M, delta_budget)
        D0 = section_degree_for(dl.value, M)
        pts, recs, alphas = [], [], []
        for _ in range(points_per_map):
            P = None
            while P is None:
                P = random_section(rng, n, D0, box)
            try:
                rec = orbit(f, P, M, budget=budget)
            except ResourceLimit as exc:
                rec = exc.partial
            pts.append(P)
            recs.append(rec)
            alphas.append(alpha_estimate(rec))
        cases.append(SuiteCase(k, f, seq, dl, pts, recs, alphas))
        log.info("map %d: exact alpha values seen %s", k, alpha_spectrum(cases[-1]))
    return cases


def alpha_spectrum(case):
    """Distinct exact arithmetic degrees observed among a case's points.

    Recorded as an observation only; nothing is claimed about the full set.
    """
    return sorted({a.exact for a in case.alphas if a.exact is not None})
