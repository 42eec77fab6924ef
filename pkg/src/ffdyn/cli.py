"""Command-line interface: ``ffdyn <command> [options]``.

Every command writes one JSON object per line (``--format json``), a CSV
table of the per-step series (``--format csv``) or a readable summary
(``--format human``).  Exit codes: 0 success, 1 mismatch in
``reproduce-paper``, 2 input errors, 3 budget exhausted.
"""

import argparse
import csv
import io
import sys
import time

from .dsl import format_map, format_point, parse_map, parse_point
from .dynamics import IterateCache, ResourceLimit, degree_sequence, delta_estimate
from .errors import DSLError, FFDynError, NotSplit, TooShort
from .experiments import (
    ExperimentConfig, IterateStore, degree_fields, dumps, estimate_fields, make_config,
    map_delta, num, opt_num, orbit_fields, read_config_file, record, run_jobs, sample_sections,
    section_job,
)
from .heights import height_degree, height_valuation
from .orbits import (
    alpha_estimate, check_fundamental_inequality, check_sufficient_condition, orbit,
)
from .projective import to_rational_functions

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

EXAMPLE_MAP = "map P2: [x^2*z, y^3, z^3]"
EXAMPLE_POINT = "point P2: [t, 2, 1]"
CONSTANT_POINT = "point P2: [1, 2, 1]"
CREMONA_MAP = "map P2: [y*z, x*z, x*y]"


class InputError(Exception):
    pass


class BudgetExhausted(Exception):
    def __init__(self, records):
        self.records = records


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("-M", "--iterations", dest="M", type=int, default=argparse.SUPPRESS)
    g.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    g.add_argument("--budget-height", dest="max_height", type=int, default=argparse.SUPPRESS)
    g.add_argument("--budget-bits", dest="max_bits", type=int, default=argparse.SUPPRESS)
    g.add_argument("--budget-degree", dest="max_degree", type=int, default=argparse.SUPPRESS)
    g.add_argument("--format", choices=("json", "csv", "human"), default=argparse.SUPPRESS)
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    g.add_argument("--config", default=argparse.SUPPRESS,
                   help="flat key = value file; flags override it")
    g.add_argument("--cache-dir", dest="cache_dir", default=argparse.SUPPRESS,
                   help="persist iterates on disk")
    g.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                   help="add wall-clock times (output is then not reproducible)")
    g.add_argument("--map", default=argparse.SUPPRESS, help="map in the input language")
    g.add_argument("--map-file", dest="map_file", default=argparse.SUPPRESS)
    g.add_argument("--point", dest="points", action="append", default=argparse.SUPPRESS,
                   help="point in the input language (repeatable)")

    top = argparse.ArgumentParser(prog="ffdyn", parents=[common],
                                  description="Heights and degree growth of rational maps "
                                              "over Q(t).")
    sub = top.add_subparsers(dest="command", required=True)
    sub.add_parser("height", parents=[common], help="height of points by both routes")
    sub.add_parser("orbit", parents=[common], help="orbit heights and cancellations")
    sub.add_parser("alpha", parents=[common], help="arithmetic-degree estimates")
    sub.add_parser("delta", parents=[common], help="degree sequence and dynamical degree")
    sub.add_parser("check", parents=[common],
                   help="growth-rate inequality and equality-criterion certificate")
    sec = sub.add_parser("sections", parents=[common],
                         help="random-section experiment for a map")
    sec.add_argument("-d", "--degree", type=int, default=argparse.SUPPRESS)
    sec.add_argument("--count", type=int, default=argparse.SUPPRESS)
    sec.add_argument("-B", "--box", dest="B", type=int, default=argparse.SUPPRESS)
    sub.add_parser("reproduce-paper", parents=[common],
                   help="pinned worked-example suite; exit 1 on mismatch")
    return top


def _config(ns):
    values = vars(ns).copy()
    command = values.pop("command")
    path = values.pop("config", None)
    file_values = read_config_file(path) if path else {}
    return command, make_config(file_values, values)


def _map(cfg):
    if cfg.map is not None:
        return parse_map(cfg.map)
    if cfg.map_file is not None:
        with open(cfg.map_file) as fh:
            return parse_map(fh.read())
    raise InputError("this command needs --map or --map-file")


def _points(cfg):
    if not cfg.points:
        raise InputError("this command needs at least one --point")
    return [parse_point(text) for text in cfg.points]


def _cache(cfg, f):
    store = IterateStore(cfg.cache_dir) if cfg.cache_dir else None
    return IterateCache(f, cfg.budget, seed=cfg.seed, store=store)


# ---------------------------------------------------------------------------
# commands; each returns (records, csv header, csv rows)

def cmd_height(cfg):
    records, rows = [], []
    for text, P in zip(cfg.points, _points(cfg)):
        rec = {"point": format_point(P), "input": text,
               "height_degree": num(height_degree(P), "exact")}
        try:
            rec["height_valuation"] = num(height_valuation(to_rational_functions(P)), "exact")
        except NotSplit as exc:
            rec["height_valuation"] = None
            rec["note"] = f"valuation route unavailable: {exc}"
        records.append(rec)
        hv = rec["height_valuation"]["value"] if rec["height_valuation"] else ""
        rows.append([format_point(P), P.D, hv])
    return records, ["point", "height_degree", "height_valuation"], rows


def _orbits(cfg, f):
    out = []
    for P in _points(cfg):
        try:
            rec = orbit(f, P, cfg.M, budget=cfg.budget)
            exhausted = False
        except ResourceLimit as exc:
            rec, exhausted = exc.partial, True
        out.append((P, rec, exhausted))
    return out


def _series_rows(heights, est):
    rows = []
    for m, h in enumerate(heights):
        ratio = est.ratio_series[m - 1] if est and 0 < m <= len(est.ratio_series) else ""
        root = est.root_series[m - 1] if est and 0 < m <= len(est.root_series) else ""
        rows.append([m, h, ratio, root])
    return rows


def cmd_orbit(cfg, with_alpha=False):
    f = _map(cfg)
    records, rows, exhausted = [], [], False
    for P, rec, hit_budget in _orbits(cfg, f):
        exhausted |= hit_budget
        out = {"map": format_map(f), "point": format_point(P), "orbit": orbit_fields(rec)}
        est = None
        if with_alpha:
            try:
                est = alpha_estimate(rec)
                out["alpha"] = estimate_fields(est)
            except TooShort as exc:
                out["alpha"] = None
                out["note"] = str(exc)
        records.append(out)
        rows += [[format_point(P)] + r for r in _series_rows(rec.heights, est)]
    if exhausted:
        raise BudgetExhausted(records)
    return records, ["point", "m", "height", "ratio", "root"], rows


def cmd_delta(cfg):
    f = _map(cfg)
    exhausted = False
    try:
        seq = degree_sequence(f, cfg.M, cfg.budget, cache=_cache(cfg, f))
    except ResourceLimit as exc:
        seq, exhausted = exc.partial, True
    est = delta_estimate(seq) if len(seq) else None
    out = {"map": format_map(f), "degrees": degree_fields(seq)}
    if est is not None:
        out["delta"] = estimate_fields(_DeltaView(est))
    rows = []
    for m, (d, e) in enumerate(zip(seq.d, seq.e), 1):
        ratio = est.ratio_estimates[m - 2] if m >= 2 else ""
        rows.append([m, d, e, ratio, est.root_estimates[m - 1]])
    if exhausted:
        raise BudgetExhausted([out])
    return [out], ["m", "d", "e", "ratio", "root"], rows


class _DeltaView:
    """Adapter giving a degree estimate the attribute names of an alpha estimate."""

    def __init__(self, est):
        self.root_series = est.root_estimates
        self.ratio_series = est.ratio_estimates
        self.window_limsup = est.window_limsup
        self.window_liminf = est.window_liminf
        self.exact = est.exact
        self.value = est.value


def cmd_check(cfg):
    f = _map(cfg)
    cache = _cache(cfg, f)
    records, rows = [], []
    for P in _points(cfg):
        rep = check_fundamental_inequality(f, P, cfg.M, cfg.tol, cfg.budget, cache=cache)
        cert = check_sufficient_condition(f, P, cfg.M, cfg.budget, cache=cache, record=rep.orbit)
        records.append({
            "map": format_map(f), "point": format_point(P),
            "inequality": {
                "alpha_hat": num(rep.alpha_hat, "exact" if rep.alpha.exact is not None
                                 else "estimated"),
                "delta_hat": num(rep.delta_hat, "exact" if rep.delta.exact is not None
                                 else "estimated"),
                "tol": num(rep.tol, "exact"), "verdict": rep.verdict,
            },
            "orbit": orbit_fields(rep.orbit),
            "degrees": degree_fields(rep.degrees),
            "certificate": {
                "positivity": cert.positivity,
                "avoidance_certified_to": num(cert.avoidance_certified_to, "exact"),
                "first_meeting": opt_num(cert.first_meeting, "exact"),
                "methods": cert.methods,
                "holds": cert.holds, "summary": cert.summary,
            },
        })
        rows.append([format_point(P), rep.alpha_hat, rep.delta_hat, rep.verdict,
                     cert.avoidance_certified_to, cert.holds])
    return records, ["point", "alpha_hat", "delta_hat", "verdict", "avoidance_to",
                     "certificate"], rows


def sections_experiment(cfg, f=None):
    """Sample sections, run their orbits, and count alpha = delta matches."""
    f = f or _map(cfg)
    cfg.n = f.n
    seq, dl = map_delta(f, cfg.M, cfg.budget)
    points = sample_sections(cfg)
    jobs = [(format_map(f), format_point(P), cfg.M, tuple(cfg.budget.__dict__.values()))
            for P in points]
    results = run_jobs(section_job, jobs, cfg.jobs)
    per, matches, close, cert_ok, cert_total = [], 0, 0, 0, 0
    for i, (P, (rec, alpha, cert)) in enumerate(zip(points, results)):
        match = (alpha.exact is not None and dl.exact is not None and alpha.exact == dl.exact)
        near = abs(alpha.value - dl.value) <= cfg.tol
        matches += match
        close += near
        if cert.holds:
            cert_total += 1
            cert_ok += match
        per.append({"index": num(i, "exact"), "point": format_point(P),
                    "heights": num(rec.heights, "exact" if rec.exact else "probabilistic"),
                    "alpha": num(alpha.value, "exact" if alpha.exact is not None
                                 else "estimated"),
                    "match_exact": match, "match_within_tol": near,
                    "certified_to": num(cert.avoidance_certified_to, "exact"),
                    "certificate_holds": cert.holds})
    summary = {
        "map": format_map(f), "delta": estimate_fields(_DeltaView(dl)),
        "degrees": degree_fields(seq), "samples": num(len(points), "exact"),
        "matches": num(matches, "exact"), "fraction": f"{matches}/{len(points)}",
        "matches_within_tol": num(close, "estimated"),
        "fraction_within_tol": f"{close}/{len(points)}",
        "certified": num(cert_total, "exact"), "certified_matches": num(cert_ok, "exact"),
    }
    return summary, per


def cmd_sections(cfg):
    summary, per = sections_experiment(cfg)
    rows = [[p["index"]["value"], p["point"], p["alpha"]["value"], p["match_exact"],
             p["certified_to"]["value"], p["certificate_holds"]] for p in per]
    return [dict(summary, samples_detail=per)], ["index", "point", "alpha", "match",
                                                 "certified_to", "certificate"], rows


def reproduce_checks(cfg):
    """The pinned worked-example suite as (name, expected, observed) triples."""
    f = parse_map(EXAMPLE_MAP)
    P = parse_point(EXAMPLE_POINT)
    rec = orbit(f, P, 10)
    alpha = alpha_estimate(rec)
    seq = degree_sequence(f, 6)
    dl = delta_estimate(seq)
    const = orbit(f, parse_point(CONSTANT_POINT), cfg.M)
    ca = alpha_estimate(const)
    cremona = degree_sequence(parse_map(CREMONA_MAP), 8)
    cert = check_sufficient_condition(f, P, cfg.M)
    return [
        ("example heights 2^m, m <= 10", [2 ** m for m in range(11)], rec.heights),
        ("example alpha exact", "2", str(alpha.exact)),
        ("example degrees 3^m, m <= 6", [3 ** m for m in range(1, 7)], seq.d),
        ("example delta exact", "3", str(dl.exact)),
        ("example alpha < delta", True, alpha.exact < dl.exact),
        ("example section meets an indeterminacy locus", True,
         cert.first_meeting is not None),
        ("constant point heights", [0] * (cfg.M + 1), const.heights),
        ("constant point alpha exact", "1", str(ca.exact)),
        ("cremona degrees", [2, 1] * 4, cremona.d),
        ("cremona delta exact", "1", str(delta_estimate(cremona).exact)),
    ]


def cmd_reproduce(cfg):
    records, rows, ok = [], [], True
    for name, expected, observed in reproduce_checks(cfg):
        passed = expected == observed
        ok &= passed
        records.append({"check": name, "expected": num(expected, "exact"),
                        "observed": num(observed, "exact"),
                        "verdict": "PASS" if passed else "FAIL"})
        rows.append([name, expected, observed, "PASS" if passed else "FAIL"])
    return records, ["check", "expected", "observed", "verdict"], rows, ok


COMMANDS = {
    "height": cmd_height,
    "orbit": cmd_orbit,
    "alpha": lambda cfg: cmd_orbit(cfg, with_alpha=True),
    "delta": cmd_delta,
    "check": cmd_check,
    "sections": cmd_sections,
}


# ---------------------------------------------------------------------------
# output

def _human(rec, indent=0):
    lines = []
    pad = "  " * indent
    for key, value in rec.items():
        if isinstance(value, dict) and set(value) == {"value", "provenance"}:
            lines.append(f"{pad}{key}: {value['value']} [{value['provenance']}]")
        elif isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines += _human(value, indent + 1)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines += _human(item, indent + 1)
                lines.append("")
        else:
            lines.append(f"{pad}{key}: {value}")
    return lines


def _emit(records, header, rows, cfg, command, out, elapsed=None):
    if cfg.format == "json":
        for rec in records:
            full = record(command, cfg, **rec)
            if elapsed is not None:
                full["wall_time"] = num(elapsed, "measured")
            out.write(dumps(full) + "\n")
    elif cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        out.write(buf.getvalue())
    else:
        for rec in records:
            out.write("\n".join(_human(rec)) + "\n")
        if elapsed is not None:
            out.write(f"wall time: {elapsed:.3f} s\n")


def run_command(argv, out=None):
    """Run one command; returns the exit code."""
    out = out or sys.stdout
    try:
        ns = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        command, cfg = _config(ns)
    except (ValueError, OSError) as exc:
        print(f"ffdyn: {exc}", file=sys.stderr)
        return EXIT_INPUT
    start = time.perf_counter()
    code = EXIT_OK
    try:
        if command == "reproduce-paper":
            records, header, rows, ok = cmd_reproduce(cfg)
            code = EXIT_OK if ok else EXIT_MISMATCH
        else:
            records, header, rows = COMMANDS[command](cfg)
    except (DSLError, InputError, OSError) as exc:
        print(f"ffdyn: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExhausted as exc:
        records, header, rows = exc.records, [], []
        code = EXIT_BUDGET
    except ResourceLimit as exc:
        print(f"ffdyn: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FFDynError as exc:
        print(f"ffdyn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    elapsed = time.perf_counter() - start if cfg.timing else None
    _emit(records, header, rows, cfg, command, out, elapsed)
    if code == EXIT_BUDGET:
        print("ffdyn: budget exhausted; partial results written", file=sys.stderr)
    return code


def main(argv=None):
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))
