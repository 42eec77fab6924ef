import io
import json

import pytest

from ffdyn.cli import run_command

EXAMPLE_MAP = "map P2: [x^2*z, y^3, z^3]"
CREMONA_MAP = "map P2: [y*z, x*z, x*y]"


def run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), out)
    return code, out.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def all_numbers_tagged(node):
    if isinstance(node, dict):
        if set(node) == {"value", "provenance"}:
            return node["provenance"] in ("exact", "estimated", "probabilistic")
        return all(all_numbers_tagged(v) for k, v in node.items() if k != "config")
    if isinstance(node, list):
        return all(all_numbers_tagged(v) for v in node)
    return not isinstance(node, float)


def test_reproduce_passes():
    code, text = run("reproduce-paper")
    assert code == 0
    assert all(r["verdict"] == "PASS" for r in records(text))


def test_delta_for_cremona_is_exactly_one():
    code, text = run("delta", "--map", CREMONA_MAP, "-M", "8")
    assert code == 0
    (rec,) = records(text)
    assert rec["schema_version"] == 1
    assert rec["delta"]["exact"]["value"] == "1"


@pytest.mark.parametrize("command", ["height", "orbit", "alpha", "check"])
def test_commands_emit_tagged_json(command):
    code, text = run(command, "--map", EXAMPLE_MAP, "--point", "point P2: [t, 2, 1]",
                     "--point", "point P2: [t^2/(t-1), 1, t]", "-M", "5")
    assert code == 0
    recs = records(text)
    assert recs and all(all_numbers_tagged(r) for r in recs)


def test_human_and_csv_formats():
    for fmt in ("human", "csv"):
        code, text = run("orbit", "--map", EXAMPLE_MAP, "--point", "point P2: [t, 2, 1]",
                         "--format", fmt)
        assert code == 0 and text


def test_parse_errors_exit_2():
    assert run("orbit", "--map", "map P2: [x^2, y^3, z^3]",
               "--point", "point P2: [t, 2, 1]")[0] == 2
    assert run("height", "--point", "point P1: [t^(1/2), 1]")[0] == 2
    assert run("no-such-command")[0] == 2


def test_budget_exhaustion_exits_3():
    code, text = run("delta", "--map", EXAMPLE_MAP, "-M", "8", "--budget-degree", "50")
    assert code == 3


def test_seeded_commands_are_byte_identical():
    argv = ["sections", "--map", EXAMPLE_MAP, "-d", "2", "--count", "20", "--seed", "11"]
    assert run(*argv) == run(*argv)
    argv = ["check", "--map", CREMONA_MAP, "--point", "point P2: [t, t + 1, 2]"]
    assert run(*argv) == run(*argv)


def test_jobs_do_not_change_output():
    argv = ["sections", "--map", EXAMPLE_MAP, "-d", "2", "--count", "12", "--seed", "2"]
    assert run(*argv)[1] == run(*argv, "--jobs", "2")[1]


def test_timing_is_opt_in():
    _, text = run("height", "--point", "point P2: [t, 2, 1]")
    assert "wall_time" not in text
    _, text = run("height", "--point", "point P2: [t, 2, 1]", "--timing")
    assert "wall_time" in text
