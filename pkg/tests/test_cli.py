"""Command-line behaviour: exit codes, schema, formats and determinism."""

import csv
import io
import json

import jsonschema
import pytest

from legendre_sha import cli, counting, structures
from legendre_sha.errors import ConsistencyError


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def invoke_json(capsys, *argv):
    code, out, err = invoke(capsys, *argv, "--format", "json")
    doc = json.loads(out) if out else None
    return code, doc, err


SCHEMA = cli.load_schema()

JSON_RUNS = [
    ("orbits", "-p", "3", "-d", "28"),
    ("orbits", "-p", "3", "-f", "3", "--filter", "O'"),
    ("word", "-p", "3", "-d", "364", "-i", "37"),
    ("snf", "-e", "4,1,3,5,4,3,5,4,2,1,2"),
    ("report", "-p", "3", "-f", "3"),
    ("sha", "-p", "3", "-f", "3"),
    ("interpolate", "-f", "3", "--verify", "3,5"),
    ("rays", "-p", "3", "-d", "10", "-r", "2"),
    ("verify-all", "--max-f", "2"),
]


@pytest.mark.parametrize("argv", JSON_RUNS, ids=lambda a: a[0])
def test_json_validates_and_is_stable(capsys, argv):
    code, doc, _ = invoke_json(capsys, *argv)
    assert code == cli.EXIT_OK
    jsonschema.validate(doc, SCHEMA)
    assert doc["context"]["command"] == argv[0]
    again = invoke(capsys, *argv, "--format", "json")[1]
    assert json.loads(again) == doc
    assert again == json.dumps(doc, indent=2, sort_keys=True) + "\n"


@pytest.mark.parametrize("fmt", cli.FORMATS)
def test_output_is_byte_stable(capsys, fmt):
    first = invoke(capsys, "report", "-p", "5", "-f", "2", "--format", fmt)[1]
    second = invoke(capsys, "report", "-p", "5", "-f", "2", "--format", fmt)[1]
    assert first == second and first


def test_orbits_p3_d28(capsys):
    code, doc, _ = invoke_json(capsys, "orbits", "-p", "3", "-d", "28")
    assert code == 0
    assert [o["orbit_min"] for o in doc["orbits"]] == [1, 2, 4, 5, 7]
    assert all(o["word"] and o["height"] is not None for o in doc["orbits"])
    assert doc["aggregates"]["orbit_count"] == 5


def test_orbits_p3_d4_single_orbit(capsys):
    code, doc, _ = invoke_json(capsys, "orbits", "-p", "3", "-d", "4")
    assert code == 0
    assert len(doc["orbits"]) == 1
    assert doc["orbits"][0]["elements"] == [1, 3]


def test_orbits_rejects_p_dividing_d(capsys):
    code, out, err = invoke(capsys, "orbits", "-p", "3", "-d", "6")
    assert code == cli.EXIT_DOMAIN
    assert out == "" and err


def test_word_reports_both_good_base_points(capsys):
    _, doc, _ = invoke_json(capsys, "word", "-p", "3", "-d", "364", "-i", "85")
    row = doc["orbits"][0]
    assert row["word"] == "uluull"
    assert row["good_base_points"] == [37, 85]
    assert row["standard_word"] == "uullul"


def test_snf_worked_example(capsys):
    _, doc, _ = invoke_json(capsys, "snf", "-e", "4,1,3,5,4,3,5,4,2,1,2")
    agg = doc["aggregates"]
    assert agg["min_pivot"] == agg["max_pivot"] == agg["minors_oracle"] == [1, 1, 3, 3, 5, 7]
    assert agg["all_ok"] is True


def test_report_p3_f3(capsys):
    code, doc, _ = invoke_json(capsys, "report", "-p", "3", "-f", "3")
    assert code == 0
    agg = doc["aggregates"]
    assert agg["sha_order_exponent"] == 4
    assert agg["all_ok"] is True
    assert all(c["ok"] is not False for c in agg["checks"].values())


def test_report_p3_f2_trivial(capsys):
    code, doc, _ = invoke_json(capsys, "report", "-p", "3", "-f", "2")
    assert code == 0
    agg = doc["aggregates"]
    assert agg["sha_order_exponent"] == 0 and agg["index_order_exponent"] == 0
    assert agg["all_ok"] is True


def test_report_p5_f4(capsys):
    code, doc, _ = invoke_json(capsys, "report", "-p", "5", "-f", "4")
    assert code == 0 and doc["aggregates"]["all_ok"] is True


def test_report_csv_columns(capsys):
    code, out, _ = invoke(capsys, "report", "-p", "3", "-f", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == list(structures.CSV_COLUMNS)
    assert list(structures.CSV_COLUMNS) == [
        "d", "p", "f", "orbit_min", "orbit_size", "gcd_class", "word",
        "height", "d_list", "disc_exp", "index_exp", "sha_exps", "inv",
    ]
    assert [r["orbit_min"] for r in rows] == ["1", "2", "4", "5", "7"]
    assert all(r["d"] == "28" and r["p"] == "3" and r["f"] == "3" for r in rows)


def test_report_rejects_d_not_power_plus_one(capsys):
    assert invoke(capsys, "report", "-p", "3", "-d", "20")[0] == cli.EXIT_DOMAIN


def test_interpolate_f3(capsys):
    code, doc, _ = invoke_json(capsys, "interpolate", "-f", "3", "--verify", "3,5,7")
    assert code == 0
    agg = doc["aggregates"]
    assert agg["coefficients"] == ["-1/2", "3/2", "-3/2", "1/2"]
    assert [row["ok"] for row in agg["verification"]] == [True, True, True]


def test_interpolate_f1_is_zero(capsys):
    code, out, _ = invoke(capsys, "interpolate", "-f", "1")
    assert code == 0
    assert "polynomial: 0\n" in out


def test_interpolate_f5_verify_3(capsys):
    code, doc, _ = invoke_json(capsys, "interpolate", "-f", "5", "--verify", "3")
    assert code == 0 and doc["aggregates"]["all_ok"] is True


def test_identity_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(counting, "sha_order_exponent", lambda ctx, f=None: -1)
    code, doc, _ = invoke_json(capsys, "interpolate", "-f", "3", "--verify", "3")
    assert code == cli.EXIT_IDENTITY
    assert doc["aggregates"]["all_ok"] is False


def test_consistency_error_exit_code(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise ConsistencyError("forced")

    monkeypatch.setattr(structures, "full_report", boom)
    code, out, err = invoke(capsys, "report", "-p", "3", "-f", "3")
    assert code == cli.EXIT_IDENTITY
    assert "forced" in err and out == ""


@pytest.mark.parametrize(
    "argv",
    [
        (),
        ("bogus",),
        ("orbits", "-d", "28"),
        ("orbits", "-p", "3"),
        ("orbits", "-p", "3", "-d", "28", "--format", "xml"),
        ("snf", "-e", "1,x"),
        ("rays", "-p", "3", "-r", "2"),
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert out == "" and err


@pytest.mark.parametrize(
    "argv",
    [
        ("orbits", "-p", "4", "-d", "9"),
        ("orbits", "-p", "3", "-d", "0"),
        ("word", "-p", "3", "-d", "28", "-i", "14"),
        ("report", "-p", "2", "-f", "3"),
        ("report", "-p", "3", "-f", "0"),
        ("interpolate", "-f", "0"),
        ("rays", "-p", "3", "-d", "9", "-r", "2"),
    ],
)
def test_domain_errors(capsys, argv):
    assert invoke(capsys, *argv)[0] == cli.EXIT_DOMAIN


def test_size_guard_and_force(capsys):
    code, _, err = invoke(capsys, "orbits", "-p", "3", "-f", "19")
    assert code == cli.EXIT_DOMAIN and "--force" in err
    assert invoke(capsys, "interpolate", "-f", "19", "--verify", "3")[0] == cli.EXIT_DOMAIN
    assert invoke(capsys, "rays", "-p", "3", "-d", "100000", "-r", "100000")[0] == cli.EXIT_DOMAIN
    # --force only lifts the guard; a cheap command above it still runs
    code, out, _ = invoke(capsys, "word", "-p", "2", "-d", str(2**30 + 1), "-i", "1", "--force")
    assert code == cli.EXIT_OK and "word" in out


def test_rays_conventions_swap_words(capsys):
    _, lt, _ = invoke_json(capsys, "rays", "-p", "3", "-d", "10", "-r", "2")
    _, gt, _ = invoke_json(capsys, "rays", "-p", "3", "-d", "10", "-r", "2", "--ray-convention", "gt1")
    assert lt["aggregates"]["convention"] == "lt1" and gt["aggregates"]["convention"] == "gt1"
    assert [o["orbit_min"] for o in lt["orbits"]] == [o["orbit_min"] for o in gt["orbits"]]


def test_text_format_lists_checks(capsys):
    _, out, _ = invoke(capsys, "report", "-p", "3", "-f", "3")
    assert "check class_number: ok" in out
    assert out.endswith("all_ok: True\n")
