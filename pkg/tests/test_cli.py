import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from wichtel import cli
from wichtel.distribution import pair_distribution, poisson_half_pmf


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize(
    "argv, value",
    [
        (["count", "--n", "7", "--what", "PN"], "714"),
        (["count", "--n", "3", "--what", "PN"], "0"),
        (["count", "--n", "6", "--what", "PNk", "--k", "3"], "15"),
        (["count", "--n", "20", "--what", "FN"], "895014631192902121"),
        (["count", "--n", "5", "--what", "g3"], "24"),
    ],
)
def test_count_values(capsys, argv, value):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert rows(out)[0]["value"] == value


def test_count_json_lists_all_methods(capsys):
    code, out, _ = run(capsys, "--format", "json", "count", "--n", "10", "--what", "PN")
    assert code == 0
    record = json.loads(out)
    assert record["value"] == "525105"
    assert set(record["methods"]) == {"recurrence", "subtraction", "typesum", "explicit", "rec1"}
    assert set(record["methods"].values()) == {"525105"}


def test_format_after_subcommand(capsys):
    code, out, _ = run(capsys, "count", "--n", "9", "--what", "PN", "--format", "json")
    assert code == 0
    assert json.loads(out)["value"] == "52632"


def test_count_types(capsys):
    code, out, _ = run(capsys, "count", "--n", "7", "--what", "types")
    assert code == 0
    table = rows(out)
    assert [r["partition"] for r in table] == ["2+2+3", "2+5"]
    assert [r["counts"] for r in table] == ["(0,2,1,0,0,0,0)", "(0,1,0,0,1,0,0)"]
    assert sum(int(r["permutations"]) for r in table) == 714


def test_count_type_count(capsys):
    code, out, _ = run(capsys, "--format", "json", "count", "--n", "7", "--what", "type_count")
    assert code == 0
    assert json.loads(out) == {"n": 7, "what": "type_count", "enumerated": 2, "printed_formula": 3}


def test_count_large_n_agreement(capsys):
    code, out, _ = run(capsys, "--format", "json", "count", "--n", "300", "--what", "PN")
    assert code == 0
    assert len(set(json.loads(out)["methods"].values())) == 1


def test_dist_json_schema(capsys):
    code, out, _ = run(capsys, "dist", "--n", "4")
    assert code == 0
    record = json.loads(out)
    assert record["n"] == 4
    assert [item["k"] for item in record["pmf"]] == [0, 1, 2]
    exact = [Fraction(item["exact"]) for item in record["pmf"]]
    assert exact == [Fraction(6, 9), 0, Fraction(3, 9)]
    for item in record["pmf"]:
        assert set(item) >= {"k", "exact", "float", "poisson_limit"}
        assert item["float"] == float(Fraction(item["exact"]))
        assert item["poisson_limit"] == poisson_half_pmf(item["k"])
    assert Fraction(record["mean_exact"]) == Fraction(2, 3)


def test_dist_n2_and_n20(capsys):
    _, out, _ = run(capsys, "dist", "--n", "2")
    assert [Fraction(i["exact"]) for i in json.loads(out)["pmf"]] == [0, 1]
    _, out, _ = run(capsys, "dist", "--n", "20")
    item = json.loads(out)["pmf"][3]
    assert Fraction(item["exact"]) == pair_distribution(20)[3]
    assert abs(item["float"] - item["poisson_limit"]) < 1e-4
    assert round(item["float"], 3) == 0.013


def test_dist_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "dist", "--n", "6")
    assert code == 0
    table = rows(out)
    assert [Fraction(r["exact"]) for r in table] == list(pair_distribution(6).pmf)
    assert Fraction(table[3]["tail_exact"]) == Fraction(3, 53)


def test_tail(capsys):
    code, out, _ = run(capsys, "tail", "--n", "20", "--k", "3")
    assert code == 0
    row = rows(out)[0]
    assert abs(float(row["float"]) - float(row["asymptotic"])) < 1e-7
    assert Fraction(row["exact"]) == pair_distribution(20).at_least(3)


def test_table_csv(capsys, tmp_path):
    out_path = tmp_path / "table.csv"
    code, out, _ = run(capsys, "--output", str(out_path), "table")
    assert code == 0
    assert out == ""
    text = out_path.read_text()
    assert text.splitlines()[0] == "n,prob_ge_1,prob_ge_3,tv_poisson,mean"
    table = rows(text)
    assert [int(r["n"]) for r in table] == list(range(2, 61))
    assert max(table, key=lambda r: float(r["prob_ge_3"]))["n"] == "6"
    assert float(table[0]["prob_ge_1"]) == 1.0
    assert abs(float(table[-1]["prob_ge_1"]) - 0.3934693402873666) < 1e-15
    for r in table:
        for column in ("prob_ge_1", "prob_ge_3", "tv_poisson", "mean"):
            assert repr(float(r[column])) == r[column]


def test_table_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "table", "--n-min", "5", "--n-max", "7")
    assert code == 0
    assert [r["n"] for r in json.loads(out)] == [5, 6, 7]


def test_output_is_byte_identical(capsys):
    _, first, _ = run(capsys, "dist", "--n", "17")
    _, second, _ = run(capsys, "dist", "--n", "17")
    assert first == second


def test_simulate_json(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "6", "--trials", "2000", "--seed", "9")
    assert code == 0
    record = json.loads(out)
    assert {"n", "trials", "seed", "histogram", "accept_rate"} <= set(record)
    assert (record["n"], record["trials"], record["seed"]) == (6, 2000, 9)
    assert sum(record["histogram"].values()) == 2000
    assert all(int(k) <= 3 for k in record["histogram"])
    assert 0 < record["accept_rate"] < 1
    _, again, _ = run(capsys, "simulate", "--n", "6", "--trials", "2000", "--seed", "9")
    assert again == out


def test_simulate_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "simulate", "--n", "2", "--trials", "10")
    assert code == 0
    assert rows(out) == [{"k": "1", "count": "10", "fraction": "1.0"}]


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--n", "7"],
        ["count", "--n", "7", "--what", "XX"],
        ["count", "--n", "6000", "--what", "FN"],
        ["count", "--n", "5", "--what", "PNk"],
        ["count", "--n", "5", "--what", "PNk", "--k", "3"],
        ["dist", "--n", "1"],
        ["table", "--n-min", "1"],
        ["simulate", "--n", "5", "--trials", "0"],
        ["simulate", "--n", "5", "--seed", "-4"],
        ["tail", "--n", "5", "--k", "-1"],
        ["bogus"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_verify_default_passes(capsys, monkeypatch):
    monkeypatch.delenv("WICHTEL_ORACLE_CAP", raising=False)
    code, out, _ = run(capsys, "verify")
    assert code == 0
    table = rows(out)
    assert all(r["status"] == "PASS" for r in table)
    names = {r["check"] for r in table}
    for expected in ("oracle:F", "oracle:g3", "oracle:P", "oracle:type_counts", "P:typesum=recurrence",
                     "P:typesum=subtraction", "F:nearest_integer", "pmf:normalised", "types:partition_bijection"):
        assert expected in names
    assert max(int(r["n"]) for r in table if r["check"] == "oracle:F") == 9


@pytest.mark.slow
def test_verify_cap_10_passes(capsys):
    code, out, _ = run(capsys, "--format", "json", "verify", "--cap", "10")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_cap_exceeded(capsys, monkeypatch):
    code, _, err = run(capsys, "verify", "--cap", "12")
    assert code == 4
    assert "exceeds" in err
    monkeypatch.setenv("WICHTEL_ORACLE_CAP", "11")
    code, _, _ = run(capsys, "verify")
    assert code == 4


def test_verify_reports_invariant_failure(capsys, monkeypatch):
    from wichtel import verify

    monkeypatch.setattr(verify.C, "g_ge3", lambda n: 0)
    code, out, err = run(capsys, "verify", "--cap", "4")
    assert code == 3
    assert "FAIL" in out


def test_count_cross_method_mismatch_exits_3(capsys, monkeypatch):
    monkeypatch.setattr(cli.C, "pair_count_recurrence", lambda n: -1)
    code, _, err = run(capsys, "count", "--n", "7", "--what", "PN")
    assert code == 3
    assert "disagree" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wichtel", "count", "--n", "8", "--what", "PN"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout == "n,what,k,value\n8,PN,,5845\n"
