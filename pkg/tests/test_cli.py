import csv
import io
import json

import pytest

from jacobi_barrier import cli
from jacobi_barrier.operator import max_error_study, spot_grid
from jacobi_barrier.transform import OptionContract

EX1 = ["--spot", "100", "--strike", "100", "--lower", "95", "--upper", "120", "--rate", "0.05",
       "--vol", "0.25", "--expiry", "0.5", "--dates", "5", "--nodes", "25"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_price_example(capsys):
    code, out, _ = run(capsys, "price", *EX1, "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["summary"]["price"] == pytest.approx(1.6831, abs=5e-4)
    assert "timings" not in rep["summary"]


def test_price_human_shows_timings(capsys):
    code, out, _ = run(capsys, "price", *EX1)
    assert code == 0
    assert "timings:" in out and "matrix" in out


def test_price_defaults_are_example_one(capsys):
    _, a, _ = run(capsys, "price", "--format", "csv")
    _, b, _ = run(capsys, "price", *EX1, "--format", "csv")
    assert a == b


def test_empty_corridor_prices_zero(capsys):
    code, out, _ = run(capsys, "price", "--strike", "130", "--upper", "120", "--format", "json")
    assert code == 0
    assert json.loads(out)["summary"]["price"] == 0.0


@pytest.mark.parametrize("argv, word", [
    (["price", "--lower", "120", "--upper", "95"], "L < U"),
    (["price", "--nodes", "0"], "nodes"),
    (["price", "--vol", "-0.1"], "volatility"),
    (["converge", "--n-min", "9", "--n-max", "3"], "empty"),
    (["timing", "--dates-list", ""], "empty"),
])
def test_invalid_input_exit_two(capsys, argv, word):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert word in err


def test_bad_flag_exits_two():
    with pytest.raises(SystemExit) as exc:
        cli.main(["price", "--method", "fancy"])
    assert exc.value.code == 2


def test_numerical_failure_exit_three(capsys, monkeypatch):
    def boom(*a, **k):
        raise FloatingPointError("overflow")
    monkeypatch.setattr(cli, "price", boom)
    code, _, err = run(capsys, "price")
    assert code == 3 and "numerical" in err


def test_missing_config_exit_four(capsys, tmp_path):
    code, _, _ = run(capsys, "price", "--config", str(tmp_path / "nope.json"))
    assert code == 4


def test_unwritable_output_exit_four(capsys, tmp_path):
    code, _, _ = run(capsys, "converge", "--n-min", "5", "--n-max", "6", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 4


def test_table_exit_codes(capsys):
    code, out, _ = run(capsys, "table", "3", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["summary"]["all_pass"] and len(rep["results"]) == 9
    for r in rep["results"]:
        assert {"case", "computed", "target", "abs_diff", "pass"} <= set(r)


def test_table_five_marks_breakdown(capsys):
    code, out, _ = run(capsys, "table", "5", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert all(r["known_breakdown"] == r["case"].startswith("L=99 ") for r in rep["results"])
    assert rep["summary"]["known_breakdown"]


def test_table_failure_exits_one(capsys, monkeypatch):
    def rigged(table_id):
        return {"table": table_id}, [{"case": "x", "computed": 1.0, "target": 2.0, "abs_diff": 1.0,
                                      "pass": False}]
    monkeypatch.setattr(cli, "table_rows", rigged)
    code, out, _ = run(capsys, "table", "2")
    assert code == 1 and "FAIL" in out


def test_config_merge(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"lower": 80, "dates": 25, "--format": "json", "nodes": 30}))
    _, out, _ = run(capsys, "price", "--config", str(cfg), "--nodes", "25")
    rep = json.loads(out)
    assert rep["params"]["lower"] == 80 and rep["params"]["dates"] == 25
    assert rep["params"]["nodes"] == 25
    assert rep["summary"]["price"] == pytest.approx(1.9420, abs=5e-4)


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"colour": 1}')
    code, _, err = run(capsys, "price", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_json_round_trip_is_exact(capsys, tmp_path):
    out = tmp_path / "r.json"
    run(capsys, "curve", "--format", "json", "--out", str(out), "--grid-points", "7")
    rep = json.loads(out.read_text())
    assert json.loads(json.dumps(rep)) == rep
    c = OptionContract(spot=100.0, strike=100.0, lower=95.0, upper=120.0, rate=0.05, vol=0.25, expiry=0.5, dates=5)
    from jacobi_barrier import price_curve
    expected = [r.price for r in price_curve(c, spot_grid(c, 7))]
    assert [r["computed"] for r in rep["results"]] == expected


def test_csv_round_trip_is_exact(capsys):
    _, out, _ = run(capsys, "curve", "--format", "csv", "--spots", "96,100,104")
    rows = list(csv.DictReader(io.StringIO(out)))
    _, js, _ = run(capsys, "curve", "--format", "json", "--spots", "96,100,104")
    assert [float(r["computed"]) for r in rows] == [r["computed"] for r in json.loads(js)["results"]]


@pytest.mark.parametrize("argv", [
    ["price", "--method", "both", "--paths", "20000", "--format", "json"],
    ["mc", "--paths", "20000", "--seed", "5", "--format", "csv"],
    ["table", "3", "--format", "csv"],
])
def test_reruns_are_byte_identical(capsys, tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, *argv, "--out", str(a))
    run(capsys, *argv, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_price_both_reports_agreement(capsys):
    code, out, _ = run(capsys, "price", "--method", "both", "--paths", "100000", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["summary"]["agree_within_4_stderr"] is True
    mc = rep["results"][1]
    assert mc["paths"] == 100000 and mc["stderr"] > 0


def test_converge_trend(capsys, tmp_path):
    out = tmp_path / "conv.csv"
    code, msg, _ = run(capsys, "converge", "--lower", "80", "--dates", "125", "--n-min", "5", "--n-max", "40",
                       "--out", str(out))
    assert code == 0 and "wrote" in msg
    rows = {int(r["nodes"]): float(r["max_error"]) for r in csv.DictReader(out.open())}
    assert rows[40] <= rows[10] / 10


def test_converge_single_node_count_delegates(capsys):
    _, out, _ = run(capsys, "converge", "--n-min", "25", "--n-max", "25", "--dates", "125")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    c = OptionContract(spot=100.0, strike=100.0, lower=95.0, upper=120.0, rate=0.05, vol=0.25, expiry=0.5,
                       dates=125)
    from jacobi_barrier import CHEBYSHEV
    assert float(rows[0]["max_error"]) == max_error_study(c, 25, CHEBYSHEV, spot_grid(c, 50))


def test_converge_references_agree(capsys):
    base = ["converge", "--upper", "110", "--n-min", "25", "--n-max", "25", "--format", "json"]
    _, a, _ = run(capsys, *base, "--reference", "self")
    _, b, _ = run(capsys, *base, "--reference", "table")
    ea = json.loads(a)["results"][0]["max_error"]
    eb = json.loads(b)["results"][0]["max_error"]
    assert abs(ea - eb) <= 1e-3


def test_converge_table_reference_needs_match(capsys):
    code, _, err = run(capsys, "converge", "--vol", "0.4", "--reference", "table")
    assert code == 2 and "reference self" in err


def test_timing_singleton(capsys):
    code, out, _ = run(capsys, "timing", "--dates-list", "5", "--repeats", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)["summary"]["ratio"] == 1.0


def test_timing_large_dates(capsys):
    code, out, _ = run(capsys, "timing", "--dates-list", "10000", "--repeats", "1", "--format", "json")
    assert json.loads(out)["results"][0]["seconds"] < 1.0


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "jacobi_barrier", "price", "--format", "csv"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and r.stdout.startswith("case,")
