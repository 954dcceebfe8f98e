import csv
import io
import json

import numpy as np
import pytest

from artifact.cli import OUTPUT_ENV, bisect_threshold, main, render


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_steer_sweep_matches_closed_form(capsys):
    code, out, _ = run(capsys, "steer", "--family", "epr", "--n", "2", "--r", "0.5", "--r", "1.0")
    assert code == 0
    got = rows(out)
    assert [float(r["r"]) for r in got] == [0.5, 1.0]
    assert float(got[1]["S_1|2"]) == pytest.approx(1 / np.cosh(2.0), abs=1e-9)


def test_grid_defaults_and_points(capsys):
    code, out, _ = run(capsys, "criteria", "--family", "ghz", "--points", "5", "--stop", "2.0")
    assert code == 0
    assert [float(r["r"]) for r in rows(out)] == [0.0, 0.5, 1.0, 1.5, 2.0]


def test_criteria_columns(capsys):
    code, out, _ = run(capsys, "criteria", "--family", "ghz", "--r", "1.0", "--criterion", "criterion1b", "--criterion", "dgcz")
    row = rows(out)[0]
    assert code == 0
    assert row["criterion1b_violated"] == "true"
    assert row["dgcz_violated"] == "false"


def test_gains_table_row(capsys):
    code, out, _ = run(capsys, "gains", "--family", "ghz", "--table", "1-23", "--r", "0.25")
    assert code == 0
    row = rows(out)[0]
    assert row["S_1|23:h2"] == "-0.27" and row["S_1|23:g2"] == "0.36"


def test_monogamy_json(capsys):
    code, out, _ = run(capsys, "monogamy", "--family", "ghz", "--r", "0.5", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)
    assert row["monogamy-1_lhs"] == pytest.approx(1.0, abs=1e-6)


def test_state_dump(capsys):
    code, out, _ = run(capsys, "state", "--family", "epr", "--n", "2", "--r", "0.5", "--format", "json")
    cov = np.array(json.loads(out)["cov"])
    assert code == 0
    assert cov[0, 0] == pytest.approx(np.cosh(1.0))


def test_state_from_spec(tmp_path, capsys):
    spec = tmp_path / "net.json"
    spec.write_text(json.dumps({"n_modes": 2, "inputs": [{"r": 0.5, "axis": "p"}, None], "splitters": [[0, 1, 0.5]]}))
    code, out, _ = run(capsys, "state", "--spec", str(spec), "--format", "json")
    assert code == 0
    assert json.loads(out)["n_modes"] == 2


def test_certify_bundled_to_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path))
    code, out, _ = run(capsys, "certify", "--bundled", "cluster_2012.json", "--output", "cert.json")
    assert code == 0 and out == ""
    cert = json.loads((tmp_path / "cert.json").read_text())
    assert cert["flags"]["genuine-def3"] is True


def test_certify_input_file(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"records": [{"kind": "steering_product", "value": 0.8, "labels": ["1|23"]}]}))
    code, out, _ = run(capsys, "certify", "--input", str(path))
    assert code == 0
    assert json.loads(out)["flags"]["steering:1|23"] is True


def test_outputs_are_deterministic(capsys):
    first = run(capsys, "certify", "--bundled", "tripartite_epr_2015.json")[1]
    second = run(capsys, "certify", "--bundled", "tripartite_epr_2015.json")[1]
    assert first == second


def test_parallel_sweep_keeps_grid_order(capsys):
    serial = run(capsys, "steer", "--family", "ghz", "--points", "6", "--jobs", "1")[1]
    parallel = run(capsys, "steer", "--family", "ghz", "--points", "6", "--jobs", "3")[1]
    assert serial == parallel


def test_threshold_for_ghz(capsys):
    code, out, _ = run(capsys, "threshold", "--family", "ghz", "--criterion", "criterion1b")
    assert code == 0
    assert float(rows(out)[0]["r"]) == pytest.approx(0.7913, abs=2e-3)


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--family", "ghz", "--r", "1.0")
    assert code == 0
    assert json.loads(out)["flags"]["full-two-way"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["steer", "--family", "noon"],
        ["certify", "--input", "/nonexistent/file.json"],
        ["certify", "--bundled", "missing.json"],
        ["monogamy", "--k", "4", "--r", "0.5"],
        ["steer", "--R1", "1.5", "--r", "0.5", "--family", "epr"],
        [],
    ],
)
def test_bad_input_exits_one(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 1


def test_validation_error_is_json_on_stderr(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"records": [{"kind": "vlf_sum", "value": -1, "labels": ["I"]}]}))
    code, _, err = run(capsys, "certify", "--input", str(path))
    assert code == 1
    payload = json.loads(err)
    assert payload["error"] == "validation" and "$.records[0].value" in payload["message"]


def test_render_formats():
    text = render([{"r": 0.1, "ok": True}], "csv")
    assert text == "r,ok\n0.1,true\n"
    assert json.loads(render([{"r": 0.1}], "json")) == [{"r": 0.1}]


def test_bisect_threshold():
    assert bisect_threshold(lambda r: r > 0.3, 0.0, 1.0, 1e-6, 60) == pytest.approx(0.3, abs=1e-6)
