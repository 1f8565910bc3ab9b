import json
import math

import pytest

from kinkzeta.cli import parse_grid, read_csv, run_command, write_csv


def run_json(capsys, *argv):
    code = run_command([*argv, "--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_correction_d3(capsys):
    code, doc = run_json(capsys, "correction", "--d", "3", "--m", "1")
    assert code == 0
    assert doc["delta_eps"] == pytest.approx(1 / (4 * math.pi), abs=1e-7)
    assert doc["meta"]["config"]["d"] == 3


def test_energy_printed_closed_form(capsys):
    code, doc = run_json(capsys, "energy", "--model", "sg", "--kind", "kink", "--m", "1", "--g", "1")
    assert code == 0
    assert doc["rows"][0]["closed_form"] == 16.0


def test_resolvent_roots(capsys):
    code, doc = run_json(capsys, "resolvent", "--case", "D", "--k", "0.6")
    assert code == 0
    assert doc["roots"][1:4] == ["-3", "-27/25", "0"]


def test_exit_codes(capsys):
    assert run_command(["correction", "--bogus"]) == 64
    assert run_command(["nonsense"]) == 64
    assert run_command(["correction", "--m", "-1"]) == 2
    assert run_command(["resolvent", "--case", "B"]) == 2
    assert run_command(["correction", "--d", "5"]) == 2
    assert run_command(["errata"]) == 0
    capsys.readouterr()


def test_grid_parse():
    g = parse_grid("0.2:3:57")
    assert len(g) == 57 and g[0] == 0.2 and g[-1] == 3.0


@pytest.mark.parametrize("argv", [
    ["correction", "--d", "1", "--m-grid", "0.2:3:7"],
    ["profile", "--model", "phi4", "--kind", "periodic", "--k", "0.6", "--x-grid=-2:2:9"],
    ["zeta", "--case", "C", "--s-grid", "0.1:0.9:5"],
    ["heat-trace", "--case", "A", "--t-grid", "0.2:5:4"],
])
def test_csv_round_trip(tmp_path, argv):
    out = tmp_path / "a.csv"
    assert run_command([*argv, "--format", "csv", "--out", str(out)]) == 0
    text = out.read_text()
    cols, rows = read_csv(out)
    # rewriting the parsed values reproduces the file exactly
    assert write_csv(cols, rows) == text
    for r in rows:
        for v in r.values():
            if isinstance(v, float):
                assert float(repr(v)) == v


def test_deterministic_output_and_sidecar(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["correction", "--m-grid", "0.5:2:4", "--format", "csv"]
    assert run_command([*argv, "--out", str(a)]) == 0
    assert run_command([*argv, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["command"] == "correction"
    assert "time" not in json.dumps(meta).lower()


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[kinkzeta]\nd = 3\nm = 2\n")
    code, doc = run_json(capsys, "correction", "--config", str(cfg))
    assert code == 0
    assert doc["delta_eps"] == pytest.approx(4 / (4 * math.pi), rel=1e-12)
    code, doc = run_json(capsys, "correction", "--config", str(cfg), "--m", "1")
    assert doc["delta_eps"] == pytest.approx(1 / (4 * math.pi), rel=1e-12)
    bad = tmp_path / "bad.ini"
    bad.write_text("[kinkzeta]\nwhatever = 1\n")
    assert run_command(["correction", "--config", str(bad)]) == 64


def test_background_columns(capsys):
    code, doc = run_json(capsys, "correction", "--d", "1", "--m", "1", "--include-background")
    assert code == 0
    assert "delta_eps_background" in doc["columns"]


def test_verify_errata_suite(capsys):
    code, doc = run_json(capsys, "verify", "--suite", "errata")
    assert code == 0
    assert doc["all_passed"] is True
    assert len(doc["rows"]) >= 10


def test_verify_unknown_suite():
    assert run_command(["verify", "--suite", "nope"]) == 64


def test_verify_all_covers_every_criterion(capsys):
    code, doc = run_json(capsys, "verify", "--suite", "all")
    crits = {r["criterion"] for r in doc["rows"]}
    assert crits == set(range(1, 10))
    failed = [r for r in doc["rows"] if not r["passed"]]
    assert code == (3 if failed else 0)
