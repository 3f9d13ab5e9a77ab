import csv
import io
import json
import math
from pathlib import Path

import mpmath
import pytest

from oddzeta.cli import main, parse_angle
from oddzeta.errors import SchemaError

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def csv_rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config ")
    return json.loads(lines[0][len("# config "):]), list(csv.DictReader(lines[1:]))


def error_line(err):
    doc = json.loads(err.strip())
    assert set(doc) == {"error", "exit", "message"}
    return doc


def test_det_sym_csv_row():
    code, out, _ = run("det", "--op", FIX / "dc.json", "--theta", "2.0", "--sym")
    assert code == 0
    cfg, rows = csv_rows(out)
    assert cfg["theta"] == 2.0 and cfg["k_expand"] == 6 and cfg["n_tail"] == 10000
    assert len(rows) == 1
    row = rows[0]
    assert float(row["log_det_sym_re"]) == pytest.approx(math.log(2 * math.sin(math.pi / 3)), abs=1e-9)
    assert abs(float(row["log_det_sym_im"])) < 1e-9
    assert float(row["partner"]) == pytest.approx(2.0 - math.pi)


def test_det_paired_sign_is_negative():
    code, out, _ = run("det", "--op", FIX / "dc_paired.json", "--theta", "3*pi/4", "--sym", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["rows"][0]["det_sym_re"] < 0


def test_det_laplace_closed_form():
    code, out, _ = run("det", "--op", FIX / "laplace.json", "--theta", "pi")
    _, rows = csv_rows(out)
    assert code == 0
    assert float(rows[0]["det_re"]) == pytest.approx(4 * math.sinh(math.pi) ** 2, rel=1e-6)


def test_exit_codes():
    code, _, err = run("det", "--op", FIX / "dc_paired.json", "--theta", "pi/2")
    assert code == 3 and error_line(err)["error"] == "not_agmon"
    code, _, err = run("det", "--op", FIX / "dc.json", "--theta", "90deg")
    assert code == 2
    code, _, err = run("det", "--op", FIX / "laplace.json", "--theta", "pi", "--fit-radius", "0.6")
    assert code == 4 and error_line(err)["exit"] == 4
    code, _, _ = run("det", "--op", FIX / "dc.json")
    assert code == 2
    code, _, _ = run("frobnicate")
    assert code == 2


def test_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run("det", "--op", bad, "--theta", "2.0")
    assert code == 2 and error_line(err)["exit"] == 2
    bad.write_text(json.dumps({"kind": "spectral", "order": 1}))
    assert run("det", "--op", bad, "--theta", "2.0")[0] == 2
    assert run("det", "--op", tmp_path / "missing.json", "--theta", "2.0")[0] == 2


def test_depth_insufficient(tmp_path):
    data = json.loads((FIX / "sym_order1.json").read_text())
    data["exact"] = False
    data["components"] = data["components"][:1]
    path = tmp_path / "trunc.json"
    path.write_text(json.dumps(data))
    code, _, err = run("residue", "--coboundary", path, path, path, "--theta", "pi/2")
    assert code == 5 and error_line(err)["error"] == "depth_insufficient"


def test_parse_angle():
    assert parse_angle("3*pi/4") == pytest.approx(3 * math.pi / 4)
    assert parse_angle("-pi") == pytest.approx(-math.pi)
    for bad in ("90deg", "45°", "__import__('os')", "pi**pi**pi**pi"):
        with pytest.raises((SchemaError, Exception)):
            parse_angle(bad)


def test_residue_odd_class_vanishes():
    code, out, _ = run("residue", "--symbolfile", FIX / "sym_odd_m1.json", FIX / "sym_even_m1.json")
    assert code == 0
    _, rows = csv_rows(out)
    assert rows[0]["vanishes"] == "true" and abs(float(rows[0]["residue_re"])) < 1e-12
    assert rows[1]["vanishes"] == "false"


def test_coboundary_symmetrized_vanishes():
    code, out, _ = run("residue", "--coboundary", FIX / "sym_order1.json", FIX / "sym_order1.json",
                       FIX / "sym_order2.json", "--theta", "pi/2", "--symmetrized", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert abs(complex(row["coboundary_re"], row["coboundary_im"])) < 1e-8
    assert row["passed"] is True


def test_anomaly_quadrature():
    code, out, _ = run("residue", "--anomaly", FIX / "sym_order1.json", FIX / "sym_order1.json",
                       "--theta", "pi/2", "--theta2", "pi/2", "--quad-nodes", "3", "--depth", "3",
                       "--bandwidth", "8", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 4 and rows[-1]["t"] == "integral"
    assert rows[-1]["max_abs"] < 1e-8 and rows[-1]["passed"] is True


def test_zeta_values():
    code, out, _ = run("zeta", "--op", FIX / "laplace.json", "--theta", "pi", "--s", "-2", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    ref = float(mpmath.nsum(lambda n: (n * n + 1) ** -2, [-mpmath.inf, mpmath.inf]))
    assert rows[0]["zeta_re"] == pytest.approx(ref, rel=1e-12)
    assert abs(rows[1]["zeta_re"]) < 1e-7  # zeta(0) of an even-order operator


def test_trace_odd_log():
    code, out, _ = run("trace", "--op", FIX / "dc.json", "--op", FIX / "laplace.json", "--theta", "3*pi/4",
                       "--theta2", "pi", "--family", "odd-log", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["tr_sym_re"] == pytest.approx(math.log(2 * math.sin(math.pi / 3)), abs=1e-6)


def test_symbol_commands():
    code, out, _ = run("symbol", "compose", "--symbolfile", FIX / "sym_order1.json", FIX / "sym_order1.json",
                       "--depth", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["symbol"]["order"] == 2 and len(doc["symbol"]["components"]) == 3
    code, out, _ = run("symbol", "log", "--symbolfile", FIX / "sym_order1.json", "--theta", "pi/2",
                       "--depth", "2", "--format", "json")
    assert code == 0
    assert json.loads(out)["symbol"]["gamma"] == [1.0, 0.0]
    code, _, _ = run("symbol", "power", "--symbolfile", FIX / "sym_order1.json", "--theta", "pi/2", "--s", "0.5")
    assert code == 0


def test_verify_table_and_failure():
    code, out, _ = run("verify", "trace", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert all(r["passed"] for r in rows)
    assert {"suite", "fixture", "check", "measured", "tolerance", "passed"} <= set(rows[0])
    code, _, _ = run("verify", "trace", "--tol", "1e-30")
    assert code == 1


@pytest.mark.slow
def test_verify_sign_table():
    code, out, _ = run("verify", "sign")
    assert code == 0
    _, rows = csv_rows(out)
    law = [r for r in rows if r["check"] == "sign law"]
    assert len(law) >= 10
    for r in law:
        assert "m_plus=" in r["details"] and "predicted=" in r["details"] and "measured=" in r["details"]


def test_output_is_deterministic():
    args = ("det", "--op", FIX / "dc_paired.json", "--theta", "3*pi/4", "--sym", "--format", "json")
    assert run(*args)[1] == run(*args)[1]
    args = ("symbol", "power", "--symbolfile", FIX / "sym_order2.json", "--theta", "pi", "--s", "0.5")
    assert run(*args)[1] == run(*args)[1]


def test_seed_env(monkeypatch):
    monkeypatch.setenv("ODDZETA_SEED", "7")
    code, out, _ = run("verify", "trace", "--format", "json")
    assert code == 0 and json.loads(out)["config"]["seed"] == 7
