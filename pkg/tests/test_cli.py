import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from uenodyn.cli import config_digest, run_command
from uenodyn.config import (
    ConfigError, config_text, parse_config, parse_config_text, parse_cyc, parse_cyc_matrix,
    resolved_config,
)
from uenodyn.cyclo import zeta

PISOT_CFG = """\
# Pisot companion on E^3
curve.model = legendre
curve.lambda = 3/2
n = 3
matrix = 0 0 1; 1 0 3; 0 1 3
points = 3,3
iterations = 40
"""


def run(argv, env_epoch="1700000000", monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(argv, out, err)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None), err.getvalue()


@pytest.fixture(autouse=True)
def fixed_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


@pytest.fixture
def pisot_file(tmp_path):
    path = tmp_path / "pisot3.cfg"
    path.write_text(PISOT_CFG)
    return path


# -- commands --------------------------------------------------------------------

def test_census_command():
    code, report, _ = run(["census", "--k", "4", "--n", "3"])
    assert code == 0 and report["status"] == "ok"
    assert report["payload"] == {"1/4": 8, "1/2": 28}
    assert report["timestamp"] == "2023-11-14T22:13:20Z"
    assert report["config_digest"] == config_digest(report["config"])


def test_census_closed_form_matches():
    _, a, _ = run(["census", "--k", "2", "--n", "3"])
    _, b, _ = run(["census", "--k", "2", "--n", "3", "--closed-form"])
    assert a["payload"] == b["payload"] == {"1/2": 64}


def test_reports_are_deterministic():
    _, a, _ = run(["census", "--k", "6", "--n", "3"])
    _, b, _ = run(["census", "--k", "6", "--n", "3"])
    assert json.dumps(a) == json.dumps(b)


def test_autgroup_command():
    code, report, _ = run(["autgroup", "--k", "3", "--n", "4"])
    assert code == 0
    assert report["payload"]["translation_factors"] == [3, 3, 3, 3]
    code, report, _ = run(["autgroup", "--k", "2", "--n", "3", "--curve", "quartic"])
    assert code == 0 and report["payload"]["matrix_ring"] == "Z[zeta_4]"


def test_autgroup_small_n_fails():
    code, report, _ = run(["autgroup", "--k", "3", "--n", "2"])
    assert code == 2 and report["status"] == "failed"


def test_klein_command():
    code, report, _ = run(["klein"])
    assert code == 0
    p = report["payload"]
    assert p["units"]["torsion_order"] == 14 and p["units"]["exhibited_rank"] == 2
    assert p["units"]["product_identity"] == "-1"
    assert p["relations"]["fixed_group_invariant_factors"] == [1, 1, 1, 1, 1, 7]
    assert p["conjugation_word"]["twist"] == 0
    code, report, _ = run(["klein", "--units"])
    assert code == 0 and set(report["payload"]) == {"units"}


def test_klein_flags_are_exclusive():
    code, report, err = run(["klein", "--units", "--relations"])
    assert code == 64 and report is None and "not allowed" in err


def test_pisot_command():
    code, report, _ = run(["pisot", "--n", "3"])
    assert code == 0
    assert report["payload"]["coefficients"] == [-1, -3, -3, 1]
    assert report["payload"]["matrix"] == [[0, 0, 1], [1, 0, 3], [0, 1, 3]]
    code, report, _ = run(["pisot", "--n", "7"])
    assert code == 2 and "error" in report["payload"]


def test_dyndeg_klein_unit():
    code, report, _ = run(["dyndeg", "--klein-unit", "1+z"])
    assert code == 0
    p = report["payload"]
    assert p["exact_witnesses"] == [8, -8] and p["invariant_divisor_free"]
    assert abs(p["d1"]["approx"] - 3.2469796037) < 1e-9


def test_dyndeg_matrix_file(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("1+z, 1\n1, 1-z^2\n")
    code, report, _ = run(["dyndeg", "--k", "3", "--n", "2", "--matrix", str(path)])
    assert code in (0, 2)
    code, _, err = run(["dyndeg", "--k", "3"])
    assert code == 64


def test_dyndeg_rejects_non_invertible(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("1, 1; 1, 1")
    code, report, _ = run(["dyndeg", "--k", "4", "--n", "2", "--matrix", str(path)])
    assert code == 2 and report["status"] == "failed"


def test_ksc_end_to_end(pisot_file, tmp_path):
    csv_path = tmp_path / "series.csv"
    code, report, _ = run(["ksc", "--config", str(pisot_file), "--csv", str(csv_path)])
    assert code == 0 and report["status"] == "ok"
    verdict = report["payload"]["verdict"]
    assert verdict["verdict"] == "consistent" and verdict["discrepancy"] < 1e-3
    assert report["payload"]["density"]["verdict"] == "plausibly-dense"
    assert report["config"]["curve.lambda"] == "3/2"
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == ["m", "hhat", "ratio", "log_hhat"]
    assert len(rows) == 42
    assert rows[1][2] == "" and abs(float(rows[-1][2]) - 14.8019) < 1e-3


def test_arithdeg_torsion_csv(tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text("curve.model = legendre\ncurve.lambda = 3/2\nn = 2\nmatrix = 2 1; 1 1\npoints = 0,0\niterations = 5\n")
    csv_path = tmp_path / "t.csv"
    code, report, _ = run(["arithdeg", "--config", str(cfg), "--csv", str(csv_path)])
    assert code == 0 and report["payload"]["limit_estimate"] == 1.0
    rows = list(csv.reader(csv_path.open()))[1:]
    assert len(rows) == 6 and all(float(r[1]) == 0 for r in rows)


def test_ksc_inconclusive_is_flagged(tmp_path):
    cfg = tmp_path / "b.cfg"
    cfg.write_text("curve.model = legendre\ncurve.lambda = 3/2\nn = 2\nmatrix = 1 1; 0 1\n"
                   "points = 3,3\niterations = 10\n")
    code, report, _ = run(["ksc", "--config", str(cfg)])
    assert code == 1 and report["status"] == "flagged"


def test_usage_errors():
    assert run([])[0] == 64
    assert run(["bogus"])[0] == 64
    assert run(["census", "--k", "5", "--n", "2"])[0] == 64
    assert run(["census", "--k", "2"])[0] == 64
    assert run(["census", "--k", "2", "--n", "2", "--frobnicate"])[0] == 64


def test_missing_config_file(tmp_path):
    code, report, err = run(["ksc", "--config", str(tmp_path / "nope.cfg")])
    assert code == 2 and "cannot read" in err


def test_selftest_command():
    code, report, _ = run(["selftest"])
    assert code == 0
    assert all(c["passed"] for c in report["payload"]["checks"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "uenodyn", "census", "--k", "3", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"] == {"1/3": 9}


# -- configuration files ---------------------------------------------------------------

def test_config_round_trip(pisot_file):
    cfg = parse_config(pisot_file)
    assert cfg.curve.lam == Fraction(3, 2) and cfg.n == 3 and len(cfg.base_points) == 3
    again = parse_config_text(config_text(cfg))
    assert resolved_config(again) == resolved_config(cfg)


def test_minimal_config_round_trip():
    cfg = parse_config_text("curve.model = sextic\nn = 1\nmatrix = 1\npoints = 1,0\n")
    assert cfg.iterations == 40 and cfg.tol_gram == 1e-8
    assert resolved_config(parse_config_text(config_text(cfg))) == resolved_config(cfg)


@pytest.mark.parametrize("text, needle", [
    (PISOT_CFG.replace("3/2", "1"), "must not be 0 or 1"),
    (PISOT_CFG.replace("points = 3,3", "points = 3,4"), "is not on"),
    (PISOT_CFG.replace("0 0 1; 1 0 3; 0 1 3", "2 0 0; 0 1 0; 0 0 1"), "not unimodular"),
    (PISOT_CFG + "colour = blue\n", "unknown key"),
    (PISOT_CFG + "n = 4\n", "duplicate key"),
    (PISOT_CFG.replace("n = 3", "n = three"), "n must be an integer"),
    (PISOT_CFG.replace("0 0 1; 1 0 3; 0 1 3", "1 0; 0 1"), "expected 3x3"),
    (PISOT_CFG.replace("points = 3,3", "points = 3,3; 3,3"), "expected 1 or 3 points"),
    (PISOT_CFG.replace("legendre", "hyperbolic"), "curve.model"),
    ("curve.model = legendre\n", "curve.lambda"),
    (PISOT_CFG.replace("iterations = 40", "iterations = 0"), "iterations must be positive"),
    (PISOT_CFG + "tol.gram = -1\n", "must be positive"),
])
def test_config_diagnostics(text, needle):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert needle in str(info.value)


def test_config_error_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text(PISOT_CFG.replace("3/2", "0"))
    assert info.value.line == 3 and str(info.value).startswith("line 3:")


def test_cli_config_error_exit(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text(PISOT_CFG.replace("3/2", "1"))
    code, report, err = run(["ksc", "--config", str(path)])
    assert code == 2 and report["status"] == "failed" and "line 3" in err


def test_parse_cyc():
    z = zeta(7)
    assert parse_cyc("1 + z", 7) == 1 + z
    assert parse_cyc("-(z**5 + z^3 + z)", 7) == -(z ** 5 + z ** 3 + z)
    assert parse_cyc("2*z - 3", 4) == 2 * zeta(4) - 3
    for bad in ("x + 1", "z / 2", "__import__('os')", "1.5", "z**z"):
        with pytest.raises(ValueError):
            parse_cyc(bad, 7)


def test_parse_cyc_matrix():
    m = parse_cyc_matrix("1+z, 0; 0, 1", 3)
    assert m.shape == (2, 2) and m[0, 0] == 1 + zeta(3)
    with pytest.raises(ValueError):
        parse_cyc_matrix("1, 2; 3", 3)
