"""
Tests for the command-line dispatcher: exit codes and JSON output.
"""

import json

import numpy as np
import pytest

import main_verifier
from analytic import DilogParams, phi_zero
from check_report import CheckReport, check_entry
from exact_algebra import parse_ratfunc
from main_verifier import EXIT_FAIL, EXIT_OK, EXIT_USAGE, dispatch
from seed_loader import load_json, save_json


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("VERIFIER_SEED", "VERIFIER_JOBS", "VERIFIER_LEVEL", "VERIFIER_LOG_LEVEL", "VERIFIER_MAX_DIM"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("config.load_dotenv", lambda *args, **kwargs: False)


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_usage_errors(capsys):
    assert dispatch([]) == EXIT_USAGE
    assert dispatch(["braid", "verify", "--bogus"]) == EXIT_USAGE
    assert dispatch(["rk", "build"]) == EXIT_USAGE
    assert dispatch(["phi", "eval", "--z", "nonsense", "--b", "1"]) == EXIT_USAGE
    assert dispatch(["--help"]) == EXIT_OK
    capsys.readouterr()


def test_braid_verify_reports_pass(capsys):
    code, out = run(capsys, "braid", "verify", "--n", "3", "--mode", "y")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["status"] == "PASS"
    assert data["entries"][0]["check_id"] == "braid.y.n3.R1R2R1"


def test_braid_eval_generic_seed(capsys):
    code, out = run(capsys, "braid", "eval", "--n", "2", "--word", "s1", "--mode", "y")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["size"] == 7
    y1, y2, y4 = parse_ratfunc("y1"), parse_ratfunc("y2"), parse_ratfunc("y4")
    assert parse_ratfunc(data["y"][0]) == y1 * (1 + y2 + y2 * y4)


def test_braid_eval_rejects_bad_word(capsys):
    code, _ = run(capsys, "braid", "eval", "--n", "2", "--word", "s2")
    assert code == EXIT_USAGE


def test_cluster_mutate_and_summary(tmp_path, capsys):
    seed_file = save_json(tmp_path / "seed.json", {"size": 2, "B": [[0, 1], [-1, 0]], "x": ["x1", "x2"]})
    code, out = run(capsys, "cluster", "mutate", "--input", seed_file, "--ks", "1,2,1,2,1")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["x"] == ["x2", "x1"]
    assert data["B"] == [[0, -1], [1, 0]]

    code, out = run(capsys, "cluster", "summary", "--input", seed_file)
    assert json.loads(out)["arrows"] == 1


def test_missing_input_file(tmp_path, capsys):
    code, _ = run(capsys, "cluster", "summary", "--input", str(tmp_path / "missing.json"))
    assert code == EXIT_USAGE


def test_rk_build_and_check_file(tmp_path, capsys):
    out_path = str(tmp_path / "rk.json")
    code, out = run(capsys, "rk", "build", "--N", "2", "--out", out_path)
    assert code == EXIT_OK
    assert json.loads(out)["dim"] == 4
    assert load_json(out_path)["N"] == 2

    code, out = run(capsys, "rk", "braid-check", "--N", "2", "--input", out_path)
    assert code == EXIT_OK
    assert json.loads(out)["status"] == "PASS"


def test_rk_respects_max_dim(monkeypatch, capsys):
    monkeypatch.setenv("VERIFIER_MAX_DIM", "16")
    code, _ = run(capsys, "rk", "build", "--N", "5")
    assert code == EXIT_USAGE


def test_invalid_environment_is_usage_error(monkeypatch, capsys):
    monkeypatch.setenv("VERIFIER_JOBS", "zero")
    code, _ = run(capsys, "braid", "verify", "--n", "3")
    assert code == EXIT_USAGE


def test_phi_eval_matches_closed_form(capsys):
    code, out = run(capsys, "phi", "eval", "--z", "0", "--b", "0.7+0.2i")
    assert code == EXIT_OK
    re, im = json.loads(out)["value"]
    assert complex(re, im) == pytest.approx(phi_zero(DilogParams(0.7 + 0.2j)), rel=1e-9)


def test_phi_eval_rejects_parameter(capsys):
    # Im b^2 = 0 leaves the product domain
    code, _ = run(capsys, "phi", "eval", "--z", "0", "--b", "1")
    assert code == EXIT_USAGE


def test_volume_octa_from_file(tmp_path, capsys):
    y = [0.9 + 0.4j, 1.1 - 0.2j, 0.7 + 0.6j, -0.5 + 0.8j, 1.3 + 0.1j, 0.6 - 0.5j, 1.2 + 0.3j]
    path = save_json(tmp_path / "y.json", {"y": [[v.real, v.imag] for v in y]})
    code, out = run(capsys, "volume", "octa", "--y", path)
    assert code == EXIT_OK
    assert np.isfinite(json.loads(out)["value"])

    real = save_json(tmp_path / "real.json", [0.5, 1.5, 2.0, 0.3, 0.7, 1.1, 0.9])
    code, out = run(capsys, "volume", "octa", "--y", real)
    assert json.loads(out)["value"] == pytest.approx(0.0, abs=1e-12)


def test_arithmetic_error_exits_with_failure(monkeypatch, capsys):
    def broken(args, settings):
        raise ZeroDivisionError("singular")

    monkeypatch.setitem(main_verifier.HANDLERS, "braid", broken)
    code, _ = run(capsys, "braid", "verify")
    assert code == EXIT_FAIL


def test_failed_report_exits_with_failure(monkeypatch, capsys):
    def failing(args, settings):
        return CheckReport([check_entry("demo.fail", "always fails", False)], title="failing")

    monkeypatch.setitem(main_verifier.HANDLERS, "checkall", failing)
    code, out = run(capsys, "checkall", "--pretty")
    assert code == EXIT_FAIL
    assert "FAIL" in out
    assert "demo.fail" in out


def test_seed_flag_overrides_settings(monkeypatch, capsys):
    seen = {}

    def record(args, settings):
        seen["seed"] = settings.seed
        seen["jobs"] = settings.jobs
        return {"ok": True}

    monkeypatch.setitem(main_verifier.HANDLERS, "checkall", record)
    code, out = run(capsys, "checkall", "--seed", "5", "--jobs", "2")
    assert code == EXIT_OK
    assert seen == {"seed": 5, "jobs": 2}
    assert json.loads(out) == {"ok": True}


def test_unexpected_error_exits_with_usage(monkeypatch, capsys):
    def broken(args, settings):
        raise TypeError("unsupported operand")

    monkeypatch.setitem(main_verifier.HANDLERS, "braid", broken)
    assert dispatch(["braid", "verify"]) == EXIT_USAGE
    assert "TypeError" in capsys.readouterr().err
