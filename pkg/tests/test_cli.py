import csv
import json

import pytest

from pamheat.cli import main
from pamheat.model import model_to_json, pam_model


@pytest.fixture()
def model_path(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model_to_json(pam_model(q=2.0, b=0.5, kappa=1.0))))
    return str(path)


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_analyze_outputs(tmp_path, model_path):
    out = tmp_path / "out"
    assert main(["analyze", "--model", model_path, "--out", str(out),
                 "--beta-grid", "0.5:8:5"]) == 0
    rows = _rows(out / "potential_profile.csv")
    assert rows[0] == ["beta", "upsilon", "err", "divergent"]
    assert len(rows) == 6
    verdicts = json.loads((out / "verdicts.json").read_text())
    assert verdicts["dalang"] is True
    assert verdicts["hawkes"] is True
    assert verdicts["condition2"] is True
    assert verdicts["transience"] == "InfiniteTotalOccupation"


def test_analyze_rejects_empty_beta_grid(tmp_path, model_path):
    with pytest.raises(SystemExit):
        main(["analyze", "--model", model_path, "--out", str(tmp_path),
              "--beta-grid", "1:2:0"])


def test_bounds_output(tmp_path, model_path):
    out = tmp_path / "out"
    assert main(["bounds", "--model", model_path, "--out", str(out),
                 "--p", "2,4"]) == 0
    payload = json.loads((out / "lyapunov.json").read_text())
    assert payload["reports"]["2"]["verdict"] == "WeaklyIntermittent"
    assert "4" in payload["reports"]
    assert payload["pam_phase_threshold"]["lower"] == pytest.approx(
        -1.7025109607383786, abs=1e-10)


def test_phase_sweep(tmp_path, model_path):
    out = tmp_path / "out"
    assert main(["phase", "--model", model_path, "--out", str(out),
                 "--sweep", "b=0.25,0.75"]) == 0
    rows = _rows(out / "phase.csv")
    assert rows[0] == ["param", "lambda_lower_c", "lambda_upper_c",
                       "verdict_at_lambda0"]
    assert len(rows) == 3
    assert rows[1][3] == "WeaklyIntermittent"


def test_phase_requires_sweep(tmp_path, model_path):
    with pytest.raises(SystemExit):
        main(["phase", "--model", model_path, "--out", str(tmp_path)])


def test_phase_bad_sweep_path(tmp_path, model_path):
    with pytest.raises(SystemExit):
        main(["phase", "--model", model_path, "--out", str(tmp_path),
              "--sweep", "nonsense.path=1,2"])


def test_regularity_output(tmp_path, model_path):
    out = tmp_path / "out"
    assert main(["regularity", "--model", model_path, "--out", str(out)]) == 0
    gauge = json.loads((out / "gauge.json").read_text())
    assert gauge["regime"] == "PolynomialGauge"
    rows = _rows(out / "gauge.csv")
    assert rows[0] == ["r", "d"]
    assert len(rows) > 10


def test_simulate_output(tmp_path, model_path):
    out = tmp_path / "out"
    assert main(["simulate", "--model", model_path, "--out", str(out),
                 "--grid", "64", "--period", "8", "--dt", "2e-3",
                 "--horizon", "0.1", "--replicas", "10", "--seed", "4"]) == 0
    rows = _rows(out / "trajectory.csv")
    assert rows[0] == ["t", "m2_site", "m2_avg", "mp_site", "mp_avg"]
    summary = json.loads((out / "summary.json").read_text())
    assert "gamma_hat" in summary and "config_hash" in summary


def test_model_json_strictness(tmp_path):
    obj = model_to_json(pam_model(q=2.0, b=0.5))
    obj["surprise"] = 1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(obj))
    with pytest.raises(ValueError):
        main(["analyze", "--model", str(path), "--out", str(tmp_path)])


def test_verify_passes():
    assert main(["verify", "--seed", "3"]) == 0
