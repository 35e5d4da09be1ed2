import csv
import io
import json
from pathlib import Path

import pytest

from nonscatter.cli import load_config, run, validate_config
from nonscatter.errors import ValidationError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_load_and_are_admissible(path, capsys):
    load_config(path)
    code, out, _ = _run(capsys, "check", "--config", str(path))
    assert code == 0
    assert json.loads(out)["report"]["admissible"] is True


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "q": 4.0,\n  "domain": }\n')
    with pytest.raises(ValidationError, match=r"line 3, column 13"):
        load_config(p)


def test_unknown_key_rejected():
    cfg = json.loads((CONFIGS / "circle.json").read_text())
    cfg["colour"] = "blue"
    with pytest.raises(ValidationError):
        validate_config(cfg)
    cfg = json.loads((CONFIGS / "circle.json").read_text())
    cfg["domain"]["params"]["centre"] = 0
    with pytest.raises(ValidationError):
        validate_config(cfg)


def test_exit_code_validation(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"q": -1}')
    code, _, err = _run(capsys, "stationary", "--config", str(p))
    assert code == 2 and "error" in err


def test_exit_code_admissibility(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "centered_ellipse.json").read_text())
    cfg["domain"]["params"] = {"a": 1.0, "b": 0.5}
    p = tmp_path / "thin.json"
    p.write_text(json.dumps(cfg))
    code, _, err = _run(capsys, "leading", "--config", str(p))
    assert code == 3 and "AdmissibilityError" in err
    code, out, _ = _run(capsys, "check", "--config", str(p))
    assert code == 0 and json.loads(out)["report"]["admissible"] is False


def test_missing_config(capsys):
    code, _, _ = _run(capsys, "scan")
    assert code == 2


def test_scan_zero_density(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "offset_disk.json").read_text())
    cfg["density"] = {"fourier": [[0, 0.0, 0.0]]}
    p = tmp_path / "zero.json"
    p.write_text(json.dumps(cfg))
    code, out, _ = _run(capsys, "scan", "--config", str(p), "--k", "10", "20", "--eta", "0", "1")
    rows = _csv(out)
    assert code == 0 and len(rows) == 4
    assert all(float(r["residual"]) == 0.0 and r["converged"] == "true" for r in rows)


def test_disk_subcommand(capsys):
    code, out, _ = _run(capsys, "disk", "--n", "1", "--kmax", "30")
    rows = _csv(out)
    assert code == 0 and len(rows) >= 1
    assert all(float(r["residual"]) < 1e-10 for r in rows)
    assert float(rows[0]["k_root"]) == pytest.approx(2.902608055212766, abs=1e-10)


def test_json_output_round_trip(capsys):
    code, out, _ = _run(capsys, "leading", "--config", str(CONFIGS / "centered_ellipse.json"),
                        "--format", "json", "--k", "20", "--eta", "0.5")
    doc = json.loads(out)
    assert code == 0
    validate_config(doc["config"])
    assert doc["columns"] == ["k", "eta", "N", "re", "im"] and len(doc["rows"]) == 1


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "rows.csv"
    code, out, _ = _run(capsys, "stationary", "--config", str(CONFIGS / "circle.json"), "--eta", "0", "--out", str(dest))
    assert code == 0 and out == ""
    assert len(_csv(dest.read_text())) == 4


@pytest.mark.parametrize("sub", ["stationary", "leading", "integral", "classify", "gmap", "decay"])
def test_subcommands_run(sub, capsys):
    code, out, _ = _run(capsys, sub, "--config", str(CONFIGS / "centered_ellipse.json"), "--k", "15", "30", "--eta", "0.5")
    assert code == 0 and len(_csv(out)) >= 1


def test_integral_derivative(capsys):
    code, out, _ = _run(capsys, "integral", "--config", str(CONFIGS / "centered_ellipse.json"), "--k", "10", "--eta", "0.5", "--N", "1")
    assert code == 0 and _csv(out)[0]["N"] == "1"


def test_negative_N(capsys):
    code, _, _ = _run(capsys, "leading", "--config", str(CONFIGS / "circle.json"), "--N", "-1")
    assert code == 2


def test_classify_random_is_seeded(capsys):
    argv = ["classify", "--config", str(CONFIGS / "offset_disk.json"), "--random", "20", "--seed", "3"]
    _, a, _ = _run(capsys, *argv)
    _, b, _ = _run(capsys, *argv)
    assert a == b and len(_csv(a)) == 20


def test_iterate_ellipse(capsys):
    code, out, _ = _run(capsys, "iterate", "--config", str(CONFIGS / "centered_ellipse.json"),
                        "--word", "T1^-1 T2 T1^-1 T2", "--t0", "0.3", "--steps", "6")
    rows = _csv(out)
    assert code == 0 and len(rows) >= 6
    assert all(r["confined"] == "true" for r in rows)
