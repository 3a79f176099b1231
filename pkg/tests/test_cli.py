from __future__ import annotations

import json
from pathlib import Path

import pytest

from endslab.cli import load_config, main
from endslab.lab import REGISTRY, ConfigError, resolve_params

CATALOG = Path(__file__).resolve().parents[1] / "experiments"


def _ini(tmp_path, text):
    p = tmp_path / "c.ini"
    p.write_text(text)
    return str(p)


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("phi", "heat-offdiag", "cohomology", "infrastructure"):
        assert name in out


def test_unknown_experiment():
    assert main(["nope"]) == 2


def test_bad_param(tmp_path):
    cfg = _ini(tmp_path, "[params]\nno_such_key = 1\n")
    assert main(["phi", "--config", cfg]) == 2


def test_bad_value(tmp_path):
    cfg = _ini(tmp_path, "[params]\npoints = many\n")
    assert main(["phi", "--config", cfg]) == 2


def test_too_few_points(tmp_path):
    cfg = _ini(tmp_path, "[params]\npoints = 4\n")
    assert main(["phi", "--config", cfg]) == 2


def test_bad_model_and_section(tmp_path):
    assert main(["phi", "--config", _ini(tmp_path, "[model]\ncolour = red\n")]) == 2
    assert main(["phi", "--config", _ini(tmp_path, "[extra]\na = 1\n")]) == 2


def test_config_name_mismatch(tmp_path):
    cfg = _ini(tmp_path, "[experiment]\nname = heat\n")
    assert main(["phi", "--config", cfg]) == 2


def test_missing_config_file(tmp_path):
    assert main(["phi", "--config", str(tmp_path / "missing.ini")]) == 2


def test_outputs_and_determinism(tmp_path, capsys):
    cfg = str(CATALOG / "c04_harmonic_profile.ini")
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["phi", "--config", cfg, "--out", str(d), "--format", "both", "--emit-plot", "svg"]) == 0
    out = capsys.readouterr().out
    assert "phi: PASS" in out
    csv = (a / "phi.csv").read_text()
    assert "# endslab_version: " in csv and "# criterion: 4" in csv and "# config_hash: " in csv
    assert json.loads((a / "phi.json").read_text())["passed"] is True
    for name in ("phi.csv", "phi.json", "phi.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_failing_check_exit_code(tmp_path):
    cfg = _ini(tmp_path, "[params]\ntol_residual = 1e-30\n")
    assert main(["phi", "--config", cfg]) == 1


def test_all_needs_directory(tmp_path):
    assert main(["all", "--config", str(tmp_path / "x.ini")]) == 2
    assert main(["all", "--config", str(tmp_path)]) == 2


@pytest.mark.parametrize("path", sorted(CATALOG.glob("*.ini")), ids=lambda p: p.name)
def test_catalog_parses(path):
    cfg = load_config(path)
    assert cfg["experiment"] in REGISTRY
    exp = REGISTRY[cfg["experiment"]]
    resolve_params(exp, cfg["params"])
    crit = path.read_text().split("criterion = ")
    if len(crit) > 1:
        assert int(crit[1].split()[0]) == exp.criterion


def test_resolve_rejects_unknown():
    with pytest.raises(ConfigError):
        resolve_params(REGISTRY["phi"], {"bogus": "1"})
