from __future__ import annotations

import json

import numpy as np
import pytest

from endslab.report import ExperimentReport, config_hash, fit_loglog, richardson, write_atomic


def test_exact_power_law():
    r = np.geomspace(1, 100, 10)
    fit = fit_loglog(r, r**-2.0)
    assert fit["slope"] == pytest.approx(-2.0, abs=1e-12)
    assert fit["residual"] < 1e-12


def test_constant_series():
    assert fit_loglog(np.arange(1, 8), np.full(7, 3.0))["slope"] == pytest.approx(0.0, abs=1e-12)


def test_outward_window():
    f = lambda r: r**-2.0 * (1 + 1 / r)
    s = [fit_loglog(r, f(r))["slope"] for r in (np.geomspace(a, 10 * a, 8) for a in (1, 10, 100, 1000))]
    assert np.all(np.diff(np.abs(np.array(s) + 2)) < 0)
    assert abs(s[-1] + 2) < 1e-3


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_loglog([1, 2, 3], [1, 2, 3])
    with pytest.raises(ValueError):
        fit_loglog([1, 2, 3, 4, 5], [1, -2, 3, 4, 5])


def test_richardson():
    x = 2.0 ** np.arange(5)
    v = 1 + 3 / x + 5 / x**2
    lev = richardson(richardson(v, 1), 2)
    assert np.allclose(lev, 1.0, atol=1e-13)


def test_report_serialization(tmp_path):
    rep = ExperimentReport("demo", [dict(a=1.0, b=2), dict(a=0.5, c="x")])
    rep.fits["f"] = dict(slope=1.0)
    rep.check("ok", 1.0, 1.0, 1e-9)
    rep.check("bad", 2.0, 1.0, 0.1, relative=True)
    assert not rep.passed
    text = rep.to_csv({"version": "1"})
    assert text.splitlines()[0] == "# version: 1"
    assert "a,b,c" in text and "FAIL" in text
    doc = json.loads(rep.to_json())
    assert doc["passed"] is False and doc["rows"][1]["c"] == "x"
    p = tmp_path / "sub" / "out.csv"
    write_atomic(str(p), text)
    assert p.read_text() == text
    assert config_hash("abc") == config_hash("abc") != config_hash("abd")
