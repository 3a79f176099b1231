"""Experiment reports, log-log fitting and serialization."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np


def richardson(values, order: int):
    """One Richardson level for a doubling sequence with error ``~ x^{-order}``."""
    v = np.asarray(values)
    q = 2.0**order
    return (q * v[1:] - v[:-1]) / (q - 1.0)


def fit_loglog(x, y) -> dict:
    """Least-squares fit of ``log y = slope log x + intercept``.

    Returns ``slope``, ``intercept`` with standard errors, the RMS residual
    and ``r2``.  Needs at least 5 points; values must be positive.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 5:
        raise ValueError("need at least 5 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive values")
    return fit_linear(np.log(x), np.log(y))


def fit_linear(X, Y) -> dict:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    A = np.vstack([X, np.ones_like(X)]).T
    coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
    res = Y - A @ coef
    m = len(X)
    dof = max(m - 2, 1)
    s2 = float(res @ res) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    ss_tot = float(((Y - Y.mean()) ** 2).sum())
    r2 = 1.0 - float(res @ res) / ss_tot if ss_tot > 0 else 1.0
    return dict(slope=float(coef[0]), intercept=float(coef[1]),
                slope_stderr=float(math.sqrt(cov[0, 0])),
                intercept_stderr=float(math.sqrt(cov[1, 1])),
                residual=float(math.sqrt(np.mean(res**2))), r2=r2)


@dataclass
class Check:
    name: str
    value: float
    target: float
    tol: float
    passed: bool
    note: str = ""


@dataclass
class ExperimentReport:
    """Rows of named columns plus fits, flags and pass/fail checks."""

    name: str
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def check(self, name, value, target, tol, relative=False, note="", passed=None):
        """Record ``|value - target| <= tol`` (relative to ``|target|`` if asked)."""
        value = float(value)
        if passed is None:
            err = abs(value - target)
            if relative:
                err /= abs(target)
            passed = bool(np.isfinite(value) and err <= tol)
        self.checks.append(Check(name, value, float(target), float(tol), bool(passed), note))
        return passed

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def columns(self):
        cols = []
        for r in self.rows:
            for c in r:
                if c not in cols:
                    cols.append(c)
        return cols

    def to_csv(self, header: dict = None) -> str:
        buf = io.StringIO()
        for k, v in (header or {}).items():
            buf.write(f"# {k}: {v}\n")
        for name, fit in self.fits.items():
            buf.write(f"# fit {name}: " + ", ".join(f"{k}={_fmt(v)}" for k, v in fit.items()) + "\n")
        for c in self.checks:
            buf.write(f"# check {c.name}: value={_fmt(c.value)} target={_fmt(c.target)} "
                      f"tol={_fmt(c.tol)} {'PASS' if c.passed else 'FAIL'}\n")
        for k, v in self.flags.items():
            buf.write(f"# flag {k}: {v}\n")
        for note in self.notes:
            buf.write(f"# note: {note}\n")
        cols = self.columns()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_fmt(r.get(c, "")) for c in cols])
        return buf.getvalue()

    def to_json(self, header: dict = None) -> str:
        doc = dict(name=self.name, header=header or {}, rows=_clean(self.rows), fits=_clean(self.fits),
                   flags=_clean(self.flags), notes=self.notes,
                   checks=[_clean(c.__dict__) for c in self.checks], passed=self.passed)
        return json.dumps(doc, indent=2, sort_keys=True)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v))
    return str(v)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def write_atomic(path: str, data: str):
    """Write ``data`` to ``path`` through a temporary file and rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(data)
    os.replace(tmp, path)
