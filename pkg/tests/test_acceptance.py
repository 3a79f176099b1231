"""Acceptance criteria 1-13, each run from its catalog config.

Every criterion prints one ``criterion N: PASS/FAIL`` line (collected in the
terminal summary).  Tolerances live in the configs under ``experiments/`` and
in the experiment defaults; ``PINNED`` fixes every target and caps every
tolerance, so a loosened config fails here.
"""
from __future__ import annotations

from pathlib import Path

import pytest

from endslab.cli import load_config
from endslab.lab import REGISTRY, resolve_params, run_experiment

pytestmark = pytest.mark.slow

CATALOG = Path(__file__).resolve().parents[1] / "experiments"

CONFIGS = {
    1: "c01_flat_resolvent.ini", 2: "c02_flat_heat.ini", 3: "c03_contour_identity.ini",
    4: "c04_harmonic_profile.ini", 5: "c05_rb0_coefficient.ini", 6: "c06_parametrix.ini",
    7: "c07_riesz_kernel.ini", 8: "c08_riesz_threshold.ini", 9: "c09_heat_limit.ini",
    10: "c10_heat_offdiag.ini", 11: "c11_cohomology.ini", 12: "c12_volume_growth.ini",
    13: "c13_infrastructure.ini",
}

# criterion -> check name -> (target or None, largest allowed tolerance)
PINNED = {
    1: {"max_rel_error": (0.0, 1e-6)},
    2: {"max_rel_error": (0.0, 1e-4)},
    3: {"max_rel_error": (0.0, 1e-6)},
    4: {"harmonic_residual": (0.0, 1e-8), "limit_minus": (0.0, 1e-6), "limit_plus": (1.0, 1e-6),
        "phi_at_0": (0.5, 1e-12), "coefficient_plus": (None, 1e-8), "coefficient_minus": (None, 1e-8)},
    5: {"max_rel_error_vs_phi": (0.0, 0.02), "one_end_control": (1.0, 0.01)},
    6: {"exponent_corrected": (2.0, 0.15), "exponent_uncorrected": (1.0, 0.15)},
    7: {"exponent_z-0.5": (2.0, 0.1), "exponent_z0": (2.0, 0.1), "exponent_z0.5": (2.0, 0.1),
        "coefficient_spread": (0.0, 0.05), "exponent_one_end_control": (3.0, 0.1)},
    8: {"norm_F_3_variation": (0.0, 0.01), "T_at_z0_strictly_increasing": (0.0, 0.0),
        "loglog_fit_r2": (1.0, 0.01), "ratio_2_variation_top_decade": (0.0, 0.05),
        "one_end_control_converges": (0.0, 1e-3)},
    9: {"l0_rel_error_at_largest_t": (0.0, 0.03), "l1_rel_error_at_largest_t": (0.0, 0.05),
        "l1_nonvanishing": (1.0, 0.5)},
    10: {"cross_end_slope": (-2.0, 0.1), "cross_end_cauchy_top_half_decade": (0.0, 0.02),
         "same_end_slope": (-1.5, 0.1), "q_symmetry": (0.0, 0.02)},
    11: {"grad_Ln_times_log_spread": (0.0, 0.1), "ibp_recombination": (0.0, 1e-6),
         "p_eq_n_error_decreasing": (0.0, 0.0), "p_eq_n_log_exponent": (-2 / 3, 0.15),
         "p4_hdchi_bounded_top_decade": (0.0, 0.1), "p2_hdchi_diverges": (10.0, 0.0),
         "dh_l2_vs_energy": (None, 1e-8)},
    12: {"slope": (3.0, 0.05)},
    13: {"wronskian_constancy": (0.0, 1e-8), "green_symmetry": (0.0, 0.0),
         "heat_mass_conservation": (0.0, 1e-3), "determinism_byte_exact": (0.0, 0.0)},
}

P4 = "p4_hdchi_bounded_top_decade"
_cache = {}


def _report(crit):
    if crit not in _cache:
        cfg = load_config(CATALOG / CONFIGS[crit])
        assert REGISTRY[cfg["experiment"]].criterion == crit
        _cache[crit] = run_experiment(cfg["experiment"], cfg["model"], cfg["params"])
    return _cache[crit]


def _line(crit, rep):
    bad = [c.name for c in rep.checks if not c.passed]
    status = "PASS" if rep.passed else "FAIL"
    tail = f" (failed: {', '.join(bad)})" if bad else ""
    return f"criterion {crit}: {status} {rep.name} [{len(rep.checks)} checks]{tail}"


def _record(log, crit, rep):
    line = _line(crit, rep)
    print(line)
    log.append(line)


def _pinned(crit, rep):
    checks = {c.name: c for c in rep.checks}
    for name, (target, tol) in PINNED[crit].items():
        assert name in checks, f"criterion {crit}: missing check {name}"
        c = checks[name]
        if target is not None:
            assert c.target == pytest.approx(target, abs=1e-12), name
        assert c.tol <= tol + 1e-12, f"{name} tolerance loosened to {c.tol}"


@pytest.mark.parametrize("crit", [c for c in CONFIGS if c != 11])
def test_criterion(crit, acceptance_log):
    rep = _report(crit)
    _record(acceptance_log, crit, rep)
    _pinned(crit, rep)
    assert rep.checks, "experiment declared no checks"
    failed = [(c.name, c.value, c.target, c.tol) for c in rep.checks if not c.passed]
    assert not failed, failed


def test_criterion_11(acceptance_log):
    rep = _report(11)
    _record(acceptance_log, 11, rep)
    _pinned(11, rep)
    names = {c.name for c in rep.checks}
    assert P4 in names
    failed = [(c.name, c.value) for c in rep.checks if not c.passed and c.name != P4]
    assert not failed, failed


@pytest.mark.xfail(strict=True, reason="||h dchi_k||_4^4 is bounded but tends to 0 like (log k)^-4 / k, "
                                        "so its top-decade variation is about 49x, not below 10%")
def test_criterion_11_p4_boundedness():
    rep = _report(11)
    check = next(c for c in rep.checks if c.name == P4)
    assert check.passed, f"spread {check.value:.3g} > {check.tol}"


def test_catalog_defaults_not_loosened():
    # the configs may only tighten the experiment defaults
    for crit, fname in CONFIGS.items():
        cfg = load_config(CATALOG / fname)
        exp = REGISTRY[cfg["experiment"]]
        P = resolve_params(exp, cfg["params"])
        for key, default in exp.defaults.items():
            if key.startswith("tol") and isinstance(default, float):
                assert P[key] <= default, (fname, key)
