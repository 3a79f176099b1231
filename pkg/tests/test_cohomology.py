from __future__ import annotations

import numpy as np
import pytest

from endslab import ModelManifold, dirichlet_energy, grad_cutoff_Ln_norm, ibp_terms, linear_cutoff_check, log_cutoff, phi_plus
from endslab.cohomology import cutoff_error_norm, dh_l2_squared, hdchi_norm


def test_log_cutoff_values():
    k = 10.0
    chi, grad = log_cutoff(k, [1.0, 10.0, 31.6227766, 100.0, 1e3])
    assert np.allclose(chi, [1.0, 1.0, 0.5, 0.0, 0.0], atol=1e-8)
    assert grad[2] == pytest.approx(1 / (31.6227766 * np.log(10.0)))
    assert grad[0] == 0 and grad[-1] == 0
    with pytest.raises(ValueError):
        log_cutoff(2.0, 1.0)


def test_grad_cutoff_Ln_flat_closed_form(flat):
    # on R^3: vol(S^2) int_k^{k^2} r^{-1} (log k)^{-3} dr = 4 pi / (log k)^2
    for k in (10.0, 100.0):
        assert grad_cutoff_Ln_norm(flat, k) == pytest.approx(4 * np.pi / np.log(k) ** 2, rel=1e-9)
    with pytest.raises(ValueError):
        grad_cutoff_Ln_norm(ModelManifold.two_end(neck_radius=20.0, neck_min=5.0), 10.0)


def test_linear_cutoff_p3(two):
    rep = linear_cutoff_check(two, 3.0)
    assert rep.fits["exponent"]["slope"] == pytest.approx(-3.0, abs=0.2)
    assert not rep.flags["boundary_case"]


@pytest.mark.xfail(strict=True, reason="harmonic potential gives exponent n-(n-1)p = -2 at p=2.5; "
                                        "(2-p)n = -1.5 is only an upper bound")
def test_linear_cutoff_p25_bound_exponent(two):
    rep = linear_cutoff_check(two, 2.5)
    assert rep.fits["exponent"]["slope"] == pytest.approx(-1.5, abs=0.2)


def test_linear_cutoff_p25_within_bound(two):
    rep = linear_cutoff_check(two, 2.5)
    s = rep.fits["exponent"]["slope"]
    assert s == pytest.approx(rep.fits["bound"]["harmonic_exact"], abs=0.05)
    assert s <= rep.fits["bound"]["decay_bound"]


def test_linear_cutoff_p2_boundary(two):
    rep = linear_cutoff_check(two, 2.0)
    assert rep.flags["boundary_case"]
    assert rep.fits["exponent"]["slope"] == pytest.approx(-1.0, abs=0.05)


@pytest.mark.parametrize("p,k", [(3.0, 10.0), (3.0, 1000.0), (2.0, 100.0), (4.0, 50.0)])
def test_ibp(two, p, k):
    assert ibp_terms(two, p, k).rel_error < 1e-8


def test_ibp_flat_exact(flat):
    # int_k^{k^2} r^{-3} 4 pi r^2 dr = 4 pi log k
    t = ibp_terms(flat, 3.0, 20.0)
    assert t.direct == pytest.approx(4 * np.pi * np.log(20.0), rel=1e-10)


def test_dh_l2_equals_energy(two, asym):
    for m in (two, asym):
        assert dh_l2_squared(m) == pytest.approx(dirichlet_energy(phi_plus(m), "flux"), rel=1e-9)


def test_error_norm_decreases_at_p_eq_n(two):
    errs = [cutoff_error_norm(two, 3.0, k) for k in (10.0, 100.0, 1000.0)]
    assert errs[0] > errs[1] > errs[2]


def test_error_norm_rejects_small_p(two):
    with pytest.raises(ValueError):
        cutoff_error_norm(two, 1.4, 10.0)


def test_hdchi_p2_diverges(two):
    a, b = hdchi_norm(two, 2.0, 10.0), hdchi_norm(two, 2.0, 1000.0)
    assert b > 10 * a
