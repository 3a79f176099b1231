from __future__ import annotations

import numpy as np
import pytest
from scipy.special import eval_legendre

from endslab import eigenvalue, radial_apply, synthesize_kernel, zonal_kernel
from endslab.geometry import sphere_volume
from endslab.modes import RadialOperator, TruncationError, zonal_table


def test_eigenvalues():
    assert eigenvalue(0, 3) == 0
    # j(j+n-2) with j=1, n=3
    assert eigenvalue(1, 3) == 2
    assert eigenvalue(2, 5) == 10
    with pytest.raises(ValueError):
        eigenvalue(-1, 3)


def test_zonal_values():
    assert zonal_kernel(0, 0.3, 3) == pytest.approx(1 / (4 * np.pi), rel=1e-15)
    assert zonal_kernel(1, 1.0, 3) == pytest.approx(3 / (4 * np.pi), rel=1e-15)
    assert zonal_kernel(2, 0.0, 3) == pytest.approx(-5 / (8 * np.pi), rel=1e-14)


def test_zonal_legendre_n3():
    c = np.linspace(-1, 1, 41)
    Z = zonal_table(30, c, 3)
    for j in (3, 11, 30):
        assert np.allclose(Z[j], (2 * j + 1) / (4 * np.pi) * eval_legendre(j, c), atol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_zonal_constant_mode(n):
    assert zonal_kernel(0, 0.1, n) * sphere_volume(n) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("n", [3, 5])
def test_zonal_reproducing(n):
    # int Z_j(w.e) Z_j(w.e) dw = Z_j(1), integrated over c with weight (1-c^2)^{(n-3)/2}
    from scipy import integrate
    for j in (1, 4):
        f = lambda c: zonal_kernel(j, c, n) ** 2 * (1 - c * c) ** ((n - 3) / 2)
        val = sphere_volume(n - 1) * integrate.quad(f, -1, 1, epsabs=0, epsrel=1e-12)[0]
        assert val == pytest.approx(zonal_kernel(j, 1.0, n), rel=1e-10)


def test_zonal_domain():
    with pytest.raises(ValueError):
        zonal_kernel(1, 1.5, 3)


def test_radial_apply_flat_harmonic(flat):
    r = np.geomspace(1.0, 50.0, 400)
    for j, n in ((0, 3), (2, 3)):
        op = RadialOperator(flat, j, 0.0)
        out = radial_apply(op, r, r ** (-(n - 2 + j)))
        scale = np.abs(r ** (-(n + j))).max()
        assert np.nanmax(np.abs(out[3:-3])) / scale < 1e-3


def test_radial_apply_on_phi(two):
    from endslab import phi_plus
    prof = phi_plus(two)
    errs = []
    for N in (1001, 2001):
        r = np.linspace(-6, 6, N)
        out = radial_apply(RadialOperator(two, 0, 1.0), r, prof.phi(r))
        errs.append(np.max(np.abs(out - prof.phi(r))[2:-2]))
    # L_{0,1} Phi = Phi, second order in the spacing
    assert errs[1] < 1e-4
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_radial_apply_coarse(flat):
    with pytest.raises(ValueError):
        radial_apply(RadialOperator(flat, 0), np.linspace(1, 2, 5), np.ones(5))


def test_synthesis():
    res = synthesize_kernel([(0, 2.0)], 0.3, 3)
    assert res.value == pytest.approx(2.0 / (4 * np.pi))
    # alternating antipodal sum stays finite
    res = synthesize_kernel([(j, 0.5**j) for j in range(40)], -1.0, 3)
    assert np.isfinite(res.value) and res.last_term < 1e-8
    with pytest.raises(TruncationError):
        synthesize_kernel([(j, 1.0) for j in range(5)], 0.5, 3, strict=True)
