from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate

from endslab import ModelManifold, bounded_harmonic_h, dirichlet_energy, phi_expansion_coefficient, phi_plus
from endslab.harmonic import harmonic_residual, pointwise_residual


@pytest.fixture(scope="module", params=["two", "asym"])
def prof(request):
    return phi_plus(request.getfixturevalue(request.param))


def test_monotone_and_complement(prof):
    r = np.linspace(-50, 50, 2001)
    v = prof.phi(r)
    assert np.all(np.diff(v) > 0)
    assert np.allclose(v + prof.complement(r), 1.0, atol=1e-14)
    assert np.allclose(prof.phi_minus(r), 1.0 - v, atol=1e-14)


def test_scalar_input(prof):
    assert np.ndim(prof.phi(0.3)) == 0
    assert float(prof.complement(2.0)) == pytest.approx(1 - float(prof.phi(2.0)))


def test_continuity_at_neck_edges(prof):
    R = prof.model.neck_radius
    for e in (-R, R):
        a, b = prof.phi(e - 1e-12), prof.phi(e + 1e-12)
        assert abs(a - b) < 1e-11


def test_derivative_matches_flux(prof):
    # f^{n-1} Phi' = 1/I everywhere; compare with a centred difference
    r = np.array([-4.0, -0.6, 0.0, 0.5, 3.0])
    h = 1e-5
    fd = (prof.phi(r + h) - prof.phi(r - h)) / (2 * h)
    assert np.allclose(fd, prof.dphi(r), rtol=1e-7)
    f = prof.model.profile(r)
    assert np.allclose(f ** (prof.model.n - 1) * prof.dphi(r), 1 / prof.flux)


def test_flux_by_quadrature(prof):
    m = prof.model
    fn = lambda s: float(m.profile(s)) ** (1 - m.n)
    I = sum(integrate.quad(fn, a, b, limit=200)[0]
            for a, b in ((-np.inf, -1.0), (-1.0, 1.0), (1.0, np.inf)))
    assert prof.flux == pytest.approx(I, rel=1e-10)


def test_residual(prof):
    assert harmonic_residual(prof) < 1e-8
    res, scale = pointwise_residual(prof, np.linspace(-3, 3, 301))
    assert scale > 0 and np.max(np.abs(res)) / scale < 1e-8
    with pytest.raises(ValueError):
        harmonic_residual(prof, points=4)


def test_fd_residual_cross_check(two):
    assert harmonic_residual(phi_plus(two), points=4001, method="fd") < 1e-5


@pytest.mark.parametrize("end", [1, -1])
def test_expansion_coefficient_limit(prof, end):
    closed = phi_expansion_coefficient(prof, end)
    assert phi_expansion_coefficient(prof, end, method="limit") == pytest.approx(closed, rel=1e-6)


def test_symmetric_center(two):
    assert float(phi_plus(two).phi(0.0)) == pytest.approx(0.5, abs=1e-13)


@pytest.mark.parametrize("lam", [2.0, 0.5])
def test_scaling(lam):
    base = ModelManifold.two_end(neck_radius=1.0, neck_min=0.5, c_plus=0.3, c_minus=-0.2)
    scaled = ModelManifold.two_end(neck_radius=lam, neck_min=0.5 * lam, c_plus=0.3 * lam, c_minus=-0.2 * lam)
    a, b = phi_expansion_coefficient(phi_plus(base)), phi_expansion_coefficient(phi_plus(scaled))
    assert b / a == pytest.approx(lam ** (base.n - 2), rel=1e-9)
    assert float(phi_plus(scaled).phi(0.4 * lam)) == pytest.approx(float(phi_plus(base).phi(0.4)), rel=1e-10)


def test_higher_dimension():
    m = ModelManifold.two_end(n=5)
    prof = phi_plus(m)
    x = 300.0
    assert x**3 * float(prof.complement(x)) == pytest.approx(phi_expansion_coefficient(prof), rel=1e-12)


def test_bounded_h_and_energy(prof):
    h = bounded_harmonic_h(prof, np.array([-1e4, 0.0, 1e4]))
    assert h[0] == pytest.approx(-1, abs=1e-4) and h[-1] == pytest.approx(1, abs=1e-4)
    assert dirichlet_energy(prof) == pytest.approx(dirichlet_energy(prof, "flux"), rel=1e-9)


def test_one_end_constant(flat):
    prof = phi_plus(flat)
    assert np.all(prof.phi(np.linspace(0, 50, 11)) == 1.0)
    assert np.all(prof.dphi(np.linspace(0, 50, 11)) == 0.0)
    with pytest.raises(ValueError):
        phi_expansion_coefficient(prof)
