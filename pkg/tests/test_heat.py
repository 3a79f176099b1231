from __future__ import annotations

import numpy as np
import pytest

from endslab import ContourSpec, ModelManifold, PointM, contour_identity_check, flat_heat, heat_kernel, heat_limit_experiment, phi_plus
from endslab.heat import mass_conservation, semigroup_check


def test_flat_heat_formula():
    assert flat_heat(3, 1.0, 0.0) == pytest.approx((4 * np.pi) ** -1.5)
    assert flat_heat(3, 2.0, 2.0) == pytest.approx((8 * np.pi) ** -1.5 * np.exp(-0.5))


@pytest.mark.parametrize("t,d", [(1.0, 0.1), (1.0, 2.0), (0.5, 10.0), (20.0, 3.0)])
def test_flat_heat_kernel(flat, t, d):
    z = PointM.on_axis(1.0)
    zp = PointM(np.hypot(1.0, d), (1 / np.hypot(1.0, d), d / np.hypot(1.0, d), 0.0))
    assert heat_kernel(flat, t, z, zp).value == pytest.approx(flat_heat(3, t, d), rel=1e-6)


def test_nonpositive_time(two):
    with pytest.raises(ValueError):
        heat_kernel(two, 0.0, PointM.on_axis(1.0), PointM.on_axis(2.0))


def test_contour_identity():
    lhs, rhs, err = contour_identity_check(3, 0.5)
    assert rhs == pytest.approx((4 * np.pi) ** -1.5 * 0.5**-3 * np.exp(-1.0))
    assert err < 1e-8
    assert contour_identity_check(5, 0.8)[2] < 1e-8


def test_envelope():
    spec = ContourSpec()
    assert spec.envelope_ratio(2.0) == pytest.approx(np.exp(-36.0))
    assert spec.truncation(1.0, 10.0) >= spec.smax(1.0)


def test_imaginary_residual(two):
    hv = heat_kernel(two, 2.0, PointM.on_axis(-1.5), PointM(3.0, (0.6, 0.8, 0.0)), conjugate=True)
    assert hv.imag_residual < 1e-8
    ref = heat_kernel(two, 2.0, PointM.on_axis(-1.5), PointM(3.0, (0.6, 0.8, 0.0)))
    assert hv.value == pytest.approx(ref.value, rel=1e-8)


def test_swap_symmetry_and_positivity(asym):
    z, zp = PointM.on_axis(-2.0), PointM(4.0, (0.0, 1.0, 0.0))
    a, b = heat_kernel(asym, 3.0, z, zp).value, heat_kernel(asym, 3.0, zp, z).value
    assert a > 0 and a == pytest.approx(b, rel=1e-10)


@pytest.mark.parametrize("t,r", [(0.5, 0.0), (4.0, 2.0)])
def test_mass(two, t, r):
    assert mass_conservation(two, t, r) == pytest.approx(1.0, abs=1e-8)


def test_semigroup(two):
    lhs, rhs, err = semigroup_check(two, 1.0, 2.0, 0.5, -1.0, j=1)
    assert err < 1e-8


def test_flat_gradient_vanishes_in_limit(flat):
    rep = heat_limit_experiment(flat, PointM.on_axis(1.0), l=1, t_list=[25.0, 100.0, 400.0, 1600.0, 2500.0])
    sc = np.abs([r["scaled_value"] for r in rep.rows])
    t = np.array([r["t"] for r in rep.rows])
    assert np.polyfit(np.log(t), np.log(sc), 1)[0] == pytest.approx(-0.5, abs=0.05)


def test_limit_l0_two_end(two):
    rep = heat_limit_experiment(two, PointM.on_axis(0.3), t_list=[100.0, 400.0, 1600.0, 6400.0, 10000.0])
    last = rep.rows[-1]
    assert last["target"] == pytest.approx((4 * np.pi) ** -1.5 * np.exp(-1.0) * float(phi_plus(two).phi(0.3)))
    assert last["rel_error"] < 0.02


def test_refuses_neck_region(two):
    with pytest.raises(ValueError):
        heat_limit_experiment(two, PointM.on_axis(0.0), sigma=10.0, t_list=[1.0, 4.0])
