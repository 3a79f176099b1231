from __future__ import annotations

import numpy as np
import pytest

from endslab import ModelManifold, PointM, euclidean_resolvent, parametrix_error_order, rb0_leading_coefficient, resolvent
from endslab.modes import TruncationError
from endslab.resolvent import delta_check, f_n


def test_f3_constant():
    assert np.allclose(f_n(3, [0.0, 1.0, 5.0]), 1 / (4 * np.pi))
    assert f_n(5, 2.0) == pytest.approx(3 / (8 * np.pi**2) * (1 + 2.0) / 3)


@pytest.mark.parametrize("n,k", [(3, 0.0), (3, 1.5), (5, 0.7)])
def test_delta_normalization(n, k):
    assert delta_check(n, k) == pytest.approx(1.0, rel=1e-6)


def test_euclidean_examples():
    c3 = euclidean_resolvent(3, 0.0, 1.0)
    assert euclidean_resolvent(3, 0.0, 2.0) == pytest.approx(c3 / 2)
    assert euclidean_resolvent(3, 0.8, 3.0) / euclidean_resolvent(3, 0.0, 3.0) == pytest.approx(np.exp(-2.4))
    small = [euclidean_resolvent(5, k, 2.0) * 8 for k in (1e-3, 1e-5, 1e-7)]
    assert small[-1] == pytest.approx(euclidean_resolvent(5, 0.0, 2.0) * 8, rel=1e-6)
    with pytest.raises(ValueError):
        euclidean_resolvent(3, 1.0, 0.0)


def test_flat_resolvent_examples(flat):
    z, zp = PointM.on_axis(1.0), PointM(4.0, (1.0, 0.0, 0.0))
    assert resolvent(flat, 1.0, z, zp) == pytest.approx(float(euclidean_resolvent(3, 1.0, 3.0)), rel=1e-6)
    zp2 = PointM(np.sqrt(8.0), (0.0, 1.0, 0.0))
    assert resolvent(flat, 0.5, z, zp2) == pytest.approx(float(euclidean_resolvent(3, 0.5, 3.0)), rel=1e-6)


def test_symmetry_positivity(two, asym):
    for m in (two, asym):
        z = PointM.on_axis(-2.0)
        zp = PointM(6.0, (0.6, 0.8, 0.0))
        a, b = resolvent(m, 0.7, z, zp), resolvent(m, 0.7, zp, z)
        assert a == b and a > 0


def test_through_neck_decay(two):
    k = 1.0
    vals = []
    for x in (5.0, 10.0, 15.0):
        vals.append(resolvent(two, k, PointM.on_axis(-x), PointM.on_axis(x)))
    for x, v in zip((5.0, 10.0, 15.0), vals):
        assert v <= np.exp(-k * (2 * x - 2)) * 1.0
    # G ~ e^{-2kx} / x^2 across the neck
    rate = np.log(vals[0] * 25 / (vals[2] * 225)) / 20.0
    assert rate == pytest.approx(1.0, abs=0.02)


def test_diagonal_refused(two):
    z = PointM.on_axis(0.5)
    with pytest.raises((ValueError, TruncationError)):
        resolvent(two, 1.0, z, z)


def test_rb0_symmetric_center(two):
    for end in (1, -1):
        res = rb0_leading_coefficient(two, PointM.on_axis(0.0), end, 1.0)
        assert res.limit == pytest.approx(0.5, rel=1e-4)
        assert res.extrapolants_agree


def test_rb0_asymmetric(asym):
    from endslab import phi_plus
    z = PointM.on_axis(0.4)
    res = rb0_leading_coefficient(asym, z, 1, 1.0)
    assert res.target == pytest.approx(float(phi_plus(asym).phi(0.4)))
    assert res.rel_error < 0.02
    with pytest.raises(ValueError):
        rb0_leading_coefficient(asym, z, 1, 1.0, r_list=[10.0, 30.0, 50.0])


def test_rb0_one_end(flat):
    res = rb0_leading_coefficient(flat, PointM.on_axis(2.0), 1, 0.5)
    assert res.limit == pytest.approx(1.0, rel=0.01)


def test_parametrix_flat_floor(flat):
    rep = parametrix_error_order(flat, 1.0, PointM.on_axis(0.3), 1)
    assert rep.flags.get("machine_floor")
