from __future__ import annotations

import numpy as np
import pytest

from endslab import ModelManifold, PointM, WarpProfile, one_form_norm, volume_ball, volume_growth, warp_eval


def test_exact_region_is_linear(two, asym):
    for m in (two, asym):
        p = m.profile
        r = np.linspace(p.neck_radius, m.r_max, 50)
        f, fp, fpp = warp_eval(m, r)
        assert np.array_equal(f, r - p.c_plus)
        assert np.all(fp == 1.0) and np.all(fpp == 0.0)
        f, fp, fpp = warp_eval(m, -r)
        assert np.array_equal(f, r - p.c_minus)
        assert np.all(fp == -1.0) and np.all(fpp == 0.0)


def test_warp_at_two_R(two):
    f, fp, fpp = warp_eval(two, 2.0)
    assert (f, fp, fpp) == (2.0, 1.0, 0.0)


def test_symmetric_center(two):
    f, fp, _ = warp_eval(two, 0.0)
    assert f == pytest.approx(0.5, abs=1e-14)
    assert fp == pytest.approx(0.0, abs=1e-14)


def test_flat_values(flat):
    f, fp, fpp = warp_eval(flat, 0.5)
    assert (f, fp, fpp) == (0.5, 1.0, 0.0)


def test_c2_across_neck_edge(two):
    p = two.profile
    for R in (1.0, -1.0):
        for h in (1e-3, 5e-4):
            fd = (p(R + h) - 2 * p(R) + p(R - h)) / h**2
            # second derivative is continuous, so the centered difference tends to f''(R) = 0
            assert abs(fd - p(R, 2)) < 50 * h


def test_positive_profile(asym):
    r = np.linspace(-asym.r_max, asym.r_max, 20001)
    assert np.all(asym.profile(r) > 0)


def test_validation():
    with pytest.raises(ValueError):
        ModelManifold.two_end(neck_min=5.0)
    with pytest.raises(ValueError):
        ModelManifold.two_end(n=2)
    with pytest.raises(ValueError):
        ModelManifold.two_end(r_max=5.0)
    with pytest.raises(ValueError):
        PointM(1.0, (1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        warp_eval(ModelManifold.two_end(), 1e4)


def test_volume_ball(flat, two):
    assert volume_ball(flat, 0.0, 1.0) == pytest.approx(4 * np.pi / 3, rel=1e-14)
    assert volume_ball(two, 0.0, 0.0) == 0.0
    v = [volume_ball(two, 0.3, r) for r in np.linspace(0.1, 50, 60)]
    assert np.all(np.diff(v) > 0)


def test_volume_ball_neck_matches_quadrature(two):
    from scipy import integrate
    p = two.profile
    exact = 4 * np.pi * integrate.quad(lambda s: float(p(s)) ** 2, -3, 3, epsabs=0, epsrel=1e-12)[0]
    assert volume_ball(two, 0.0, 3.0) == pytest.approx(exact, rel=1e-10)


def test_volume_growth_slope(two):
    rep = volume_growth(two)
    assert abs(rep.fits["slope"]["slope"] - 3) < 0.05
    assert 0 < rep.fits["bounds"]["c_lower"] <= rep.fits["bounds"]["c_upper"] < np.inf


def test_one_form_norm(two, flat):
    assert one_form_norm(two, 1.0, 0.0, 7.0) == 1.0
    assert one_form_norm(flat, 0.0, 1.0, 2.0) == 0.5
    assert one_form_norm(two, 3.0, 4.0, 1.0) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        one_form_norm(flat, 1.0, 1.0, 0.0)


def test_config_roundtrip():
    m = ModelManifold.from_config(dict(dimension="5", ends="two", end_offsets="0.2, -0.1", r_max="300"))
    assert m.n == 5 and m.profile.c_plus == 0.2 and m.profile.c_minus == -0.1 and m.r_max == 300
    assert isinstance(m.profile, WarpProfile)
