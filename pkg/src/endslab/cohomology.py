"""Cutoff estimates behind the vanishing of ``dh`` in reduced ``L^p`` cohomology.

All objects are functions of the distance to the base point ``r = 0``, which
in a warped product is ``|r|``; every norm is a radial quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .geometry import ModelManifold, sphere_volume, volume_ball
from .harmonic import dirichlet_energy, phi_plus
from .report import ExperimentReport, fit_linear, fit_loglog

_QUAD = dict(epsabs=0.0, epsrel=1e-11, limit=500)


def log_cutoff(k: float, dist):
    """``chi_k = clip(log(k^2/dist) / log k, 0, 1)`` and ``|grad chi_k|``."""
    if k <= np.e:
        raise ValueError("k must exceed e")
    d = np.asarray(dist, dtype=float)
    lk = np.log(k)
    with np.errstate(divide="ignore"):
        chi = np.clip(np.log(k * k / d) / lk, 0.0, 1.0)
    grad = np.where((d > k) & (d < k * k), 1.0 / (d * lk), 0.0)
    return chi, grad


def _ends(model):
    """(sign, offset) of each exact end."""
    p = model.profile
    if model.ends == "one":
        return [(1, 0.0)]
    return [(1, p.c_plus), (-1, p.c_minus)]


def _rad_quad(fn, a, b):
    return integrate.quad(fn, a, b, **_QUAD)[0]


def grad_cutoff_Ln_norm(model: ModelManifold, k: float) -> float:
    """``||grad chi_k||_{L^n}^n``; the annulus lies in the exact ends (``k >= R``)."""
    n = model.n
    if k < model.neck_radius:
        raise ValueError("k must be at least the neck radius")
    lk = np.log(k)
    tot = 0.0
    for _, c in _ends(model):
        # dist = |r| = x + c on the end, f = x
        tot += _rad_quad(lambda d: (d * lk) ** (-n) * (d - c) ** (n - 1), k, k * k)
    return sphere_volume(n) * tot


def linear_cutoff_check(model: ModelManifold, p: float, k_list=None) -> ExperimentReport:
    """``||(1/k) 1_{[k,2k]} phi||_p^p`` with ``phi = 1 - Phi_+`` on the + end.

    Reports the fitted exponent in ``k`` next to the bound ``(2-p) n``.  For
    the harmonic potential ``phi ~ A' x^{2-n}`` the exact exponent is
    ``n - (n-1) p``, equal to the bound at ``p = n`` and below it otherwise.
    """
    n = model.n
    if k_list is None:
        k_list = np.geomspace(10.0, 1e4, 7)
    prof = phi_plus(model)
    c = model.profile.c_plus
    rows, vals = [], []
    for k in k_list:
        v = sphere_volume(n) * _rad_quad(
            lambda r: k ** (-p) * float(prof.complement(r)) ** p * (r - c) ** (n - 1), k, 2 * k)
        vals.append(v)
        rows.append(dict(k=float(k), norm_p_p=v))
    rep = ExperimentReport("linear-cutoff", rows)
    fit = fit_loglog(k_list, vals)
    rep.fits["exponent"] = fit
    rep.fits["bound"] = dict(decay_bound=(2 - p) * n, harmonic_exact=n - (n - 1) * p)
    rep.flags["boundary_case"] = abs(p - 2) < 1e-12
    rep.flags["poor_fit"] = fit["r2"] < 0.98
    return rep


@dataclass
class IbpTerms:
    term1: float
    term2: float
    term3: float
    direct: float

    @property
    def recombined(self) -> float:
        return self.term1 - self.term2 + self.term3

    @property
    def rel_error(self) -> float:
        return abs(self.recombined - self.direct) / abs(self.direct)


def ibp_terms(model: ModelManifold, p: float, k: float) -> IbpTerms:
    """``int_k^{k^2} r^{-p} dV = V(k^2)/k^{2p} - V(k)/k^p + p int_k^{k^2} V r^{-p-1} dr``.

    ``V(r)`` is the volume of the ball of radius ``r`` about ``r = 0``.
    """
    n = model.n
    vol = sphere_volume(n)
    V = lambda r: volume_ball(model, 0.0, r)
    prof = model.profile

    def dV(r):
        s = float(prof(r)) ** (n - 1)
        if model.ends == "two":
            s += float(prof(-r)) ** (n - 1)
        return vol * s

    t1 = V(k * k) / k ** (2 * p)
    t2 = V(k) / k**p
    t3 = p * _rad_quad(lambda r: V(r) * r ** (-p - 1), k, k * k)
    direct = _rad_quad(lambda r: r ** (-p) * dV(r), k, k * k)
    return IbpTerms(t1, t2, t3, direct)


def _h_parts(model):
    prof = phi_plus(model)
    h = lambda r: 2.0 * float(prof.phi(r)) - 1.0
    dh = lambda r: 2.0 * float(prof.dphi(r))
    return h, dh


def _norm_p(model, integrand, breaks):
    n = model.n
    pts = sorted(breaks)
    tot = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            tot += _rad_quad(integrand, a, b)
    return sphere_volume(n) * tot


def hdchi_norm(model: ModelManifold, p: float, k: float) -> float:
    """``||h d chi_k||_p`` with ``h = 2 Phi_+ - 1``."""
    n = model.n
    h, _ = _h_parts(model)
    f = model.profile
    lk = np.log(k)
    g = lambda r: abs(h(r)) ** p * (abs(r) * lk) ** (-p) * float(f(r)) ** (n - 1)
    return _norm_p(model, g, [k, k * k]) ** (1 / p) if model.ends == "one" else \
        (_norm_p(model, g, [-k * k, -k]) + _norm_p(model, g, [k, k * k])) ** (1 / p)


def cutoff_error_norm(model: ModelManifold, p: float, k: float) -> float:
    """``||dh - d(chi_k h)||_p = ||(1 - chi_k) dh - h d chi_k||_p``."""
    n = model.n
    h, dh = _h_parts(model)
    f = model.profile
    lk = np.log(k)

    def g(r):
        d = abs(r)
        chi, grad = log_cutoff(k, d)
        dchi = -np.sign(r) * grad  # d chi/dr
        val = (1.0 - chi) * dh(r) - h(r) * dchi
        return abs(float(val)) ** p * float(f(r)) ** (n - 1)

    # chi = 1 for |r| <= k, so only the annulus and the exact tail contribute
    tot = 0.0
    for a, b in _decades(k, k * k):
        tot += _rad_quad(g, a, b) + _rad_quad(g, -b, -a)
    I = phi_plus(model).flux
    e = (n - 1) * (p - 1) - 1
    if e <= 0:
        raise ValueError("dh is not in L^p for p <= n/(n-1)")
    for c in (f.c_plus, f.c_minus):
        # int_{k^2-c}^inf (2 x^{1-n}/I)^p x^{n-1} dx
        tot += (2.0 / I) ** p * (k * k - c) ** (-e) / e
    return (sphere_volume(n) * tot) ** (1 / p)


def _decades(a, b):
    """Split ``[a, b]`` (``0 < a < b``) at powers of ten."""
    pts = [a] + [10.0**e for e in range(int(np.floor(np.log10(a))) + 1, int(np.ceil(np.log10(b))))
                 if a < 10.0**e < b] + [b]
    return list(zip(pts[:-1], pts[1:]))


def dh_l2_squared(model: ModelManifold) -> float:
    """``||dh||_2^2`` by quadrature of ``(2 Phi')^2 f^{n-1}`` with closed-form tails."""
    n = model.n
    prof = phi_plus(model)
    p = model.profile
    R = p.neck_radius
    I = prof.flux
    neck = _rad_quad(lambda r: (2 * float(prof.dphi(r))) ** 2 * float(p(r)) ** (n - 1), -R, R)
    # exact ends: (2 x^{1-n}/I)^2 x^{n-1} integrated from R - c to infinity
    tail = sum((2 / I) ** 2 * (R - c) ** (2 - n) / (n - 2) for c in (p.c_plus, p.c_minus))
    return sphere_volume(n) * (neck + tail)


def vanishing_experiment(model: ModelManifold, p: float, k_list=None) -> ExperimentReport:
    """Cutoff approximation of ``dh`` by ``d(chi_k h)`` in ``L^p``.

    Reports ``||h d chi_k||_p``, ``||dh - d(chi_k h)||_p`` and the three
    integration-by-parts terms with the direct integral, plus the fitted
    exponent of the error norm against ``log k``.
    """
    if model.ends != "two":
        raise ValueError("two-end model required")
    if k_list is None:
        k_list = [10.0, 100.0, 1000.0]
    rows = []
    for k in k_list:
        t = ibp_terms(model, p, k)
        rows.append(dict(k=float(k), norm_hdchi_p=hdchi_norm(model, p, k),
                         norm_error_p=cutoff_error_norm(model, p, k),
                         term1=t.term1, term2=t.term2, term3=t.term3, direct_integral=t.direct,
                         ibp_rel_error=t.rel_error))
    rep = ExperimentReport(f"cohomology-p{p:g}", rows)
    ks = np.array([r["k"] for r in rows])
    err = np.array([r["norm_error_p"] for r in rows])
    fit = fit_linear(np.log(np.log(ks)), np.log(err))
    rep.fits["log_exponent"] = fit
    rep.fits["log_exponent"]["predicted_at_p_eq_n"] = -(model.n - 1) / model.n
    rep.flags["monotone_decreasing"] = bool(np.all(np.diff(err) < 0))
    rep.fits["dirichlet"] = dict(dh_l2_squared=dh_l2_squared(model),
                                 energy=dirichlet_energy(phi_plus(model), "flux"))
    return rep
