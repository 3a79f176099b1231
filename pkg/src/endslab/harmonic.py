"""Bounded harmonic profile attached to the ends of a two-end model.

``Phi_+(r) = int_{-inf}^r f^{1-n} / int_{-inf}^{inf} f^{1-n}`` is the unique
bounded radial harmonic function tending to 1 on the + end and 0 on the - end.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import integrate

from .geometry import ModelManifold, sphere_volume


@dataclass
class HarmonicProfile:
    """Radial profile ``Phi_+`` with its normalization data.

    ``flux`` is the total integral ``I = int f^{1-n} dr``; ``f^{n-1} Phi_+' = 1/I``.
    On one-end models the profile is the constant 1.
    """

    model: ModelManifold
    flux: float
    tail_minus: float
    tail_plus: float
    _neck: Chebyshev = None

    @property
    def two_end(self) -> bool:
        return self.model.ends == "two"

    def __call__(self, r):
        return self.phi(r)

    def phi(self, r):
        r0 = np.asarray(r, dtype=float)
        r = np.atleast_1d(r0)
        if not self.two_end:
            return np.ones_like(r)
        p = self.model.profile
        n, R = self.model.n, p.neck_radius
        out = np.empty_like(r)
        lo, hi = r <= -R, r >= R
        mid = ~(lo | hi)
        out[lo] = (-r[lo] - p.c_minus) ** (2 - n) / ((n - 2) * self.flux)
        out[hi] = 1.0 - (r[hi] - p.c_plus) ** (2 - n) / ((n - 2) * self.flux)
        out[mid] = (self.tail_minus + self._neck(r[mid])) / self.flux
        return out.reshape(r0.shape)

    def complement(self, r):
        """``1 - Phi_+`` without cancellation on the + end."""
        r0 = np.asarray(r, dtype=float)
        r = np.atleast_1d(r0)
        if not self.two_end:
            return np.zeros_like(r)
        p = self.model.profile
        n = self.model.n
        out = 1.0 - self.phi(r)
        hi = r >= p.neck_radius
        out[hi] = (r[hi] - p.c_plus) ** (2 - n) / ((n - 2) * self.flux)
        return out.reshape(r0.shape)

    def dphi(self, r):
        """``Phi_+'(r) = f^{1-n} / I``."""
        r = np.asarray(r, dtype=float)
        if not self.two_end:
            return np.zeros_like(r)
        return self.model.profile(r) ** (1 - self.model.n) / self.flux

    def d2phi(self, r):
        r = np.asarray(r, dtype=float)
        if not self.two_end:
            return np.zeros_like(r)
        p = self.model.profile
        n = self.model.n
        return (1 - n) * p(r) ** (-n) * p(r, 1) / self.flux

    def phi_minus(self, r):
        """``Phi_- = 1 - Phi_+`` (harmonic, 1 on the - end)."""
        return self.complement(r)


def phi_plus(model: ModelManifold) -> HarmonicProfile:
    """Construct ``Phi_+`` with closed-form tails on the exact ends."""
    if model.ends == "one":
        return HarmonicProfile(model, np.inf, 0.0, 0.0)
    p = model.profile
    n, R = model.n, p.neck_radius
    tail_m = (R - p.c_minus) ** (2 - n) / (n - 2)
    tail_p = (R - p.c_plus) ** (2 - n) / (n - 2)
    g = Chebyshev.interpolate(lambda s: p(s) ** (1 - n), 96, domain=[-R, R])
    G = g.integ(lbnd=-R)
    neck = integrate.quad(lambda s: float(p(s)) ** (1 - n), -R, R, epsabs=0, epsrel=1e-13, limit=200)[0]
    if abs(G(R) - neck) > 1e-12 * neck:
        raise RuntimeError("neck flux interpolation inaccurate")
    return HarmonicProfile(model, tail_m + neck + tail_p, tail_m, tail_p, G)


def phi_expansion_coefficient(profile: HarmonicProfile, end: int = 1, method: str = "closed"):
    """Coefficient ``A'`` of the leading ``|z|^{2-n}`` term of ``Phi`` at an end.

    ``method="closed"`` returns ``[(n-2) I]^{-1}``; ``method="limit"`` evaluates
    ``|z|^{n-2} (1 - Phi_+)`` (+ end) or ``|z|^{n-2} Phi_+`` (- end) from a
    whole-line quadrature without the analytic tails, Richardson-extrapolated in
    ``1/|z|``.
    """
    if not profile.two_end:
        raise ValueError("two-end model required")
    model = profile.model
    n = model.n
    if method == "closed":
        return 1.0 / ((n - 2) * profile.flux)
    p = model.profile
    fn = lambda s: float(p(s)) ** (1 - n)
    R = p.neck_radius
    total = sum(integrate.quad(fn, a, b, epsabs=0, epsrel=1e-13, limit=400)[0]
                for a, b in ((-np.inf, -R), (-R, R), (R, np.inf)))
    xs = np.array([1e3, 2e3, 4e3])
    vals = []
    for x in xs:
        if end > 0:
            r = x + p.c_plus
            part = integrate.quad(fn, r, np.inf, epsabs=0, epsrel=1e-13, limit=400)[0]
        else:
            r = -x - p.c_minus
            part = integrate.quad(fn, -np.inf, r, epsabs=0, epsrel=1e-13, limit=400)[0]
        vals.append(x ** (n - 2) * part / total)
    v = np.array(vals)
    # two Richardson levels for an expansion in 1/x
    r1 = 2 * v[1:] - v[:-1]
    return float((4 * r1[1] - r1[0]) / 3)


def bounded_harmonic_h(profile: HarmonicProfile, r):
    """``h = 2 Phi_+ - 1``: bounded harmonic, limits -1 / +1 at the - / + ends."""
    return 2.0 * profile.phi(r) - 1.0


def dirichlet_energy(profile: HarmonicProfile, method: str = "quadrature") -> float:
    """``int |dh|^2 dvol`` for ``h = 2 Phi_+ - 1``.

    ``method="flux"`` uses ``4 vol(S^{n-1}) (n-2) A'``; the default integrates
    ``(2 Phi')^2 f^{n-1}`` numerically.
    """
    model = profile.model
    n = model.n
    vol = sphere_volume(n)
    if method == "flux":
        return 4.0 * vol * (n - 2) * phi_expansion_coefficient(profile)
    p = model.profile
    fn = lambda s: (2 * float(profile.dphi(s))) ** 2 * float(p(s)) ** (n - 1)
    R = p.neck_radius
    tot = sum(integrate.quad(fn, a, b, epsabs=0, epsrel=1e-13, limit=400)[0]
              for a, b in ((-np.inf, -R), (-R, R), (R, np.inf)))
    return vol * tot


def harmonic_residual(profile: HarmonicProfile, points: int = 8001, method: str = "representation") -> float:
    """Relative residual of ``(f^{n-1} Phi_+')' = 0``.

    ``method="representation"`` differentiates the stored profile itself
    (Chebyshev series on the neck, closed-form tails outside) at ``points``
    nodes; ``method="fd"`` applies the fourth-order finite-difference
    ``L_{0,0}`` on a graded grid, excluding two nodes at each boundary.
    Both are normalized by ``max |Phi_+''|``.
    """
    model = profile.model
    if points < 101:
        raise ValueError("points must be at least 101 to sample the neck")
    if not profile.two_end:
        return 0.0
    if method == "fd":
        from .radial import BandedResolvent, RadialGrid
        grid = RadialGrid.build(model, points)
        op = BandedResolvent(model, grid, 0)
        res = op.apply(profile.phi(grid.r), 0.0)
        scale = np.abs(profile.d2phi(grid.r)).max()
        return float(np.abs(res[2:-2]).max() / scale)
    R = model.neck_radius
    res, scale = pointwise_residual(profile, np.linspace(-3 * R, 3 * R, points))
    return float(np.abs(res).max() / scale)


def pointwise_residual(profile: HarmonicProfile, r):
    """``f^{n-1} Phi'' + (n-1) f^{n-2} f' Phi'`` from the stored representation.

    Returns the residual at ``r`` and ``max |Phi''|`` over ``r`` for scaling.
    """
    model = profile.model
    p = model.profile
    n, R, I = model.n, p.neck_radius, profile.flux
    r = np.asarray(r, dtype=float)
    d1, d2 = np.empty_like(r), np.empty_like(r)
    mid = np.abs(r) < R
    G1, G2 = profile._neck.deriv(1), profile._neck.deriv(2)
    d1[mid], d2[mid] = G1(r[mid]) / I, G2(r[mid]) / I
    for sel, x, sg in ((r >= R, r - p.c_plus, 1.0), (r <= -R, -r - p.c_minus, -1.0)):
        # tails: x^{2-n} / ((n-2) I), derivative taken in r
        d1[sel] = x[sel] ** (1 - n) / I
        d2[sel] = -sg * (n - 1) * x[sel] ** (-n) / I
    f, fp = p(r), p(r, 1)
    res = f ** (n - 1) * d2 + (n - 1) * f ** (n - 2) * fp * d1
    return res, float(np.abs(d2).max())
