"""Heat kernel from the resolvent on a tilted contour.

With ``mu = lambda^2`` and ``k = sqrt(-mu)`` (``Re k > 0``)

    H(t) = (1/2 pi i) int_Gamma e^{-t lambda^2} (Delta - lambda^2)^{-1} 2 lambda d lambda,

where ``Gamma`` consists of the rays ``lambda = s e^{+-i pi/12}``.  In ``mu``
the rays leave the vertex at angles ``+-pi/6``; the two rays are complex
conjugates, so ``H = Im J / pi`` with ``J`` the integral over the upper ray.
The vertex may be moved along the negative axis to ``mu_0 = -(delta/2t)^2``
(Cauchy's theorem, the resolvent is analytic off ``[0, inf)``), which removes
the cancellation of ``e^{-delta^2/4t}``-small values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .geometry import ModelManifold, PointM
from .harmonic import phi_plus
from .modes import J_MAX, TRUNCATION_TOL
from .radial import mode_green
from .report import ExperimentReport, fit_loglog
from .resolvent import geodesic_distance_flat, mode_series

ANGLE = np.pi / 12


@dataclass(frozen=True)
class ContourSpec:
    """Gauss-Legendre rule in ``s`` on ``[0, s_max]`` along ``lambda = s e^{i angle}``.

    ``s_max`` defaults to ``6 / sqrt(t cos(2 angle))`` (envelope ``e^{-36}``).
    ``vertex`` is ``"saddle"`` (shift to ``-(delta/2t)^2``, the saddle point
    of the flat integrand) or ``"origin"``.
    """

    angle: float = ANGLE
    nodes: int = 200
    s_max: float = None
    vertex: str = "saddle"

    def smax(self, t: float) -> float:
        return self.s_max or 6.0 / np.sqrt(t * np.cos(2 * self.angle))

    def envelope_ratio(self, t: float) -> float:
        """``|e^{-t lambda^2}|`` at ``s_max`` relative to the vertex."""
        return float(np.exp(-t * self.smax(t) ** 2 * np.cos(2 * self.angle)))

    def truncation(self, t: float, delta: float = 0.0) -> float:
        """Upper limit in ``s``.

        At least ``smax(t)``; with a shifted vertex it is extended until the
        envelope ``exp(-t Re mu - delta Re k)`` is ``e^{-36}`` below its peak.
        """
        sm = self.smax(t)
        if self.vertex != "saddle" or delta == 0:
            return sm
        mu0 = -(delta / (2.0 * t)) ** 2
        rot = np.exp(2j * self.angle)
        s = np.linspace(0.0, 50.0 * sm, 20001)
        mu = mu0 + s * s * rot
        env = -t * mu.real - delta * np.sqrt(-mu).real
        last = np.nonzero(env >= env.max() - 36.0)[0][-1]
        return float(max(sm, s[min(last + 1, len(s) - 1)]))

    def rule(self, t: float, delta: float = 0.0):
        """Nodes ``k`` and complex weights ``W`` with ``H_j = Im(W . u_j(k)) / pi``."""
        x, w = roots_legendre(self.nodes)
        sm = self.truncation(t, delta)
        s = 0.5 * sm * (x + 1.0)
        ws = 0.5 * sm * w
        mu0 = -(delta / (2.0 * t)) ** 2 if self.vertex == "saddle" else 0.0
        rot = np.exp(2j * self.angle)
        mu = mu0 + s * s * rot
        dmu = 2.0 * s * rot
        k = np.sqrt(-mu)
        k = np.where(k.real < 0, -k, k)
        W = ws * np.exp(-t * mu) * dmu
        return k, W


def _delta(model: ModelManifold, z: PointM, zp: PointM) -> float:
    """Lower bound for the distance, used to place the contour vertex."""
    if model.ends == "one":
        return geodesic_distance_flat(z, zp)
    return abs(z.r - zp.r)


def heat_series(model: ModelManifold, t: float, r: float, rp: float, spec: ContourSpec = None,
                delta: float = 0.0, deriv: bool = False, tol: float = TRUNCATION_TOL,
                conjugate: bool = False):
    """Mode coefficients ``h_j(t, r, r')`` of the heat kernel.

    With ``conjugate`` the lower ray is integrated explicitly and the
    imaginary part of the two-ray sum is returned as a residual.
    """
    spec = spec or ContourSpec()
    k, W = spec.rule(t, delta)
    def red(u):
        J = np.sum(W * u)
        if conjugate:
            return J
        return J.imag / np.pi

    s = mode_series(model, k, r, rp, reduce=red, deriv=deriv, tol=tol)
    if not conjugate:
        return s, 0.0
    # lower ray: k -> conj k, weights conjugated, traversed in the opposite sense
    s_low = mode_series(model, np.conj(k), r, rp, reduce=lambda u: np.sum(np.conj(W) * u),
                        deriv=deriv, tol=tol, min_modes=len(s.values))
    m = min(len(s.values), len(s_low.values))
    two = (s.values[:m] - s_low.values[:m]) / (2j * np.pi)
    scale = max(np.max(np.abs(two)), 1e-300)
    resid = float(np.max(np.abs(two.imag)) / scale)
    s.values = two.real
    if deriv:
        s.radial = ((s.radial[:m] - s_low.radial[:m]) / (2j * np.pi)).real
    return s, resid


@dataclass
class HeatValue:
    value: float
    radial: float = float("nan")
    angular: float = float("nan")
    imag_residual: float = 0.0
    n_terms: int = 0


def heat_kernel(model: ModelManifold, t: float, z: PointM, zp: PointM, spec: ContourSpec = None,
                gradient: bool = False, conjugate: bool = False) -> HeatValue:
    """``H(t, z, z')`` by mode synthesis of contour-integrated mode Green functions.

    With ``gradient`` the ``d_z`` components (radial, angular norm) are
    returned as well, from the analytic ``r``-derivative of the mode Green
    functions and the zonal derivative.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    spec = spec or ContourSpec()
    delta = _delta(model, z, zp)
    s, resid = heat_series(model, t, z.r, zp.r, spec, delta, deriv=gradient, conjugate=conjugate)
    c = z.cos_angle(zp)
    val = float(np.real(s.synthesize(c)))
    out = HeatValue(val, imag_residual=resid, n_terms=s.n_terms)
    if gradient:
        rad, ang = s.gradient(c, float(model.profile(z.r)))
        out.radial, out.angular = float(np.real(rad)), float(np.real(ang))
    return out


def flat_heat(n: int, t: float, d: float) -> float:
    return float((4 * np.pi * t) ** (-0.5 * n) * np.exp(-d * d / (4 * t)))


# ---------------------------------------------------------------------------
# contour identity


def contour_identity_check(n: int, sigma: float, spec: ContourSpec = None):
    """``(1/pi i) int_Gamma e^{-sigma^2 L^2} e^{i L} f_n(L) L dL`` against
    ``(4 pi)^{-n/2} sigma^{-n} e^{-1/(4 sigma^2)}``.

    The left side is the flat heat kernel at unit distance and time
    ``sigma^2`` written with the Euclidean resolvent: with ``k = -i L``,
    ``e^{-k} f_n(k)``.  The two conjugate rays give ``(2/pi) Im`` of the
    upper-ray integral.  Evaluated on the ray through the origin.
    """
    from .resolvent import f_n
    spec = spec or ContourSpec(vertex="origin", nodes=400)
    t = sigma**2
    x, w = roots_legendre(spec.nodes)
    sm = spec.smax(t)
    s = 0.5 * sm * (x + 1.0)
    ws = 0.5 * sm * w
    lam = s * np.exp(1j * spec.angle)
    k = -1j * lam
    integrand = np.exp(-t * lam**2) * np.exp(-k) * f_n(n, k) * lam * np.exp(1j * spec.angle)
    lhs = float(2.0 / np.pi * np.sum(ws * integrand).imag)
    rhs = float((4 * np.pi) ** (-0.5 * n) * sigma ** (-n) * np.exp(-1.0 / (4 * sigma**2)))
    return lhs, rhs, abs(lhs - rhs) / rhs


# ---------------------------------------------------------------------------
# experiments


def _end_r(model, x, end=1):
    p = model.profile
    if model.ends == "one":
        return x
    return x + p.c_plus if end > 0 else -(x + p.c_minus)


def heat_limit_experiment(model: ModelManifold, z: PointM, sigma: float = 0.5, l: int = 0,
                          t_list=None, spec: ContourSpec = None) -> ExperimentReport:
    """``t^{n/2} d_z^l H(t, z, r' omega)`` with ``r' = sqrt(t)/sigma`` on the + end.

    The target is ``(4 pi)^{-n/2} e^{-1/(4 sigma^2)} Phi(z)`` (``l = 0``) or the
    same factor times ``Phi'(r_z)`` (``l = 1``, radial component).
    """
    n = model.n
    if t_list is None:
        t_list = np.geomspace(25.0, 1e4, 6)
    t_list = np.asarray(t_list, dtype=float)
    R = model.neck_radius
    if np.any(np.sqrt(t_list) / sigma < R):
        raise ValueError("r' leaves the exact end region")
    base = (4 * np.pi) ** (-0.5 * n) * np.exp(-1.0 / (4 * sigma**2))
    if model.ends == "two":
        prof = phi_plus(model)
        target = base * float(prof.phi(z.r) if l == 0 else prof.dphi(z.r))
    else:
        target = base * (1.0 if l == 0 else 0.0)
    rows, prev = [], None
    for t in t_list:
        x = np.sqrt(t) / sigma
        zp = PointM(_end_r(model, x), z.omega)
        hv = heat_kernel(model, t, z, zp, spec, gradient=(l == 1))
        raw = hv.value if l == 0 else hv.radial
        sc = t ** (0.5 * n) * raw
        row = dict(t=float(t), r_prime=float(x), value=raw, scaled_value=sc, target=target,
                   rel_error=abs(sc - target) / abs(target) if target else float("nan"),
                   cauchy=abs(sc - prev) / abs(sc) if prev is not None and sc else float("nan"))
        if l == 1:
            row["angular"] = hv.angular
        prev = sc
        rows.append(row)
    return ExperimentReport(f"heat-limit-l{l}", rows)


def offdiagonal_decay_experiment(model: ModelManifold, sigma: float = 0.5, sigma_p: float = 0.5,
                                 t_list=None, same_end: bool = False, cos_gamma: float = None,
                                 spec: ContourSpec = None) -> ExperimentReport:
    """``H(t, z, z')`` with ``z = (sqrt t/sigma)`` on the - end (or + end with
    ``same_end``) and ``z' = (sqrt t/sigma')`` on the + end.

    Reports the log-log slope in ``t``, ``t^{n-1} H`` (cross-end) or
    ``t^{n/2} H`` (same end) with successive relative differences.
    """
    n = model.n
    if t_list is None:
        t_list = np.geomspace(25.0, 2500.0, 7)
    t_list = np.asarray(t_list, dtype=float)
    if cos_gamma is None:
        cos_gamma = 0.0 if same_end else 1.0
    if np.any(np.sqrt(t_list) / max(sigma, sigma_p) < model.neck_radius):
        raise ValueError("points leave the exact end regions")
    w = np.zeros(n)
    w[0], w[1] = cos_gamma, np.sqrt(1 - cos_gamma**2)
    power = 0.5 * n if same_end else n - 1.0
    rows, vals, prev = [], [], None
    for t in t_list:
        z = PointM.on_axis(_end_r(model, np.sqrt(t) / sigma, 1 if same_end else -1), n)
        zp = PointM(_end_r(model, np.sqrt(t) / sigma_p, 1), tuple(w))
        hv = heat_kernel(model, t, z, zp, spec)
        sc = t**power * hv.value
        rows.append(dict(t=float(t), value=hv.value, scaled_value=sc,
                         cauchy=abs(sc - prev) / abs(sc) if prev is not None else float("nan")))
        vals.append(hv.value)
        prev = sc
    rep = ExperimentReport("heat-offdiag", rows)
    fit = fit_loglog(t_list, np.array(vals))
    rep.fits["slope"] = fit
    rep.fits["q"] = dict(value=rows[-1]["scaled_value"], power=power)
    for r in rows:
        r["slope"] = fit["slope"]
    return rep


def _radial_panels(center, lo, hi, breaks, width, order=24):
    pts = sorted({lo, hi, center, *[b for b in breaks if lo < b < hi]})
    x, w = roots_legendre(order)
    xs, ws = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        m = max(1, int(np.ceil((b - a) / width)))
        e = np.linspace(a, b, m + 1)
        for u, v in zip(e[:-1], e[1:]):
            xs.append(0.5 * (v - u) * x + 0.5 * (v + u))
            ws.append(0.5 * (v - u) * w)
    return np.concatenate(xs), np.concatenate(ws)


def heat_mode_profile(model: ModelManifold, j: int, t: float, r: float, rho, spec: ContourSpec = None):
    """``h_j(t, r, rho)`` for an array ``rho`` (vertex at the origin)."""
    spec = spec or ContourSpec(vertex="origin")
    k, W = ContourSpec(spec.angle, spec.nodes, spec.s_max, "origin").rule(t)
    g = mode_green(model, j, k)
    rho = np.asarray(rho, dtype=float)
    u = g(np.full(rho.shape, r), rho)
    return (W @ u).imag / np.pi


def mass_conservation(model: ModelManifold, t: float, r: float, spec: ContourSpec = None) -> float:
    """``int H(t, z, w) dvol(w)`` (only ``j = 0`` contributes)."""
    L = 14.0 * np.sqrt(t) + 2.0
    lo = max(r - L, model.r_min)
    hi = min(r + L, model.r_max)
    R = model.neck_radius
    rho, w = _radial_panels(r, lo, hi, (-R, R), 0.25 * np.sqrt(t) + 0.05)
    h = heat_mode_profile(model, 0, t, r, rho, spec)
    return float(np.sum(w * h * model.profile(rho) ** (model.n - 1)))


def semigroup_check(model: ModelManifold, t: float, s: float, r: float, rp: float, j: int = 0,
                    spec: ContourSpec = None):
    """``int h_j(t, r, rho) h_j(s, rho, r') f^{n-1} d rho`` against ``h_j(t+s, r, r')``."""
    L = 14.0 * np.sqrt(max(t, s)) + abs(r - rp) + 2.0
    lo = max(min(r, rp) - L, model.r_min)
    hi = min(max(r, rp) + L, model.r_max)
    R = model.neck_radius
    rho, w = _radial_panels(r, lo, hi, (-R, R, rp), 0.25 * np.sqrt(min(t, s)) + 0.05)
    a = heat_mode_profile(model, j, t, r, rho, spec)
    b = heat_mode_profile(model, j, s, rp, rho, spec)
    lhs = float(np.sum(w * a * b * model.profile(rho) ** (model.n - 1)))
    rhs = float(heat_mode_profile(model, j, t + s, r, np.array([rp]), spec)[0])
    return lhs, rhs, abs(lhs - rhs) / abs(rhs)
