"""Two-point resolvent kernel of ``Delta + k^2`` and its Euclidean oracle.

The full kernel is synthesized from mode Green functions,
``G(z, z') = sum_j u_j(r, r') Z_j(omega . omega')``.  The probes in this
module measure the behaviour of ``G`` when ``z'`` runs off to infinity on an
end with ``k |z'|`` held fixed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.special import gamma, kve

from .geometry import ModelManifold, PointM, sphere_volume
from .harmonic import phi_plus
from .modes import J_MAX, TRUNCATION_TOL, TruncationError, zonal_derivative_table, zonal_table
from .radial import mode_green
from .report import ExperimentReport, fit_loglog, richardson


# ---------------------------------------------------------------------------
# Euclidean oracle


def f_n(n: int, t):
    """Profile ``f_n(t) = (2 pi)^{-n/2} t^{n/2-1} K_{n/2-1}(t) e^t``.

    ``e^{-kd} d^{2-n} f_n(kd)`` is the Euclidean resolvent kernel; ``f_3 =
    1/(4 pi)`` and ``f_5(t) = (1+t)/(8 pi^2)``.  Complex ``t`` with
    ``Re t > 0`` is accepted.
    """
    t = np.asarray(t)
    nu = 0.5 * n - 1
    zero = t == 0
    ts = np.where(zero, 1.0, t)
    with np.errstate(all="ignore"):
        val = (2 * np.pi) ** (-0.5 * n) * ts**nu * kve(nu, ts)
    f0 = gamma(nu) / (4 * np.pi ** (0.5 * n))
    return np.where(zero, f0, val)


def euclidean_resolvent(n: int, k, d):
    """Kernel of ``(Delta + k^2)^{-1}`` on ``R^n`` at distance ``d > 0``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    k = np.asarray(k)
    with np.errstate(under="ignore"):
        return np.exp(-k * d) * d ** (2.0 - n) * f_n(n, k * d)


def delta_check(n: int, k: float = 0.0, width: float = 1.0) -> float:
    """``int G_k(0, x) (Delta + k^2) phi(x) dx / phi(0)`` for a Gaussian ``phi``.

    Equals 1 exactly when the kernel is normalized to invert ``Delta + k^2``
    (``Delta = -div grad``).  Evaluated by 1-D radial quadrature.
    """
    a = 1.0 / width**2

    def integrand(r):
        phi = np.exp(-a * r * r)
        lap = -(4 * a * a * r * r - 2 * n * a) * phi
        return float(euclidean_resolvent(n, k, r)) * (lap + k * k * phi) * r ** (n - 1)

    val = integrate.quad(integrand, 0, np.inf, epsabs=0, epsrel=1e-12, limit=400)[0]
    return sphere_volume(n) * val


def geodesic_distance_flat(z: PointM, zp: PointM) -> float:
    """Euclidean distance between two points of the flat one-end model."""
    c = z.cos_angle(zp)
    return float(np.sqrt(max(z.r**2 + zp.r**2 - 2 * z.r * zp.r * c, 0.0)))


# ---------------------------------------------------------------------------
# mode series engine


@dataclass
class ModeSeries:
    """Reduced mode coefficients ``c_j`` (and ``d c_j / dr``) for one point pair.

    ``last_term`` is the larger of the last two retained terms relative to the
    series magnitude, bounded over all angles by ``Z_j(1)``.
    """

    values: np.ndarray
    radial: Optional[np.ndarray]
    last_term: float
    tail_ratio: float
    n: int

    @property
    def n_terms(self) -> int:
        return len(self.values)

    def synthesize(self, cos_gamma: float):
        """Kernel value at angle ``cos_gamma``."""
        Z = zonal_table(len(self.values) - 1, cos_gamma, self.n)
        return np.sum(self.values * Z)

    def gradient(self, cos_gamma: float, f_r: float):
        """``(radial, angular)`` components of ``d_z`` of the synthesized kernel.

        The angular component is the norm of the spherical gradient divided by
        ``f(r)``; it uses ``|grad_omega cos gamma| = sin gamma``.
        """
        J = len(self.values) - 1
        Z = zonal_table(J, cos_gamma, self.n)
        dZ = zonal_derivative_table(J, cos_gamma, self.n)
        rad = np.sum(self.radial * Z)
        s = np.sqrt(max(1.0 - cos_gamma**2, 0.0))
        ang = np.sum(self.values * dZ) * s / f_r
        return rad, ang


def mode_series(model: ModelManifold, k, r: float, rp: float,
                reduce: Callable = None, deriv: bool = False, j_max: int = J_MAX,
                tol: float = TRUNCATION_TOL, strict: bool = True, min_modes: int = 3) -> ModeSeries:
    """Sum over modes of ``reduce(u_j(r, r'; k))`` for a batch of ``k``.

    ``reduce`` maps the length-``len(k)`` array of mode values to a scalar; it
    defaults to taking the single entry.  Modes are added in ascending ``j``
    until the last two terms fall below ``tol / 100`` of the running sum, and
    ``TruncationError`` is raised (with ``strict``) if ``j_max`` is reached
    with the last term above ``tol``.
    """
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    reduce = reduce or (lambda u: u[0])
    n = model.n
    Z1 = zonal_table(j_max, 1.0, n)
    vals, rads, mags = [], [], []
    done = False
    for j in range(j_max + 1):
        g = mode_green(model, j, k)
        u = g(r, rp)[:, 0]
        vals.append(reduce(u))
        if deriv:
            rads.append(reduce(g(r, rp, 1)[:, 0]))
        m = abs(vals[-1]) + (abs(rads[-1]) if deriv else 0.0)
        mags.append(m * Z1[j])
        total = abs(np.sum(np.array(vals) * Z1[: j + 1]))
        if deriv:
            total += abs(np.sum(np.array(rads) * Z1[: j + 1]))
        if j + 1 >= min_modes:
            last = max(mags[-1], mags[-2])
            if last <= 1e-2 * tol * max(total, 1e-300):
                done = True
                break
    total = max(total, 1e-300)
    last = max(mags[-1], mags[-2]) / total
    ratio = mags[-1] / mags[-2] if mags[-2] > 0 else 0.0
    if not done and strict and last > tol:
        raise TruncationError(f"mode series not converged: last term {last:.2e}")
    return ModeSeries(np.array(vals), np.array(rads) if deriv else None, last, ratio, n)


def resolvent(model: ModelManifold, k: float, z: PointM, zp: PointM,
              j_max: int = J_MAX, tol: float = TRUNCATION_TOL, strict: bool = True) -> float:
    """Resolvent kernel ``(Delta + k^2)^{-1}(z, z')`` by mode synthesis."""
    if z.r == zp.r and z.cos_angle(zp) >= 1.0 - 1e-15:
        raise TruncationError("diagonal point pair")
    if np.real(k) < 0:
        raise ValueError("k must be >= 0")
    s = mode_series(model, [k], z.r, zp.r, j_max=j_max, tol=tol, strict=strict)
    v = s.synthesize(z.cos_angle(zp))
    return float(v.real) if abs(np.imag(k)) == 0 else v


# ---------------------------------------------------------------------------
# boundary-regime probes


def _end_point(model, end, x, n):
    p = model.profile
    if model.ends == "one":
        if end < 0:
            raise ValueError("one-end model has only the + end")
        return PointM.on_axis(x, n)
    r = x + p.c_plus if end > 0 else -(x + p.c_minus)
    return PointM.on_axis(r, n)


def _phi_target(model, z, end):
    if model.ends == "one":
        return 1.0
    prof = phi_plus(model)
    return float(prof.phi(z.r) if end > 0 else prof.complement(z.r))


@dataclass
class Rb0Result:
    limit: float
    target: float
    table: list = field(default_factory=list)
    monotone: bool = True
    extrapolants_agree: bool = True

    @property
    def rel_error(self) -> float:
        return abs(self.limit - self.target) / abs(self.target)


def rb0_leading_coefficient(model: ModelManifold, z: PointM, end: int = 1, kappa: float = 1.0,
                            r_list=None) -> Rb0Result:
    """Probe ``G(z, z') / G_E(kappa/|z'|, |z'|)`` with ``k |z'| = kappa`` fixed.

    ``r_list`` holds end coordinates ``|z'|`` forming a doubling sequence; the
    scaled values are Richardson-extrapolated (two levels, expansion in
    ``1/|z'|``).  The target is ``Phi_+(z)`` (``end=+1``), ``Phi_-(z)``
    (``end=-1``) or 1 on a one-end model.
    """
    n = model.n
    if r_list is None:
        r_list = 25.0 * 2.0 ** np.arange(5)
    r_list = np.asarray(r_list, dtype=float)
    if np.any(np.abs(np.diff(np.log2(r_list)) - 1) > 1e-12):
        raise ValueError("r_list must be a doubling sequence")
    raw, scaled = [], []
    for x in r_list:
        k = kappa / x
        zp = _end_point(model, end, x, n)
        val = resolvent(model, k, z, zp)
        raw.append(val)
        scaled.append(val / float(euclidean_resolvent(n, k, x)))
    scaled = np.array(scaled)
    lev1 = richardson(scaled, 1)
    lev2 = richardson(lev1, 2)
    limit = float(lev2[-1]) if len(lev2) else float(lev1[-1])
    agree = True
    if len(lev2) >= 1 and len(lev1) >= 1:
        agree = abs(lev2[-1] - lev1[-1]) <= 0.01 * abs(lev2[-1])
    d = np.diff(scaled)
    monotone = bool(np.all(d >= 0) or np.all(d <= 0))
    target = _phi_target(model, z, end)
    ext = np.full(len(r_list), np.nan)
    if len(lev2):
        ext[-len(lev2):] = lev2
    table = [dict(r_prime=float(x), k=float(kappa / x), raw_value=float(rv), scaled_value=float(sv),
                  extrapolated_limit=float(e), phi_target=target)
             for x, rv, sv, e in zip(r_list, raw, scaled, ext)]
    return Rb0Result(limit, target, table, monotone, agree)


def smooth_step(x):
    """C^infinity step, 0 for ``x <= 0`` and 1 for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
    b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def end_cutoff(model: ModelManifold, r, end: int = 1):
    """``phi_+-``: 1 for ``+-r >= 2R``, 0 for ``+-r <= R``."""
    R = model.neck_radius
    return smooth_step((end * np.asarray(r, dtype=float) - R) / R)


def parametrix_error_order(model: ModelManifold, kappa: float, z: PointM, end: int = 1,
                           r_list=None, corrected: bool = True) -> ExperimentReport:
    """Decay exponent in ``|z'|`` of ``G - G_1 - G_3`` with ``k = kappa/|z'|``.

    ``G_3 = G_E(k, |z'|) u_+-(z)`` with ``u = Phi - phi`` and
    ``G_1 = phi(z) G_E(k, |z - z'|) phi(z')`` for same-end pairs.  With
    ``corrected=False`` only ``G_1`` is subtracted.
    """
    n = model.n
    if r_list is None:
        r_list = np.geomspace(20.0, 640.0, 9)
    r_list = np.asarray(r_list, dtype=float)
    if model.ends == "two":
        prof = phi_plus(model)
        phi_z = float(prof.phi(z.r) if end > 0 else prof.complement(z.r))
        cut_z = float(end_cutoff(model, z.r, end))
    else:
        phi_z, cut_z = 1.0, 1.0
    rows, errs = [], []
    for x in r_list:
        k = kappa / x
        zp = _end_point(model, end, x, n)
        G = resolvent(model, k, z, zp)
        if model.ends == "one":
            d = geodesic_distance_flat(z, zp)
            g1 = float(euclidean_resolvent(n, k, d))
            g3 = 0.0
        else:
            g1 = 0.0
            if cut_z > 0:
                zc = np.asarray(z.omega) * model.end_coordinate(z.r)
                zpc = np.asarray(zp.omega) * x
                g1 = cut_z * float(euclidean_resolvent(n, k, np.linalg.norm(zc - zpc)))
            g3 = float(euclidean_resolvent(n, k, x)) * (phi_z - cut_z) if corrected else 0.0
        e = G - g1 - g3
        errs.append(abs(e))
        rows.append(dict(r_prime=float(x), k=float(k), resolvent=G, error=float(abs(e))))
    errs = np.array(errs)
    rep = ExperimentReport("parametrix-error", rows)
    floor = 1e-12 * np.abs([r_["resolvent"] for r_ in rows])
    if np.all(errs <= floor):
        rep.flags["machine_floor"] = True
        rep.fits["slope"] = dict(slope=float("nan"), intercept=float("nan"), residual=0.0,
                                 stderr=float("nan"), r2=float("nan"))
        return rep
    fit = fit_loglog(1.0 / r_list, errs)
    rep.fits["slope"] = fit
    rep.flags["poor_fit"] = fit["r2"] < 0.98
    return rep
