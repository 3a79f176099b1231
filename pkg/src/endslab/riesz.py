"""Riesz transform ``T = d Delta^{-1/2}`` through the k-integral of the resolvent.

``Delta^{-1/2} = (2/pi) int_0^inf (Delta + k^2)^{-1} dk`` and
``Delta^{1/2} = (2/pi) int_0^inf (Delta + k^2)^{-1} Delta dk``.  Fields are
axisymmetric and stored per mode on a graded radial grid; kernels are built
directly from mode Green functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .geometry import ModelManifold, PointM, sphere_volume
from .harmonic import phi_plus
from .modes import J_MAX, TRUNCATION_TOL, _fd_weights, gegenbauer_table
from .radial import BandedResolvent, RadialGrid, mode_green
from .report import ExperimentReport, fit_linear, fit_loglog, richardson
from .resolvent import geodesic_distance_flat, mode_series, smooth_step

# k beyond which exp(-k * separation) is negligible
_PRUNE = 60.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Nodes for ``int_0^inf F(k) dk``.

    Gauss-Legendre on ``[0, k_floor]``, on geometric panels from ``k_floor`` to
    ``k_split`` and from ``k_split`` to ``k_max``, and on the tail
    ``[k_max, inf)`` mapped by ``k = k_max / u``.
    """

    k_floor: float = 1e-10
    k_split: float = 1.0
    k_max: float = 1e3
    panels_per_decade: int = 2
    nodes_per_panel: int = 16
    tail_nodes: int = 24

    def nodes(self):
        x, w = roots_legendre(self.nodes_per_panel)
        ks, ws = [], []

        def panel(a, b):
            ks.append(0.5 * (b - a) * x + 0.5 * (b + a))
            ws.append(0.5 * (b - a) * w)

        panel(0.0, self.k_floor)
        for a, b in ((self.k_floor, self.k_split), (self.k_split, self.k_max)):
            if b <= a:
                continue
            m = max(1, int(np.ceil(self.panels_per_decade * np.log10(b / a))))
            edges = np.geomspace(a, b, m + 1)
            for lo, hi in zip(edges[:-1], edges[1:]):
                panel(lo, hi)
        xt, wt = roots_legendre(self.tail_nodes)
        u = 0.5 * (xt + 1.0)
        ks.append(self.k_max / u)
        ws.append(0.5 * wt * self.k_max / u**2)
        return np.concatenate(ks), np.concatenate(ws)

    def halved(self) -> "QuadratureSpec":
        """Coarser rule with half the panels and half the nodes per panel."""
        return replace(self, panels_per_decade=max(1, self.panels_per_decade // 2),
                       nodes_per_panel=max(4, self.nodes_per_panel // 2),
                       tail_nodes=max(4, self.tail_nodes // 2))

    def invariant_error(self, t_values=None) -> float:
        """Max relative error of ``int dk/(k^2+t) = pi/(2 sqrt t)``."""
        if t_values is None:
            t_values = np.geomspace(1e-4, 1e4, 17)
        k, w = self.nodes()
        errs = [abs(np.sum(w / (k * k + t)) / (0.5 * np.pi / np.sqrt(t)) - 1) for t in t_values]
        return float(max(errs))


# ---------------------------------------------------------------------------
# fields


def _zonal_basis(jmax, c, n):
    """Normalized zonal polynomials ``P_j(c) = C_j(c) / C_j(1)`` and ``dP_j/dc``."""
    a = 0.5 * n - 1
    C = gegenbauer_table(jmax, a, c)
    C1 = gegenbauer_table(jmax, a, 1.0)
    dC = np.zeros_like(C)
    if jmax >= 1:
        dC[1:] = 2 * a * gegenbauer_table(jmax - 1, a + 1, c)
    shape = (-1,) + (1,) * np.ndim(c)
    return C / C1.reshape(shape), dC / C1.reshape(shape)


@dataclass
class FieldOnM:
    """Axisymmetric field ``sum_j g_j(r) P_j(omega . e)`` on a radial grid.

    Function fields store ``modes[j] = g_j``.  One-form fields store
    ``modes[j] = (a_j, b_j)`` for ``sum a_j P_j dr + b_j dP_j`` where ``dP_j``
    is the spherical differential; the metric norm divides the angular part
    by ``f``.
    """

    model: ModelManifold
    grid: RadialGrid
    modes: Dict[int, object]
    one_form: bool = False

    @classmethod
    def radial(cls, model, grid, values):
        return cls(model, grid, {0: np.asarray(values, dtype=float)})

    @classmethod
    def from_function(cls, model, grid, func, j=0):
        return cls(model, grid, {j: np.asarray(func(grid.r), dtype=float)})

    @property
    def r(self):
        return self.grid.r

    def zero_like(self):
        if self.one_form:
            return FieldOnM(self.model, self.grid, {j: (0 * a, 0 * b) for j, (a, b) in self.modes.items()}, True)
        return FieldOnM(self.model, self.grid, {j: 0 * g for j, g in self.modes.items()})

    def pointwise(self, c):
        """Values on the ``(r, c)`` tensor grid; one-forms return the metric norm."""
        n = self.model.n
        c = np.atleast_1d(c)
        jmax = max(self.modes)
        P, dP = _zonal_basis(jmax, c, n)
        if not self.one_form:
            out = np.zeros((len(self.r), len(c)))
            for j, g in self.modes.items():
                out += np.outer(g, P[j])
            return out
        f = self.model.profile(self.r)
        s = np.sqrt(np.clip(1 - c * c, 0, None))
        rad = np.zeros((len(self.r), len(c)))
        ang = np.zeros_like(rad)
        for j, (a, b) in self.modes.items():
            rad += np.outer(a, P[j])
            ang += np.outer(b, dP[j] * s)
        with np.errstate(divide="ignore", invalid="ignore"):
            ang = np.where(f[:, None] > 0, ang / f[:, None], 0.0)
        return np.sqrt(rad**2 + ang**2)


@dataclass
class LpNorm:
    value: float
    divergent: bool
    tail: float

    def __float__(self):
        return self.value


def lp_norm(model: ModelManifold, fld: FieldOnM, p: float, angular_nodes: int = 24) -> LpNorm:
    """``L^p`` norm with volume ``f^{n-1} dr dvol(S^{n-1})``.

    The part beyond the grid is estimated from the power law of the outermost
    decade at each end; a non-integrable power law sets ``divergent``.
    """
    n = model.n
    grid = fld.grid
    r = grid.r
    w = grid.weights(model)
    if set(fld.modes) == {0} and not fld.one_form:
        dens = np.abs(fld.modes[0]) ** p
        ang_total = sphere_volume(n)
    elif set(fld.modes) == {0}:
        dens = np.abs(fld.modes[0][0]) ** p
        ang_total = sphere_volume(n)
    else:
        al = 0.5 * (n - 3)
        c, wc = roots_jacobi(angular_nodes, al, al) if al > 0 else roots_legendre(angular_nodes)
        vals = np.abs(fld.pointwise(c)) ** p
        dens = vals @ wc
        ang_total = sphere_volume(n - 1)
    total = float(np.sum(w * dens)) * ang_total
    f = model.profile(r) ** (n - 1)
    tail, divergent = 0.0, False
    for side in ((r > 0.1 * r[-1]) & (r > 0),) + (((r < 0.1 * r[0]) & (r < 0),) if r[0] < 0 else ()):
        rr = np.abs(r[side])
        integrand = dens[side] * f[side]
        good = integrand > 0
        if good.sum() < 5:
            continue
        fit = fit_linear(np.log(rr[good]), np.log(integrand[good]))
        s = fit["slope"]
        edge = integrand[np.argmax(rr)]
        if edge <= 1e-300:
            continue
        if s >= -1.0 + 1e-3:
            divergent = True
        else:
            tail += float(edge * rr.max() / (-s - 1.0)) * ang_total
    if divergent:
        return LpNorm(total ** (1 / p), True, np.inf)
    return LpNorm((total + tail) ** (1 / p), False, tail)


# ---------------------------------------------------------------------------
# operators on fields


def _k_integral(model, fld: FieldOnM, spec: QuadratureSpec, laplace_first: bool):
    k, w = spec.nodes()
    out = {}
    for j, g in fld.modes.items():
        op = BandedResolvent(model, fld.grid, j)
        v = op.apply(g, 0.0) if laplace_first else g
        acc = np.zeros_like(v)
        for kk, ww in zip(k, w):
            acc += ww * op.solve(kk, v).real
        out[j] = (2.0 / np.pi) * acc
    return FieldOnM(model, fld.grid, out)


def laplacian_apply(model: ModelManifold, fld: FieldOnM) -> FieldOnM:
    """Fourth-order finite-difference ``Delta`` per mode."""
    return FieldOnM(model, fld.grid, {j: BandedResolvent(model, fld.grid, j).apply(g, 0.0)
                                      for j, g in fld.modes.items()})


def sqrt_laplacian_apply(model: ModelManifold, g: FieldOnM, spec: QuadratureSpec = None) -> FieldOnM:
    """``Delta^{1/2} g = (2/pi) int (Delta + k^2)^{-1} Delta g dk``."""
    return _k_integral(model, g, spec or QuadratureSpec(), True)


def inverse_sqrt_apply(model: ModelManifold, g: FieldOnM, spec: QuadratureSpec = None) -> FieldOnM:
    """``Delta^{-1/2} g = (2/pi) int (Delta + k^2)^{-1} g dk``."""
    return _k_integral(model, g, spec or QuadratureSpec(), False)


def exterior_derivative(model: ModelManifold, u: FieldOnM) -> FieldOnM:
    modes = {}
    for j, g in u.modes.items():
        op = BandedResolvent(model, u.grid, j)
        modes[j] = (op.derivative(g), g.copy())
    return FieldOnM(model, u.grid, modes, one_form=True)


def riesz_apply(model: ModelManifold, g: FieldOnM, spec: QuadratureSpec = None) -> FieldOnM:
    """``T g = d Delta^{-1/2} g`` as a one-form field."""
    return exterior_derivative(model, inverse_sqrt_apply(model, g, spec))


def value_at(grid_r, values, x, deriv: int = 0, width: int = 6):
    """Local polynomial interpolation (or derivative) of grid data at ``x``."""
    i = int(np.searchsorted(grid_r, x))
    lo = min(max(i - width // 2, 0), len(grid_r) - width)
    sl = slice(lo, lo + width)
    return float(_fd_weights(grid_r[sl], x, deriv) @ values[sl])


# ---------------------------------------------------------------------------
# kernels


def _pruned_nodes(spec, sep):
    k, w = spec.nodes()
    keep = k * max(sep, 1e-12) <= _PRUNE
    return k[keep], w[keep]


def sqrt_inverse_series(model: ModelManifold, r: float, rp: float, spec: QuadratureSpec = None,
                        deriv: bool = True, tol: float = TRUNCATION_TOL):
    """Mode coefficients of the ``Delta^{-1/2}`` kernel (and its ``r``-derivative)."""
    spec = spec or QuadratureSpec()
    k, w = _pruned_nodes(spec, abs(rp - r))
    red = lambda u: (2.0 / np.pi) * np.sum(w * u.real)
    return mode_series(model, k, r, rp, reduce=red, deriv=deriv, tol=tol)


def riesz_kernel(model: ModelManifold, z: PointM, zp: PointM, spec: QuadratureSpec = None):
    """One-form ``T(z, z') = d_z Delta^{-1/2}(z, z')``: returns ``(radial, angular, norm)``."""
    s = sqrt_inverse_series(model, z.r, zp.r, spec)
    f = float(model.profile(z.r))
    rad, ang = s.gradient(z.cos_angle(zp), f)
    return float(rad), float(ang), float(np.hypot(rad, ang))


def flat_riesz_kernel(n: int, z: PointM, zp: PointM) -> float:
    """``|d_z c_n |z - z'|^{1-n}| = (n-1) c_n |z - z'|^{-n}`` on ``R^n``."""
    from scipy.special import gamma
    c = gamma(0.5 * (n - 1)) / (2 * np.pi ** (0.5 * (n + 1)))
    return float((n - 1) * c * geodesic_distance_flat(z, zp) ** (-n))


def sqrt_inverse_constant(n: int) -> float:
    """``c_n`` in the ``R^n`` kernel ``c_n |z - z'|^{1-n}`` of ``Delta^{-1/2}``."""
    from scipy.special import gamma
    return float(gamma(0.5 * (n - 1)) / (2 * np.pi ** (0.5 * (n + 1))))


def riesz_kernel_row(model: ModelManifold, z: PointM, end: int = 1, r_list=None,
                     cos_gamma: float = 0.5, spec: QuadratureSpec = None) -> ExperimentReport:
    """Decay of ``|T(z, z')|`` as ``z'`` runs out an end.

    ``r_list`` holds end coordinates (a doubling sequence); ``z'`` sits at
    angle ``cos_gamma`` from ``z``.  Reports the fitted exponent, the scaled
    coefficient ``r'^{n-1} |T| / |Phi'(r_z)|`` Richardson-extrapolated, and
    its ratio to ``c_n``.
    """
    n = model.n
    if r_list is None:
        r_list = 20.0 * 2.0 ** np.arange(6)
    r_list = np.asarray(r_list, dtype=float)
    p = model.profile
    omega = np.zeros(n)
    omega[0] = cos_gamma
    omega[1] = np.sqrt(1 - cos_gamma**2)
    rows, mags = [], []
    if model.ends == "two":
        dphi = abs(float(phi_plus(model).dphi(z.r)))
    else:
        dphi = float("nan")
    for x in r_list:
        rp = x + p.c_plus if end > 0 else -(x + p.c_minus)
        if model.ends == "one":
            rp = x
        zp = PointM(rp, tuple(omega))
        rad, ang, mag = riesz_kernel(model, z, zp, spec)
        mags.append(mag)
        row = dict(r_prime=float(x), radial=rad, angular=ang, value=mag,
                   scaled=mag * x ** (n - 1))
        if model.ends == "one":
            row["flat_closed_form"] = flat_riesz_kernel(n, z, zp)
        rows.append(row)
    rep = ExperimentReport("riesz-kernel", rows)
    fit = fit_loglog(r_list, np.array(mags))
    fit["exponent"] = -fit["slope"]
    rep.fits["decay"] = fit
    rep.flags["poor_fit"] = fit["r2"] < 0.98
    if model.ends == "two":
        sc = np.array([r["scaled"] for r in rows]) / dphi
        lev = richardson(richardson(sc, 1), 2)
        coef = float(lev[-1])
        rep.fits["coefficient"] = dict(coefficient_over_dphi=coef, raw_last=float(sc[-1]),
                                       dphi=dphi, ratio_to_cn=coef / sqrt_inverse_constant(n))
    return rep


# ---------------------------------------------------------------------------
# threshold experiment


def log_window(x, lo, hi):
    """Smooth cutoff in ``log x``: rises on ``[lo, 2 lo]``, falls on ``[hi/2, hi]``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = np.log(np.where(x > 0, x, 1.0))
        up = smooth_step((lx - np.log(lo)) / np.log(2.0))
        down = 1.0 - smooth_step((lx - np.log(hi / 2)) / np.log(2.0))
    return np.where(x > 0, up * down, 0.0)


def threshold_family(model: ModelManifold, r, K: float, r0: float = 2.0):
    """``F_K = window * 1/(x log x)`` on the + end, ``x = r - c_+``."""
    r = np.asarray(r, dtype=float)
    x = r - model.profile.c_plus if model.ends == "two" else r
    with np.errstate(divide="ignore", invalid="ignore"):
        F = np.where(x > r0 * 0.99, 1.0 / (x * np.log(np.where(x > 1, x, 2.0))), 0.0)
    return log_window(x, r0, K) * F


def _pairing(model, r_z, grid, F, spec):
    """``(T F)(z)`` radial part by pairing the j=0 kernel row with ``F``."""
    w = grid.weights(model)
    sel = np.abs(F) > 0
    rp = grid.r[sel]
    sep = max(np.min(np.abs(rp - r_z)), 1e-12)
    k, wk = _pruned_nodes(spec or QuadratureSpec(), sep)
    g = mode_green(model, 0, k)
    du = g(np.full(rp.shape, r_z), rp, 1).real
    row = (2.0 / np.pi) * (wk @ du)
    return float(np.sum(row * F[sel] * w[sel]))


def threshold_experiment(model: ModelManifold, p_list=(3.0, 2.0), K_list=None, z0: PointM = None,
                         spec: QuadratureSpec = None, points: int = 6001, r0: float = 2.0,
                         pairing: bool = True) -> ExperimentReport:
    """Norms of ``F_K`` and ``T F_K`` and the value ``(T F_K)(z_0)`` versus ``K``.

    Each ``K`` uses a grid reaching ``8K``.  ``T F_K(z_0)`` is computed on the
    grid (finite differences) and, with ``pairing``, independently by pairing
    the Green-function kernel row against ``F_K``.
    """
    spec = spec or QuadratureSpec()
    n = model.n
    if K_list is None:
        K_list = np.geomspace(1e3, 1e6, 7)
    if z0 is None:
        z0 = PointM.on_axis(0.0 if model.ends == "two" else 1.0, n)
    rows = []
    for K in K_list:
        big = ModelManifold(model.dimension, model.profile, max(model.r_max, 8.0 * K))
        grid = RadialGrid.build(big, points)
        F = threshold_family(big, grid.r, K, r0)
        fld = FieldOnM.radial(big, grid, F)
        u = inverse_sqrt_apply(big, fld, spec).modes[0]
        op = BandedResolvent(big, grid, 0)
        du = op.derivative(u)
        T_z0 = value_at(grid.r, u, z0.r, deriv=1)
        row = dict(K=float(K), T_at_z0=T_z0)
        if pairing:
            row["T_at_z0_pairing"] = _pairing(big, z0.r, grid, F, spec)
        tf = FieldOnM(big, grid, {0: (du, u)}, one_form=True)
        for p in p_list:
            nf = lp_norm(big, fld, p)
            nt = lp_norm(big, tf, p)
            tag = f"{p:g}"
            row[f"norm_F_{tag}"] = nf.value
            row[f"norm_TF_{tag}"] = nt.value
            row[f"ratio_{tag}"] = nt.value / nf.value
            row[f"TF_divergent_{tag}"] = nt.divergent
        rows.append(row)
    rep = ExperimentReport("riesz-threshold", rows)
    T = np.array([r["T_at_z0"] for r in rows])
    fit = fit_linear(np.log(np.log(np.asarray(K_list))), np.abs(T))
    rep.fits["loglog_growth"] = fit
    if model.ends == "two":
        # leading pairing: vol(S^{n-1}) Phi'(z0) c_n int dr / (r log r)
        rep.fits["loglog_growth"]["slope_over_prediction"] = fit["slope"] / (
            sphere_volume(n) * float(phi_plus(model).dphi(z0.r)) * sqrt_inverse_constant(n))
    rep.notes.append("divergence and stability evidence at desk scale, not an operator-norm proof")
    return rep
