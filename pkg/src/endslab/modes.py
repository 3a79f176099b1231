"""Spherical-harmonic mode bookkeeping for warped products.

A rotation-invariant two-point kernel is stored as radial coefficients
``u_j(r, r')`` and resynthesized with the zonal harmonics ``Z_j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ModelManifold, sphere_volume

J_MAX = 64
TRUNCATION_TOL = 1e-8


class TruncationError(RuntimeError):
    """Mode sum did not converge to the requested tolerance."""


def eigenvalue(j: int, n: int) -> float:
    """Eigenvalue ``j(j+n-2)`` of the round-sphere Laplacian on degree-j harmonics."""
    if j < 0 or n < 3:
        raise ValueError("need j >= 0 and n >= 3")
    return float(j * (j + n - 2))


def gegenbauer_table(jmax: int, alpha: float, c):
    """``C_j^{(alpha)}(c)`` for ``j = 0..jmax`` by upward recurrence."""
    c = np.asarray(c, dtype=float)
    out = np.empty((jmax + 1,) + c.shape)
    out[0] = 1.0
    if jmax >= 1:
        out[1] = 2.0 * alpha * c
    for j in range(2, jmax + 1):
        out[j] = (2.0 * c * (j + alpha - 1) * out[j - 1] - (j + 2 * alpha - 2) * out[j - 2]) / j
    return out


def _zonal_norm(j, n):
    j = np.asarray(j, dtype=float)
    return (2 * j + n - 2) / ((n - 2) * sphere_volume(n))


def zonal_table(jmax: int, c, n: int):
    """Rows ``Z_j(c)`` for ``j = 0..jmax``."""
    c = np.asarray(c, dtype=float)
    if np.any(np.abs(c) > 1 + 1e-14):
        raise ValueError("|cos gamma| > 1")
    c = np.clip(c, -1.0, 1.0)
    C = gegenbauer_table(jmax, 0.5 * n - 1, c)
    js = np.arange(jmax + 1).reshape((-1,) + (1,) * c.ndim)
    return _zonal_norm(js, n) * C


def zonal_kernel(j: int, cos_gamma, n: int):
    """Zonal harmonic ``Z_j(cos gamma)``, the reproducing kernel of degree-j harmonics.

    For ``n = 3`` this is ``(2j+1)/(4 pi) P_j``.
    """
    return zonal_table(j, cos_gamma, n)[j]


def zonal_derivative_table(jmax: int, c, n: int):
    """Rows ``dZ_j/dc`` using ``d/dc C_j^a = 2a C_{j-1}^{a+1}``."""
    c = np.clip(np.asarray(c, dtype=float), -1.0, 1.0)
    a = 0.5 * n - 1
    out = np.zeros((jmax + 1,) + c.shape)
    if jmax >= 1:
        C1 = gegenbauer_table(jmax - 1, a + 1, c)
        out[1:] = 2 * a * C1
    js = np.arange(jmax + 1).reshape((-1,) + (1,) * c.ndim)
    return _zonal_norm(js, n) * out


@dataclass(frozen=True)
class RadialOperator:
    """``L_{j,k} u = -u'' - (n-1)(f'/f) u' + j(j+n-2)/f^2 u + k^2 u``."""

    model: ModelManifold
    j: int
    k: complex = 0.0

    @property
    def lam(self) -> float:
        return eigenvalue(self.j, self.model.n)


def _fd_weights(x, x0, m):
    """Fornberg weights for derivative ``m`` at ``x0`` on stencil ``x``."""
    n = len(x)
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for jj in range(i):
            c3 = x[i] - x[jj]
            c2 *= c3
            if jj == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[jj, s] = (c4 * c[jj, s] - s * c[jj, s - 1]) / c3
            c[jj, 0] = c4 * c[jj, 0] / c3
        c1 = c2
    return c[:, m]


def derivative_matrices(r: np.ndarray):
    """Second-order three-point first and second derivative weights.

    Returns ``(idx, w1, w2)`` with stencil indices of shape ``(N, 3)``; the end
    points use one-sided stencils.
    """
    N = len(r)
    idx = np.empty((N, 3), dtype=int)
    idx[:, 0] = np.arange(N) - 1
    idx[:, 1] = np.arange(N)
    idx[:, 2] = np.arange(N) + 1
    idx[0] = [0, 1, 2]
    idx[-1] = [N - 3, N - 2, N - 1]
    w1 = np.empty((N, 3))
    w2 = np.empty((N, 3))
    for i in range(N):
        xs = r[idx[i]]
        w1[i] = _fd_weights(xs, r[i], 1)
        w2[i] = _fd_weights(xs, r[i], 2)
    return idx, w1, w2


def radial_apply(op: RadialOperator, r, u):
    """Apply ``L_{j,k}`` to samples ``u`` on the grid ``r`` (second order).

    Nodes where ``f`` vanishes (the origin of a one-end model) are returned as
    NaN.
    """
    r = np.asarray(r, dtype=float)
    u = np.asarray(u)
    if len(r) < 8:
        raise ValueError("grid too coarse (< 8 points)")
    idx, w1, w2 = derivative_matrices(r)
    du = np.sum(w1 * u[idx], axis=1)
    d2u = np.sum(w2 * u[idx], axis=1)
    prof = op.model.profile
    f, fp = prof(r, 0), prof(r, 1)
    n = op.model.n
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -d2u - (n - 1) * fp / f * du + op.lam / f**2 * u + op.k**2 * u
    return np.where(f > 0, out, np.nan)


@dataclass
class SynthesisResult:
    value: float
    last_term: float
    tail_ratio: float
    n_terms: int


def synthesize_kernel(mode_values, cos_gamma: float, n: int, tol: float = TRUNCATION_TOL,
                      strict: bool = False) -> SynthesisResult:
    """Sum ``u_j Z_j(cos gamma)`` over the supplied modes in ascending ``j``.

    ``mode_values`` is a sequence of ``(j, u_j)``.  The magnitude of the last
    retained term relative to the sum and the ratio of the last two terms are
    reported; with ``strict`` a ``TruncationError`` is raised when the relative
    last term exceeds ``tol``.
    """
    items = sorted(mode_values, key=lambda t: t[0])
    jmax = items[-1][0]
    Z = zonal_table(jmax, cos_gamma, n)
    terms = np.array([u * Z[j] for j, u in items])
    total = terms.sum()
    last = abs(terms[-1])
    ratio = abs(terms[-1]) / abs(terms[-2]) if len(terms) > 1 and terms[-2] != 0 else 0.0
    scale = max(abs(total), np.finfo(float).tiny)
    if strict and len(items) > 1 and last / scale > tol:
        raise TruncationError(f"last mode term {last / scale:.2e} exceeds {tol:.1e}")
    return SynthesisResult(total, last / scale, ratio, len(items))
