"""Log-scaled exterior solutions of the flat radial Helmholtz equation.

On an exact Euclidean end the mode-j equation ``u'' + (n-1)/x u' -
j(j+n-2)/x^2 u - k^2 u = 0`` has the decaying solution
``x^{1-n/2} K_nu(kx)`` and the growing one ``x^{1-n/2} I_nu(kx)``,
``nu = j + n/2 - 1``.  Values are returned as ``(log u, u'/u)`` so products
of exponentially large and small factors never overflow.
"""
from __future__ import annotations

import mpmath
import numpy as np
from scipy.special import ive, kve


def _mp_log_ratio(kind, nu, z):
    z = complex(z)
    if not np.isfinite(z):
        return complex(np.nan), complex(np.nan)
    if kind == "K":
        a = mpmath.besselk(nu, z)
        b = mpmath.besselk(nu - 1, z)
        return complex(mpmath.log(a)), complex(-b / a - nu / z)
    a = mpmath.besseli(nu, z)
    b = mpmath.besseli(nu + 1, z)
    return complex(mpmath.log(a)), complex(b / a + nu / z)


def _log_bessel(kind, nu, z):
    """``(log F_nu(z), F_nu'(z)/F_nu(z))`` for F = K or I, complex z with Re z > 0."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        if kind == "K":
            a = kve(nu, z)
            b = kve(nu - 1, z)
            logv = np.log(a) - z
            dlog = -b / a - nu / z
        else:
            a = ive(nu, z)
            b = ive(nu + 1, z)
            logv = np.log(a) + np.abs(z.real)
            dlog = b / a + nu / z
    bad = ~(np.isfinite(logv) & np.isfinite(dlog)) | (a == 0)
    if np.any(bad):
        logv = np.array(logv, dtype=complex)
        dlog = np.array(dlog, dtype=complex)
        for i in zip(*np.nonzero(bad)):
            logv[i], dlog[i] = _mp_log_ratio(kind, nu, z[i])
    return logv, dlog


def exterior_log(n: int, j: int, k, x, kind: str = "decay"):
    """Log value and log-derivative (in ``x``) of an exterior mode solution.

    ``kind`` is ``"decay"`` (``x^{1-n/2} K_nu(kx)``, or ``x^{-(n-2+j)}`` at
    ``k = 0``) or ``"grow"`` (``x^{1-n/2} I_nu(kx)``, or ``x^j``).  ``k`` and
    ``x`` broadcast; ``Re k >= 0`` is required.
    """
    k = np.asarray(k, dtype=complex)
    x = np.asarray(x, dtype=float)
    if np.any(k.real < -1e-300):
        raise ValueError("Re k must be >= 0")
    k, x = np.broadcast_arrays(k, x)
    nu = j + 0.5 * n - 1
    logv = np.empty(k.shape, dtype=complex)
    dlog = np.empty(k.shape, dtype=complex)
    zero = k == 0
    if np.any(zero):
        xz = x[zero]
        if kind == "decay":
            logv[zero] = -(n - 2 + j) * np.log(xz)
            dlog[zero] = -(n - 2 + j) / xz
        else:
            logv[zero] = j * np.log(xz)
            dlog[zero] = j / xz
    nz = ~zero
    if np.any(nz):
        z = k[nz] * x[nz]
        lb, db = _log_bessel("K" if kind == "decay" else "I", nu, z)
        logv[nz] = (1 - 0.5 * n) * np.log(x[nz]) + lb
        dlog[nz] = (1 - 0.5 * n) / x[nz] + k[nz] * db
    return logv, dlog
