"""Mode-reduced resolvent ``(Delta + k^2)`` on the model manifold.

Homogeneous solutions are exact on the Euclidean ends (modified Bessel
functions) and are carried across the neck by integrating the Riccati
equation for ``y = psi'/psi`` in the direction in which each solution grows,
so the integration is stable for every ``Re k > 0``.  Everything is kept in
log form; Green functions are assembled as ``exp`` of sums of logs.

``apply_resolvent`` solves the inhomogeneous problem on a graded grid with a
fourth-order banded finite-difference scheme and transparent Robin conditions.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded

from ._bessel import exterior_log
from .geometry import ModelManifold
from .modes import eigenvalue

SOLVER_TOL = 1e-12
WRONSKIAN_FLOOR = 1e-12


class SolverError(RuntimeError):
    """Neck integration failed or the Wronskian degenerated."""


def exterior_solution(n: int, j: int, k: complex, r, r_max: float = 400.0):
    """Decaying exterior solution and its derivative on ``R^n`` minus a ball.

    Normalized to 1 at ``r = r_max``.  Returns ``(value, derivative)``.
    """
    if np.real(k) < 0:
        raise ValueError("Re k must be >= 0")
    lv, dl = exterior_log(n, j, k, r, "decay")
    l0, _ = exterior_log(n, j, k, r_max, "decay")
    val = np.exp(lv - l0)
    if np.isrealobj(k) or np.all(np.imag(k) == 0):
        val, dl = val.real, dl.real
    return val, val * dl


# ---------------------------------------------------------------------------
# homogeneous solutions


@dataclass
class HomogeneousSolution:
    """Solution of ``L_{j,k} psi = 0`` decaying at one end, for a batch of ``k``.

    ``log(r)`` returns ``(log psi, psi'/psi)`` with shape ``(len(k), len(r))``.
    """

    model: ModelManifold
    j: int
    k: np.ndarray
    end: int  # +1 or -1
    _neck: object = field(default=None, repr=False)
    _far: tuple = field(default=None, repr=False)

    def log(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        nk = len(self.k)
        ell = np.empty((nk, len(r)), dtype=complex)
        y = np.empty_like(ell)
        m = self.model
        n, j = m.n, self.j
        kk = self.k[:, None]
        if m.ends == "one":
            kind = "decay" if self.end > 0 else "grow"
            x = np.where(r > 0, r, np.nan)
            lv, dl = exterior_log(n, j, kk, x[None, :], kind)
            return lv, dl
        p = m.profile
        R = p.neck_radius
        s = self.end
        own = (r * s) >= R          # exact region of the decaying end
        other = (r * s) <= -R
        neck = ~(own | other)
        c_own = p.c_plus if s > 0 else p.c_minus
        if np.any(own):
            x = s * r[own] - c_own
            lv, dl = exterior_log(n, j, kk, x[None, :], "decay")
            l0, _ = exterior_log(n, j, self.k, R - c_own, "decay")
            ell[:, own] = lv - l0[:, None]
            y[:, own] = s * dl
        if np.any(neck):
            st = self._neck.sol(r[neck])
            ell[:, neck] = st[nk:]
            y[:, neck] = st[:nk]
        if np.any(other):
            L, a, b, lD0, lG0 = self._far
            c_oth = p.c_minus if s > 0 else p.c_plus
            x = -s * r[other] - c_oth
            lD, dD = exterior_log(n, j, kk, x[None, :], "decay")
            lG, dG = exterior_log(n, j, kk, x[None, :], "grow")
            eD = lD - lD0[:, None]
            eG = lG - lG0[:, None]
            shift = np.maximum(eD.real, eG.real)
            tD = a[:, None] * np.exp(eD - shift)
            tG = b[:, None] * np.exp(eG - shift)
            tot = tD + tG
            ell[:, other] = L[:, None] + shift + np.log(tot)
            # d/dr = -s d/dx on the other end
            y[:, other] = -s * (tD * dD + tG * dG) / tot
        return ell, y

    def values(self, r, normalize_at=None):
        """``psi(r)``, normalized to 1 at ``normalize_at`` (default: the
        truncation radius of the decaying end)."""
        if normalize_at is None:
            normalize_at = self.end * self.model.r_max if self.model.ends == "two" else self.model.r_max
        ell, y = self.log(r)
        e0, _ = self.log([normalize_at])
        return np.exp(ell - e0)


def _riccati_rhs(model: ModelManifold, lam: float, k2: np.ndarray):
    P = np.polynomial.polynomial
    c0 = model.profile.coeffs[::-1].tolist()
    c1 = P.polyder(model.profile.coeffs)[::-1].tolist()
    n1 = model.n - 1
    nk = len(k2)

    def rhs(r, st):
        f = 0.0
        for c in c0:
            f = f * r + c
        fp = 0.0
        for c in c1:
            fp = fp * r + c
        y = st[:nk]
        out = np.empty_like(st)
        out[:nk] = (lam / (f * f) + k2) - y * (y + n1 * fp / f)
        out[nk:] = y
        return out

    return rhs


def solve_homogeneous(model: ModelManifold, j: int, k, end: int = 1,
                      tol: float = SOLVER_TOL) -> HomogeneousSolution:
    """Decaying solution at the ``end`` (+1 / -1) end for each ``k`` in a batch.

    The exterior log-derivative is imposed where the end becomes exactly
    Euclidean and the Riccati equation is integrated across the neck; one-end
    models use the regular solution at ``r = 0`` for ``end = -1``.
    """
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    if np.any(k.real < 0):
        raise ValueError("Re k must be >= 0")
    sol = HomogeneousSolution(model, j, k, int(np.sign(end)))
    if model.ends == "one":
        return sol
    p = model.profile
    R = p.neck_radius
    n = model.n
    s = sol.end
    c_own = p.c_plus if s > 0 else p.c_minus
    c_oth = p.c_minus if s > 0 else p.c_plus
    _, d0 = exterior_log(n, j, k, R - c_own, "decay")
    y0 = s * d0
    st0 = np.concatenate([y0, np.zeros_like(y0)])
    rhs = _riccati_rhs(model, eigenvalue(j, n), k**2)
    res = solve_ivp(rhs, (s * R, -s * R), st0, method="DOP853", rtol=tol,
                    atol=tol * 1e-2, dense_output=True)
    if not res.success:
        raise SolverError(res.message)
    nk = len(k)
    yend, Lend = res.y[:nk, -1], res.y[nk:, -1]
    if not (np.all(np.isfinite(yend)) and np.all(np.isfinite(Lend))):
        raise SolverError("neck integration overflowed")
    xo = R - c_oth
    lD0, dD0 = exterior_log(n, j, k, xo, "decay")
    lG0, dG0 = exterior_log(n, j, k, xo, "grow")
    # psi = a D + b G at the far side; x-derivative there is -s * y
    target = -s * yend
    a = (target - dG0) / (dD0 - dG0)
    sol._neck = res
    sol._far = (Lend, a, 1.0 - a, lD0, lG0)
    return sol


# ---------------------------------------------------------------------------
# Green functions


@dataclass
class ModeGreen:
    """Radial Green function of ``L_{j,k}`` for a batch of spectral parameters.

    ``u_j(r, r') = psi_-(min) psi_+(max) / W`` with
    ``W = -f^{n-1} (psi_- psi_+' - psi_-' psi_+)``, so that
    ``L_{j,k} u_j(., r') = delta_{r'} / f(r')^{n-1}``.
    """

    model: ModelManifold
    j: int
    k: np.ndarray
    minus: HomogeneousSolution
    plus: HomogeneousSolution
    log_w: np.ndarray

    def wronskian(self, r):
        """Weighted Wronskian evaluated along ``r``, shape ``(len(k), len(r))``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        lm, ym = self.minus.log(r)
        lp, yp = self.plus.log(r)
        f = self.model.profile(r)
        return -f ** (self.model.n - 1) * np.exp(lm + lp - self.log_w[:, None]) * (yp - ym)

    def __call__(self, r, rp, deriv: int = 0):
        """Kernel ``u_j(r, r')`` (or ``d/dr`` with ``deriv=1``) for paired
        arrays ``r, rp``; result has shape ``(len(k), len(r))``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        rp = np.atleast_1d(np.asarray(rp, dtype=float))
        r, rp = np.broadcast_arrays(r, rp)
        lo = np.minimum(r, rp)
        hi = np.maximum(r, rp)
        lm, ym = self.minus.log(lo)
        lp, yp = self.plus.log(hi)
        with np.errstate(under="ignore", over="ignore"):
            val = np.exp(lm + lp - self.log_w[:, None])
        if deriv == 0:
            return val
        # derivative in the first argument
        return np.where(r[None, :] <= rp[None, :], ym, yp) * val

    def real_if_possible(self, a):
        return a.real if np.all(self.k.imag == 0) else a


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def mode_green(model: ModelManifold, j: int, k, tol: float = SOLVER_TOL) -> ModeGreen:
    """Build (or fetch from cache) the mode Green function for a batch of ``k``."""
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    key = (model, j, k.tobytes(), tol)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    minus = solve_homogeneous(model, j, k, -1, tol)
    plus = solve_homogeneous(model, j, k, +1, tol)
    r0 = 0.0 if model.ends == "two" else 1.0
    lm, ym = minus.log([r0])
    lp, yp = plus.log([r0])
    f0 = float(model.profile(r0))
    wr = -f0 ** (model.n - 1) * (yp[:, 0] - ym[:, 0])
    if np.any(np.abs(wr) < WRONSKIAN_FLOOR * np.maximum(1.0, np.abs(yp[:, 0]))):
        raise SolverError("Wronskian below floor: spurious resonance")
    log_w = np.log(wr) + lm[:, 0] + lp[:, 0]
    g = ModeGreen(model, j, k, minus, plus, log_w)
    with _CACHE_LOCK:
        if len(_CACHE) > 512:
            _CACHE.clear()
        _CACHE[key] = g
    return g


def clear_cache():
    with _CACHE_LOCK:
        _CACHE.clear()


# ---------------------------------------------------------------------------
# graded grid and finite-difference resolvent


@dataclass(frozen=True)
class RadialGrid:
    """Grid ``r = scale * sinh(xi)`` with ``xi`` uniform.

    Spacing is ~``scale * h`` in the neck and grows geometrically toward the
    truncation radius.  One-end grids start at ``r = 0``.
    """

    xi: np.ndarray
    scale: float

    @classmethod
    def build(cls, model: ModelManifold, points: int = 4001, scale: float = None,
              r_max: float = None):
        if points < 8:
            raise ValueError("grid too coarse (< 8 points)")
        scale = scale or max(model.neck_radius, 1.0)
        r_max = r_max or model.r_max
        X = np.arcsinh(r_max / scale)
        if model.ends == "two":
            xi = np.linspace(-X, X, points)
        else:
            xi = np.linspace(0.0, X, points)
        return cls(xi, float(scale))

    @property
    def r(self):
        return self.scale * np.sinh(self.xi)

    @property
    def dr_dxi(self):
        return self.scale * np.cosh(self.xi)

    @property
    def h(self):
        return float(self.xi[1] - self.xi[0])

    def weights(self, model: ModelManifold):
        """Quadrature weights for ``int u f^{n-1} dr`` (composite Simpson in xi)."""
        N = len(self.xi)
        w = np.ones(N)
        if N % 2 == 1:
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            w *= self.h / 3.0
        else:
            w[0] = w[-1] = 0.5
            w *= self.h
        return w * self.dr_dxi * model.profile(self.r) ** (model.n - 1)


_C1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_C2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _one_sided(m, offsets):
    from .modes import _fd_weights
    return _fd_weights(np.asarray(offsets, dtype=float), 0.0, m)


class BandedResolvent:
    """Fourth-order finite-difference discretization of ``L_{j,k}`` on a grid."""

    BW = 4

    def __init__(self, model: ModelManifold, grid: RadialGrid, j: int):
        self.model, self.grid, self.j = model, grid, j
        r = grid.r
        N = len(r)
        self.N = N
        h = grid.h
        rx = grid.dr_dxi
        rxx = grid.scale * np.sinh(grid.xi)
        n = model.n
        f = model.profile(r)
        fp = model.profile(r, 1)
        lam = eigenvalue(j, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            a1 = (n - 1) * fp / f       # coefficient of u_r
            pot = lam / f**2
        # u_r = D1/rx ; u_rr = D2/rx^2 - rxx D1/rx^3 (D in xi)
        c1 = -(a1 / rx) + rxx / rx**3   # multiplies D1 u
        c2 = -1.0 / rx**2               # multiplies D2 u
        rows = np.zeros((N, 2 * self.BW + 1))  # dense stencil per row, offsets -4..4
        self.one = model.ends == "one"
        for i in range(N):
            if 2 <= i <= N - 3:
                offs = np.arange(-2, 3)
                w1, w2 = _C1 / h, _C2 / h**2
            elif i < 2:
                offs = np.arange(-1, 5) if i == 1 else np.arange(0, 5)
                w1 = _one_sided(1, offs) / h
                w2 = _one_sided(2, offs) / h**2
            else:
                offs = np.arange(-4, 2) if i == N - 2 else np.arange(-4, 1)
                w1 = _one_sided(1, offs) / h
                w2 = _one_sided(2, offs) / h**2
            rows[i, offs + self.BW] += c1[i] * w1 + c2[i] * w2
        self.rows = rows
        self.pot = pot
        if self.one:
            self._fold_origin(h, rx)

    def _fold_origin(self, h, rx):
        """Replace near-origin rows using parity ``u(-r) = (-1)^j u(r)``."""
        n, j = self.model.n, self.j
        par = (-1.0) ** j
        r = self.grid.r
        rows = self.rows
        for i in (1, 2):
            offs = np.arange(-2, 3)
            w1, w2 = _C1 / h, _C2 / h**2
            fp_over_f = 1.0 / r[i]
            c1 = -(n - 1) * fp_over_f / rx[i]  # rxx=0 contribution small but keep exact below
            c1 += self.grid.scale * np.sinh(self.grid.xi[i]) / rx[i] ** 3
            c2 = -1.0 / rx[i] ** 2
            st = c1 * w1 + c2 * w2
            rows[i] = 0.0
            for o, wgt in zip(offs, st):
                t = i + o
                if t < 0:
                    rows[i, -t - i + self.BW] += par * wgt
                else:
                    rows[i, o + self.BW] += wgt
        rows[0] = 0.0
        if j == 0:
            # L u(0) = -n u_rr(0) + k^2 u(0); even extension, rx(0) = scale
            w2 = _C2 / h**2
            st = -n * w2 / rx[0] ** 2
            for o, wgt in zip(range(-2, 3), st):
                rows[0, abs(o) + self.BW] += wgt
            self.pot = self.pot.copy()
            self.pot[0] = 0.0
        else:
            rows[0, self.BW] = 1.0
            self.pot = self.pot.copy()
            self.pot[0] = 0.0

    def solve(self, k, v, bc: str = "transparent"):
        """Solve ``L_{j,k} u = v`` with transparent Robin conditions."""
        k = complex(k)
        N, BW = self.N, self.BW
        model = self.model
        rows = self.rows.astype(complex if k.imag != 0 else float).copy()
        diag = self.pot + (k**2 if k.imag != 0 else k.real**2)
        interior = np.ones(N, dtype=bool)
        if self.one:
            interior[0] = self.j == 0
        rows[interior, BW] += diag[interior]
        rhs = np.asarray(v, dtype=rows.dtype).copy()
        if self.one and self.j > 0:
            rhs[0] = 0.0
        r = self.grid.r
        rx = self.grid.dr_dxi
        h = self.grid.h
        n, j = model.n, self.j

        def robin_row(i, y, offs):
            w1 = _one_sided(1, offs) / (h * rx[i])
            row = np.zeros(2 * BW + 1, dtype=rows.dtype)
            row[offs + BW] = w1
            row[BW] -= y
            return row

        x_hi = float(model.end_coordinate(r[-1]))
        _, d_hi = exterior_log(n, j, k, x_hi, "decay")
        rows[-1] = robin_row(N - 1, complex(d_hi[()]) if rows.dtype == complex else d_hi.real[()],
                             np.arange(-4, 1))
        rhs[-1] = 0.0
        if not self.one:
            x_lo = float(model.end_coordinate(r[0]))
            _, d_lo = exterior_log(n, j, k, x_lo, "decay")
            y_lo = -d_lo[()]
            rows[0] = robin_row(0, y_lo if rows.dtype == complex else y_lo.real, np.arange(0, 5))
            rhs[0] = 0.0
        ab = np.zeros((2 * BW + 1, N), dtype=rows.dtype)
        for o in range(-BW, BW + 1):
            # ab[BW + i - col, col] = A[i, col], col = i + o
            i = np.arange(max(0, -o), min(N, N - o))
            ab[BW - o, i + o] = rows[i, o + BW]
        return solve_banded((BW, BW), ab, rhs)

    def apply(self, u, k=0.0):
        """Interior action of the discrete ``L_{j,k}`` (boundary rows as assembled)."""
        N, BW = self.N, self.BW
        k = complex(k)
        out = self.pot * u + (k.real**2 if k.imag == 0 else k**2) * u
        if self.one and self.j > 0:
            out[0] = 0.0
        for o in range(-BW, BW + 1):
            i = np.arange(max(0, -o), min(N, N - o))
            out[i] = out[i] + self.rows[i, o + BW] * u[i + o]
        return out

    def derivative(self, u):
        """Fourth-order ``du/dr`` on the grid."""
        h = self.grid.h
        rx = self.grid.dr_dxi
        N = self.N
        d = np.empty_like(u)
        d[2:-2] = (u[:-4] * _C1[0] + u[1:-3] * _C1[1] + u[3:-1] * _C1[3] + u[4:] * _C1[4]) / h
        for i in (0, 1, N - 2, N - 1):
            if i < 2:
                offs = np.arange(-i, 5 - i)
            else:
                offs = np.arange(-(4 - (N - 1 - i)), N - i)
            if self.one and i < 2:
                par = (-1.0) ** self.j
                offs = np.arange(-2, 3)
                vals = np.array([u[i + o] if i + o >= 0 else par * u[-(i + o)] for o in offs])
                d[i] = np.dot(_C1, vals) / h
                continue
            d[i] = np.dot(_one_sided(1, offs), u[i + offs]) / h
        return d / rx


def apply_resolvent(model: ModelManifold, j: int, k, v, grid: RadialGrid = None,
                    solver: BandedResolvent = None):
    """Solve ``L_{j,k} u = v`` for samples ``v`` on a radial grid.

    Returns ``(grid, u)``.  For real ``k > 0`` the result is real.
    """
    if solver is None:
        grid = grid or RadialGrid.build(model)
        solver = BandedResolvent(model, grid, j)
    v = np.asarray(v)
    if not np.any(v):
        return solver.grid, np.zeros(solver.N)
    u = solver.solve(k, v)
    if np.isrealobj(u) or np.all(np.imag(k) == 0):
        u = np.real(u)
    return solver.grid, u


def apply_resolvent_green(g: ModeGreen, r, nodes, v, weights):
    """Independent route: direct quadrature ``int u_j(r, s) v(s) f^{n-1} ds``.

    ``v`` and ``weights`` live on ``nodes``; ``weights`` must already contain
    ``f^{n-1}`` (see ``RadialGrid.weights``).
    Intended for smooth ``v`` and grids that resolve ``exp(-k|r-s|)``.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    nodes = np.asarray(nodes, dtype=float)
    out = np.empty((len(g.k), len(r)), dtype=complex)
    for i, ri in enumerate(r):
        out[:, i] = g(np.full_like(nodes, ri), nodes) @ (v * weights)
    return out
