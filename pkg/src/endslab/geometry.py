"""Rotationally symmetric model manifolds with exact Euclidean ends.

The metric is ``dr^2 + f(r)^2 g_{S^{n-1}}`` with a warp profile ``f`` that is
exactly linear outside the neck ``|r| <= R``.  Two-end models live on the
whole line, one-end models on ``r >= 0`` with ``f(r) = r`` (flat space).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import integrate
from scipy.special import gammaln

Ends = Literal["one", "two"]


def sphere_volume(n: int) -> float:
    """Volume of the unit sphere ``S^{n-1}`` in ``R^n``."""
    return float(2.0 * np.exp(0.5 * n * np.log(np.pi) - gammaln(0.5 * n)))


@dataclass(frozen=True)
class WarpProfile:
    """Warp function ``f`` of the model metric.

    On ``[-R, R]`` the profile is the degree-6 polynomial fixed by
    ``f(0) = a`` and C^2 matching to ``r - c_plus`` at ``R`` and to
    ``-r - c_minus`` at ``-R``.
    """

    neck_radius: float = 1.0
    neck_min: float = 0.5
    c_plus: float = 0.0
    c_minus: float = 0.0
    ends: Ends = "two"
    coeffs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.ends == "one":
            object.__setattr__(self, "coeffs", np.array([0.0, 1.0]))
            return
        R, a = float(self.neck_radius), float(self.neck_min)
        if R <= 0 or a <= 0:
            raise ValueError("neck_radius and neck_min must be positive")
        if R - self.c_plus <= 0 or R - self.c_minus <= 0:
            raise ValueError("end offsets must satisfy c < R")
        # rows: f(R), f'(R), f''(R), f(-R), f'(-R), f''(-R), f(0)
        p = np.arange(7)
        rows = []
        for s in (R, -R):
            rows.append(s**p)
            rows.append(np.where(p >= 1, p * s ** np.maximum(p - 1, 0), 0.0))
            rows.append(np.where(p >= 2, p * (p - 1) * s ** np.maximum(p - 2, 0), 0.0))
        rows.append((p == 0).astype(float))
        rhs = [R - self.c_plus, 1.0, 0.0, R - self.c_minus, -1.0, 0.0, a]
        c = np.linalg.solve(np.array(rows, dtype=float), np.array(rhs))
        object.__setattr__(self, "coeffs", c)
        rr = np.linspace(-R, R, 4001)
        fmin = np.polynomial.polynomial.polyval(rr, c).min()
        if fmin < 0.5 * a:
            raise ValueError(f"neck profile dips to {fmin:.3g} < neck_min/2")

    def __call__(self, r, deriv: int = 0):
        r = np.asarray(r, dtype=float)
        R = self.neck_radius
        if self.ends == "one":
            return [r, np.ones_like(r), np.zeros_like(r)][deriv]
        P = np.polynomial.polynomial
        c = self.coeffs
        for _ in range(deriv):
            c = P.polyder(c)
        inner = P.polyval(r, c)
        if deriv == 0:
            plus, minus = r - self.c_plus, -r - self.c_minus
        elif deriv == 1:
            plus, minus = np.ones_like(r), -np.ones_like(r)
        else:
            plus = minus = np.zeros_like(r)
        return np.where(r >= R, plus, np.where(r <= -R, minus, inner))


@dataclass(frozen=True)
class ModelManifold:
    """Model manifold: dimension, warp profile and truncation radius."""

    dimension: int = 3
    profile: WarpProfile = field(default_factory=WarpProfile)
    r_max: float = 400.0

    def __post_init__(self):
        if self.dimension < 3:
            raise ValueError("dimension must be >= 3")
        R = self.profile.neck_radius if self.profile.ends == "two" else 0.0
        if self.r_max <= 10 * max(R, 0.1):
            raise ValueError("r_max must exceed 10 * neck_radius")

    @property
    def n(self) -> int:
        return self.dimension

    @property
    def ends(self) -> Ends:
        return self.profile.ends

    @property
    def neck_radius(self) -> float:
        return self.profile.neck_radius if self.ends == "two" else 0.0

    @property
    def r_min(self) -> float:
        return -self.r_max if self.ends == "two" else 0.0

    @classmethod
    def two_end(cls, n=3, neck_radius=1.0, neck_min=0.5, c_plus=0.0, c_minus=0.0, r_max=400.0):
        prof = WarpProfile(neck_radius, neck_min, c_plus, c_minus, "two")
        return cls(n, prof, r_max)

    @classmethod
    def flat(cls, n=3, r_max=400.0):
        return cls(n, WarpProfile(ends="one"), r_max)

    @classmethod
    def from_config(cls, cfg: dict) -> "ModelManifold":
        """Build from config keys ``dimension, ends, neck_radius, neck_min,
        end_offsets, r_max``; ``end_offsets`` is ``"c_plus,c_minus"``."""
        n = int(cfg.get("dimension", 3))
        r_max = float(cfg.get("r_max", 400.0))
        if cfg.get("ends", "two") == "one":
            return cls.flat(n, r_max)
        offs = cfg.get("end_offsets", "0,0")
        if isinstance(offs, str):
            offs = [float(s) for s in offs.replace(" ", "").split(",")]
        cp, cm = (offs[0], offs[1]) if len(offs) > 1 else (offs[0], offs[0])
        return cls.two_end(n, float(cfg.get("neck_radius", 1.0)),
                           float(cfg.get("neck_min", 0.5)), cp, cm, r_max)

    def end_coordinate(self, r):
        """Euclidean radius ``|z|`` on the exact end containing ``r``."""
        r = np.asarray(r, dtype=float)
        if self.ends == "one":
            return np.abs(r)
        return np.where(r >= 0, r - self.profile.c_plus, -r - self.profile.c_minus)

    def in_exact_region(self, r) -> np.ndarray:
        return np.abs(np.asarray(r, dtype=float)) >= self.neck_radius


@dataclass(frozen=True)
class PointM:
    """Point ``(r, omega)``; ``r`` is the signed radial coordinate."""

    r: float
    omega: tuple

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        if abs(np.linalg.norm(w) - 1.0) > 1e-12:
            raise ValueError("omega must be a unit vector")
        object.__setattr__(self, "omega", tuple(float(x) for x in w))

    @classmethod
    def on_axis(cls, r: float, n: int = 3, sign: int = 1) -> "PointM":
        w = np.zeros(n)
        w[0] = sign
        return cls(float(r), tuple(w))

    def cos_angle(self, other: "PointM") -> float:
        c = float(np.dot(self.omega, other.omega))
        return min(1.0, max(-1.0, c))


def warp_eval(model: ModelManifold, r):
    """Return ``(f, f', f'')`` at ``r``; exact linear values outside the neck."""
    ra = np.asarray(r, dtype=float)
    if np.any(ra > model.r_max + 1e-12) or np.any(ra < model.r_min - 1e-12):
        raise ValueError("r outside [r_min, r_max]")
    p = model.profile
    return p(ra, 0), p(ra, 1), p(ra, 2)


def volume_ball(model: ModelManifold, center: float, radius: float) -> float:
    """Volume of the radial ball ``{|r - center| <= radius}``.

    Uses the volume element ``f^{n-1} dr`` times ``vol(S^{n-1})``; the parts on
    the exact ends are integrated in closed form.
    """
    if radius <= 0:
        return 0.0
    n = model.n
    lo, hi = center - radius, center + radius
    if model.ends == "one":
        lo = max(lo, 0.0)
        if hi <= lo:
            return 0.0
        return sphere_volume(n) * (hi**n - lo**n) / n
    p = model.profile
    R = p.neck_radius
    total = 0.0
    # + end: (r - c+)^{n-1}
    a, b = max(lo, R), hi
    if b > a:
        total += ((b - p.c_plus) ** n - (a - p.c_plus) ** n) / n
    # - end: (-r - c-)^{n-1}
    a, b = lo, min(hi, -R)
    if b > a:
        total += ((-a - p.c_minus) ** n - (-b - p.c_minus) ** n) / n
    a, b = max(lo, -R), min(hi, R)
    if b > a:
        total += integrate.quad(lambda s: float(p(s)) ** (n - 1), a, b,
                                epsabs=0, epsrel=1e-13, limit=200)[0]
    return sphere_volume(n) * total


def one_form_norm(model: ModelManifold, radial_part, angular_part_norm, r):
    """Metric norm ``sqrt(a_r^2 + |a_theta|^2 / f(r)^2)`` of a one-form."""
    f = model.profile(np.asarray(r, dtype=float))
    if np.any(f <= 0):
        raise ValueError("warp not positive at r")
    return np.sqrt(np.abs(radial_part) ** 2 + (np.abs(angular_part_norm) / f) ** 2)


def volume_growth(model: ModelManifold, center: float = 0.0, rho_list=None):
    """Volume of radial balls on ``[1, r_max/2]`` with the fitted log-log slope.

    Returns an ``ExperimentReport`` whose ``fits['slope']`` carries the fit and
    whose rows hold ``vol / rho^n`` (bounded above and below for Euclidean ends).
    """
    from .report import ExperimentReport, fit_loglog

    n = model.n
    if rho_list is None:
        rho_list = np.geomspace(1.0, model.r_max / 2, 25)
    rows = []
    for rho in rho_list:
        v = volume_ball(model, center, float(rho))
        rows.append(dict(rho=float(rho), volume=v, ratio=v / rho**n))
    rep = ExperimentReport("volume-growth", rows)
    rep.fits["slope"] = fit_loglog([r["rho"] for r in rows], [r["volume"] for r in rows])
    ratios = [r["ratio"] for r in rows]
    rep.fits["bounds"] = dict(c_lower=min(ratios), c_upper=max(ratios))
    return rep
