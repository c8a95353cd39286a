"""Radial reference measures and their moment functions.

Every measure here is a positive measure ``mu`` on the half line; the planar
reference measure of the ensemble is ``dmu(r) dtheta``.  All moment
arithmetic is done in log space, so ``m_xi`` itself is never formed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, optimize, special
from scipy.interpolate import CubicSpline

from .errors import CertificationError, ValidationError

__all__ = [
    "Regularity",
    "RadialMeasure",
    "CUE",
    "Ginibre",
    "Bergman",
    "JacobiEdge",
    "GammaWeight",
    "LogStretch",
    "CustomMeasure",
    "MomentFit",
    "log_moment",
    "log_moment_dd",
    "rho",
    "rho_minus_one",
    "rho_matrix",
    "log_rho_band",
    "iota",
    "classify",
    "radial_power_sample",
    "measure_from_name",
]


@dataclass(frozen=True)
class Regularity:
    """Declared moment-condition class.

    ``kind`` is ``"C1"`` (``(ln m)'' = O(xi^-beta)``, beta > 1) or ``"C2"``
    (``(ln m)'' = h(xi) + O(xi^-rho_decay)`` with ``h = O(xi^-beta)``,
    ``h' = O(xi^-gamma)``, 1/2 < beta <= 1).  ``rho_decay`` is the exponent
    of the error term, unrelated to the matrix entries ``rho(j, k)``.
    """

    kind: str
    beta: float
    gamma: Optional[float] = None
    rho_decay: Optional[float] = None

    def __post_init__(self):
        if self.kind == "C1":
            if not self.beta > 1:
                raise ValidationError(f"C1 needs beta > 1, got {self.beta}")
        elif self.kind == "C2":
            if not 0.5 < self.beta <= 1:
                raise ValidationError(f"C2 needs 1/2 < beta <= 1, got {self.beta}")
            if self.gamma is None or self.rho_decay is None:
                raise ValidationError("C2 needs gamma and rho_decay")
            if not (self.gamma > 1 and self.rho_decay > 1):
                raise ValidationError("C2 needs gamma > 1 and rho_decay > 1")
        else:
            raise ValidationError(f"unknown regularity class {self.kind!r}")


def _as_xi(xi, strict=False):
    arr = np.asarray(xi, dtype=float)
    bad = arr <= 0 if strict else arr < 0
    if np.any(bad) or np.any(~np.isfinite(arr)):
        raise ValidationError(f"xi must be {'>' if strict else '>='} 0 and finite")
    return arr


def _scalar_or_array(arr, like):
    return float(np.asarray(arr).reshape(-1)[0]) if np.ndim(like) == 0 else arr


_TRIGAMMA_TAIL = (1.0, 0.5, 1 / 6, 0.0, -1 / 30, 0.0, 1 / 42, 0.0, -1 / 30, 0.0, 5 / 66)


def trigamma(z):
    """psi_1(z) for z > 0; asymptotic series above 20 (scipy below)."""
    z = np.asarray(z, dtype=float)
    big = z >= 20
    if np.all(big):
        w = 1.0 / z
        acc = np.zeros_like(z)
        for c in reversed(_TRIGAMMA_TAIL):
            acc = acc * w + c
        return acc * w
    out = np.empty_like(z)
    out[~big] = special.polygamma(1, z[~big])
    if np.any(big):
        out[big] = trigamma(z[big])
    return out


def _check_u(u):
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise ValidationError("quantile level u must lie in (0, 1)")
    return u


def _fd_second_derivative(func, xi):
    """Central second difference with one Richardson halving.

    Step is ``h = max(1e-3 xi, 1e-2)`` (capped at ``xi/2`` near zero).  The
    estimates at ``h`` and ``h/2`` must agree, else the step is rejected.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    h = np.minimum(np.maximum(1e-3 * xi, 1e-2), xi / 2)
    f0 = func(xi)

    def d2(step):
        return (func(xi + step) - 2 * f0 + func(xi - step)) / step**2

    coarse, fine = d2(h), d2(h / 2)
    scale = np.maximum(np.abs(fine), 1e-6)
    if np.any(np.abs(coarse - fine) > 1e-3 * scale):
        raise CertificationError(
            "finite-difference (ln m)'' failed the step-halving check"
        )
    return (4 * fine - coarse) / 3


class RadialMeasure:
    """Base class; subclasses supply ``_log_moment`` and friends.

    Instances are immutable and safe to share between threads.
    """

    name: str = "measure"
    regularity: Optional[Regularity] = None
    support: tuple = (0.0, math.inf)
    # alpha of the mean-measure law (ln m)'' = alpha/(xi+1) + integrable; None if not of that form
    mean_measure_alpha: Optional[float] = None
    is_atomic: bool = False

    # -- to override -------------------------------------------------
    def _log_moment(self, xi):
        raise NotImplementedError

    def _log_moment_dd(self, xi):
        return _fd_second_derivative(self._log_moment, xi)

    def _h(self, xi):
        return self._log_moment_dd(xi)

    def _iota(self, x):
        x = np.atleast_1d(x)
        out = [0.5 * integrate.quad(lambda t: float(self._h(t)), 1.0, xx, limit=200)[0] for xx in x]
        return np.asarray(out)

    def _quantile(self, k, u):
        raise NotImplementedError

    def log_density(self, r):
        """Log of the density of mu with respect to dr."""
        raise NotImplementedError

    # -- public -------------------------------------------------------
    def log_moment(self, xi):
        arr = _as_xi(xi)
        return _scalar_or_array(self._log_moment(arr), xi)

    def log_moment_dd(self, xi):
        arr = _as_xi(xi, strict=True)
        return _scalar_or_array(np.asarray(self._log_moment_dd(arr), dtype=float), xi)

    def h(self, xi):
        """Leading-order function ``h_mu`` of the (C2) expansion."""
        arr = _as_xi(xi, strict=True)
        return _scalar_or_array(np.asarray(self._h(arr), dtype=float), xi)

    def iota(self, x):
        if self.regularity is None or self.regularity.kind != "C2":
            raise ValidationError(f"iota is only defined for class C2 measures ({self.name})")
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 1):
            raise ValidationError("iota(x) needs x >= 1")
        return _scalar_or_array(np.asarray(self._iota(arr), dtype=float), x)

    def quantile(self, k, u):
        """u-quantile of ``r^{2k} dmu / m_{2k}``.

        Closed forms where available; otherwise piecewise-linear inversion of
        the quadrature CDF (accurate to roughly 1e-4 in probability).
        """
        if k < 0:
            raise ValidationError("k must be nonnegative")
        uu = _check_u(u)
        return _scalar_or_array(np.asarray(self._quantile(int(k), uu), dtype=float), u)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


@dataclass(frozen=True, repr=False)
class CUE(RadialMeasure):
    """Point mass at r = 1 (eigenvalues of Haar unitary matrices)."""

    name: str = "cue"
    regularity: Regularity = field(default=Regularity("C1", 2.0))
    support: tuple = (1.0, 1.0)
    mean_measure_alpha: float = 0.0
    is_atomic: bool = True

    def _log_moment(self, xi):
        return np.zeros_like(xi, dtype=float)

    def _log_moment_dd(self, xi):
        return np.zeros_like(xi, dtype=float)

    def _quantile(self, k, u):
        return np.ones_like(u)

    def log_density(self, r):
        raise ValidationError("the CUE measure is a point mass and has no density")


@dataclass(frozen=True, repr=False)
class Ginibre(RadialMeasure):
    """``dmu(r) = r exp(-r^2) dr``; ``m_xi = Gamma(xi/2 + 1)/2``."""

    name: str = "ginibre"
    regularity: Regularity = field(default=Regularity("C2", 1.0, 2.0, 2.0))
    mean_measure_alpha: float = 0.5

    def _log_moment(self, xi):
        return special.gammaln(xi / 2 + 1) - math.log(2.0)

    def _log_moment_dd(self, xi):
        return trigamma(xi / 2 + 1) / 4

    def _h(self, xi):
        return 1.0 / (2 * xi)

    def _iota(self, x):
        return np.log(x) / 4

    def _quantile(self, k, u):
        # R^2 ~ Gamma(k + 1)
        return np.sqrt(special.gammaincinv(k + 1, u))

    def log_density(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(r) - r**2


@dataclass(frozen=True, repr=False)
class Bergman(RadialMeasure):
    """Uniform measure on the unit disk: ``dmu(r) = r dr`` on [0, 1]."""

    name: str = "bergman"
    regularity: Regularity = field(default=Regularity("C1", 2.0))
    support: tuple = (0.0, 1.0)
    mean_measure_alpha: float = 0.0

    def _log_moment(self, xi):
        return -np.log(xi + 2)

    def _log_moment_dd(self, xi):
        return 1.0 / (xi + 2) ** 2

    def _quantile(self, k, u):
        # CDF r^(2k+2)
        return u ** (1.0 / (2 * k + 2))

    def log_density(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where((r >= 0) & (r <= 1), np.log(r), -np.inf)


@dataclass(frozen=True, repr=False)
class JacobiEdge(RadialMeasure):
    """``mu(r) = (1 - r)^(alpha - 1)`` on [0, 1]."""

    alpha: float = 1.0
    support: tuple = (0.0, 1.0)
    mean_measure_alpha: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValidationError("JacobiEdge needs alpha > 0")

    @property
    def name(self):
        return f"jacobi:{self.alpha:g}"

    @property
    def regularity(self):
        return Regularity("C1", 2.0)

    def _log_moment(self, xi):
        a = self.alpha
        return special.gammaln(xi + 1) - special.gammaln(xi + a + 1) + special.gammaln(a)

    def _log_moment_dd(self, xi):
        return trigamma(xi + 1) - trigamma(xi + self.alpha + 1)

    def _quantile(self, k, u):
        from scipy.stats import beta as beta_dist

        return beta_dist.ppf(u, 2 * k + 1, self.alpha)

    def log_density(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r >= 0) & (r < 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(inside, (self.alpha - 1) * np.log1p(-np.clip(r, 0, 1)), -np.inf)


@dataclass(frozen=True, repr=False)
class GammaWeight(RadialMeasure):
    """``mu(r) = r^p exp(-r^alpha)``; Ginibre is ``p = 1, alpha = 2``."""

    p: float = 1.0
    alpha: float = 2.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.p > -1):
            raise ValidationError("GammaWeight needs alpha > 0 and p > -1")

    @property
    def name(self):
        return f"gamma:{self.p:g},{self.alpha:g}"

    @property
    def regularity(self):
        return Regularity("C2", 1.0, 2.0, 2.0)

    @property
    def mean_measure_alpha(self):
        return 1.0 / self.alpha

    def _log_moment(self, xi):
        return special.gammaln((xi + self.p + 1) / self.alpha) - math.log(self.alpha)

    def _log_moment_dd(self, xi):
        return trigamma((xi + self.p + 1) / self.alpha) / self.alpha**2

    def _h(self, xi):
        return 1.0 / (self.alpha * xi)

    def _iota(self, x):
        return np.log(x) / (2 * self.alpha)

    def _quantile(self, k, u):
        shape = (self.p + 2 * k + 1) / self.alpha
        return special.gammaincinv(shape, u) ** (1.0 / self.alpha)

    def log_density(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.p * np.log(r) - r**self.alpha


def _gl_panels(edges, order):
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = (b - a) / 2
    nodes = (a + half * (1 + x)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


@dataclass(frozen=True, repr=False)
class LogStretch(RadialMeasure):
    """``dmu(r) = exp(-c (ln r)^q) dr / r`` on ``r >= 1``.

    With ``r = e^s`` the moments are exactly ``int_0^inf exp(xi s - c s^q) ds``,
    the log-stretched family in its most convenient coordinates.
    ``(ln m)''`` behaves like ``A xi^-beta`` with ``beta = (q - 2)/(q - 1)``
    and ``A = (c q)^(-1/(q-1)) / (q - 1)`` (Laplace method).
    """

    c: float = 1.0
    q: float = 4.0
    support: tuple = (1.0, math.inf)
    panels: int = 48
    order: int = 16

    def __post_init__(self):
        if not (self.c > 0 and self.q > 1):
            raise ValidationError("LogStretch needs c > 0 and q > 1")

    @property
    def name(self):
        return f"logstretch:{self.c:g},{self.q:g}"

    @property
    def beta(self):
        return (self.q - 2) / (self.q - 1)

    @property
    def amplitude(self):
        return (self.c * self.q) ** (-1.0 / (self.q - 1)) / (self.q - 1)

    @property
    def regularity(self):
        b = self.beta
        if 0.5 < b <= 1:
            return Regularity("C2", b, b + 1, (2 * self.q - 3) / (self.q - 1))
        return None

    def _exponent(self, s, xi):
        return xi * s - self.c * s**self.q

    def _window(self, xi, drop=60.0):
        c, q = self.c, self.q
        s_star = (xi / (c * q)) ** (1.0 / (q - 1)) if xi > 0 else 0.0
        top = self._exponent(s_star, xi)

        def g(s):
            return self._exponent(s, xi) - top + drop

        left = 0.0 if g(0.0) > 0 else optimize.brentq(g, 0.0, s_star, xtol=1e-14)
        hi = max(2 * s_star, 1.0)
        while g(hi) > 0:
            hi *= 2
        right = optimize.brentq(g, s_star, hi, xtol=1e-14)
        return left, right, top

    def _nodes(self, xi):
        left, right, top = self._window(xi)
        nodes, weights = _gl_panels(np.linspace(left, right, self.panels + 1), self.order)
        return nodes, weights, top

    def _log_moment(self, xi):
        out = np.empty(np.shape(xi))
        for idx, x in np.ndenumerate(np.asarray(xi, dtype=float)):
            s, w, top = self._nodes(x)
            vals = np.exp(self._exponent(s, x) - top)
            out[idx] = top + math.log(np.dot(vals, w))
        return out

    def _h(self, xi):
        return self.amplitude * xi ** (-self.beta)

    def _iota(self, x):
        b = self.beta
        return self.amplitude * (x ** (1 - b) - 1) / (2 * (1 - b)) if b < 1 else self.amplitude * np.log(x) / 2

    def _quantile(self, k, u):
        s, w, top = self._nodes(2.0 * k)
        dens = np.exp(self._exponent(s, 2.0 * k) - top) * w
        cdf = (np.cumsum(dens) - dens / 2) / np.sum(dens)
        return np.exp(np.interp(u, cdf, s))

    def log_density(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lr = np.log(r)
            return np.where(r >= 1, -self.c * np.abs(lr) ** self.q - lr, -np.inf)


@dataclass(eq=False, repr=False)
class CustomMeasure(RadialMeasure):
    """Measure given by density samples on a (log-spaced) radial grid.

    Moments use composite Gauss-Legendre panels in ``t = ln r`` between
    consecutive grid points, with the density interpolated by a cubic spline
    (of the log-density when the density is positive throughout).  Each
    moment is computed with ``order`` and ``2 order`` nodes per panel; the
    finer value is returned and a disagreement above 1e-8 is an error.
    """

    r: np.ndarray = None
    density: np.ndarray = None
    support_bounds: tuple = (0.0, math.inf)
    order: int = 8
    declared: Optional[Regularity] = None
    label: str = "custom"

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        d = np.asarray(self.density, dtype=float)
        if r.ndim != 1 or r.shape != d.shape or r.size < 4:
            raise ValidationError("custom measure needs matching 1-d r/density arrays of length >= 4")
        if np.any(np.diff(r) <= 0) or r[0] <= 0:
            raise ValidationError("custom grid must be strictly increasing and positive")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValidationError("custom density must be finite and nonnegative")
        lo, hi = self.support_bounds
        if r[0] < lo * (1 - 1e-12) or (math.isfinite(hi) and r[-1] > hi * (1 + 1e-12)):
            raise ValidationError("custom grid extends outside the declared support")
        if (lo > 0 and r[0] > lo * (1 + 1e-9)) or (math.isfinite(hi) and r[-1] < hi * (1 - 1e-9)):
            raise ValidationError("custom grid does not cover the declared support")
        self.r, self.density = r, d
        self.name = self.label
        self.regularity = self.declared
        self.support = (lo, hi)
        t = np.log(r)
        self._rules = {}
        for order in (self.order, 2 * self.order):
            nodes, weights = _gl_panels(t, order)
            if np.all(d > 0):
                logd = CubicSpline(t, np.log(d))(nodes)
            else:
                with np.errstate(divide="ignore"):
                    logd = np.log(np.clip(CubicSpline(t, d)(nodes), 0, None))
            # integrand in t: r^xi * density(r) * r
            self._rules[order] = (nodes, logd + nodes + np.log(weights))

    @classmethod
    def from_files(cls, csv_path, config_path=None):
        """Read ``r,density`` CSV plus an optional JSON sidecar.

        The sidecar may hold ``support`` ([lo, hi], ``null`` for infinity),
        ``order`` and ``name``.
        """
        rows = []
        with open(csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["r", "density"]:
                raise ValidationError("custom measure CSV must have header 'r,density'")
            for row in reader:
                rows.append((float(row["r"]), float(row["density"])))
        conf = {}
        if config_path is not None:
            conf = json.loads(Path(config_path).read_text())
        arr = np.array(rows)
        lo, hi = conf.get("support", [0.0, None])
        hi = math.inf if hi is None else float(hi)
        return cls(
            r=arr[:, 0],
            density=arr[:, 1],
            support_bounds=(float(lo), hi),
            order=int(conf.get("order", 8)),
            label=conf.get("name", Path(csv_path).stem),
        )

    def _log_moment_rule(self, xi, order):
        nodes, logw = self._rules[order]
        xi = np.atleast_1d(xi)
        return special.logsumexp(xi[:, None] * nodes[None, :] + logw[None, :], axis=1)

    def _log_moment(self, xi):
        shape = np.shape(xi)
        flat = np.ravel(xi)
        base = self._log_moment_rule(flat, self.order)
        fine = self._log_moment_rule(flat, 2 * self.order)
        if np.any(np.abs(fine - base) > 1e-8):
            raise CertificationError("custom-measure quadrature rules disagree; refine the grid")
        return fine.reshape(shape)

    def _quantile(self, k, u):
        nodes, logw = self._rules[2 * self.order]
        logp = 2 * k * nodes + logw
        p = np.exp(logp - logp.max())
        cdf = (np.cumsum(p) - p / 2) / np.sum(p)
        return np.exp(np.interp(u, cdf, nodes))

    def log_density(self, r):
        r = np.asarray(r, dtype=float)
        dens = np.interp(r, self.r, self.density, left=0.0, right=0.0)
        with np.errstate(divide="ignore"):
            return np.log(dens)


# ---------------------------------------------------------------------------
# module-level operations


def log_moment(measure: RadialMeasure, xi):
    """``ln m_xi`` for ``xi >= 0`` (vectorized)."""
    return measure.log_moment(xi)


def log_moment_dd(measure: RadialMeasure, xi):
    """``(ln m_xi)''`` for ``xi > 0``."""
    return measure.log_moment_dd(xi)


def iota(measure: RadialMeasure, x):
    """``iota_mu(x) = 1/2 int_1^x h_mu``; class C2 only."""
    return measure.iota(x)


def radial_power_sample(measure: RadialMeasure, k: int, u):
    """u-quantile of the density ``r^(2k) dmu(r) / m_2k``."""
    return measure.quantile(k, u)


def _log_rho(measure, j, k):
    j = np.asarray(j)
    k = np.asarray(k)
    lj = measure.log_moment(2.0 * j)
    lk = measure.log_moment(2.0 * k)
    ljk = measure.log_moment(1.0 * (j + k))
    return ljk - (lj + lk) / 2


def rho(measure: RadialMeasure, j, k):
    """``m_{j+k} / sqrt(m_2j m_2k)`` assembled from three log-moments.

    Symmetric and equal to one on the diagonal exactly.
    """
    if np.any(np.asarray(j) < 0) or np.any(np.asarray(k) < 0):
        raise ValidationError("rho indices must be nonnegative")
    lo, hi = np.minimum(j, k), np.maximum(j, k)
    out = np.where(lo == hi, 1.0, np.exp(_log_rho(measure, lo, hi)))
    return float(out) if out.ndim == 0 else out


def rho_minus_one(measure: RadialMeasure, j, k):
    """``rho(j, k) - 1`` without cancellation (via expm1)."""
    lo, hi = np.minimum(j, k), np.maximum(j, k)
    out = np.where(lo == hi, 0.0, np.expm1(_log_rho(measure, lo, hi)))
    return float(out) if out.ndim == 0 else out


_GL8 = np.polynomial.legendre.leggauss(8)


def log_rho_band(measure: RadialMeasure, k, m: int):
    """``ln rho(k + m, k)`` for an array of k >= 0 and fixed m >= 0.

    For large indices the three-log-moment difference cancels badly, so
    when ``x = 2k + m`` exceeds ``64 m`` the second difference is written as
    ``-1/2 int_{-m}^{m} (m - |t|) (ln m)''(x + t) dt`` and integrated by
    Gauss-Legendre (measures with a closed-form ``(ln m)''`` only).
    """
    k = np.asarray(k, dtype=float)
    m = int(abs(m))
    if m == 0:
        return np.zeros_like(k)
    x = 2 * k + m
    out = np.empty_like(k)
    far = x >= 64 * m
    closed = type(measure)._log_moment_dd is not RadialMeasure._log_moment_dd
    if not closed:
        far[:] = False
    near = ~far
    if np.any(near):
        kn = k[near]
        lm = measure.log_moment
        out[near] = lm(2 * kn + m) - (lm(2 * kn + 2 * m) + lm(2 * kn)) / 2
    if np.any(far):
        nodes, weights = _GL8
        # t in [0, m]: weight (m - t), symmetric pair x +- t
        t = m * (1 + nodes) / 2
        w = weights * m / 2 * (m - t)
        xf = x[far][:, None]
        dd = measure._log_moment_dd(xf + t) + measure._log_moment_dd(xf - t)
        out[far] = -0.5 * (dd @ w)
    return out


@lru_cache(maxsize=64)
def _rho_matrix_cached(measure, n):
    lm = measure.log_moment(np.arange(2 * n - 1, dtype=float))
    idx = np.arange(n)
    diag = lm[2 * idx]
    logr = lm[idx[:, None] + idx[None, :]] - (diag[:, None] + diag[None, :]) / 2
    logr[idx, idx] = 0.0
    out = np.exp(logr)
    out.setflags(write=False)
    return out


def rho_matrix(measure: RadialMeasure, n: int) -> np.ndarray:
    """The n x n matrix ``(rho(j, k))``; cached and read-only."""
    return _rho_matrix_cached(measure, int(n))


@dataclass(frozen=True)
class MomentFit:
    alpha: float
    beta: float
    residual: float


def classify(measure: RadialMeasure, xi_grid: Sequence[float], corrections: int = 2) -> MomentFit:
    """Fit ``(ln m_xi)'' ~ alpha xi^-beta`` by log-log least squares.

    The regression carries ``corrections`` extra columns ``xi^-1, xi^-2, ...``
    so the subleading terms of the expansion do not bias alpha and beta on
    moderate grids.  ``residual`` is the max relative misfit of the full model.
    A vanishing second derivative (CUE) gives ``beta = inf, alpha = 0``.
    """
    xi = np.asarray(xi_grid, dtype=float)
    if xi.ndim != 1 or xi.size < 4 or np.any(xi <= 0) or np.any(np.diff(xi) <= 0):
        raise ValidationError("grid must be strictly increasing, positive, length >= 4")
    if xi.size < 2 + corrections + 1:
        corrections = max(0, xi.size - 3)
    y = np.asarray(measure.log_moment_dd(xi), dtype=float)
    if np.all(np.abs(y) < 1e-300):
        return MomentFit(0.0, math.inf, 0.0)
    if np.any(y <= 0):
        raise CertificationError("(ln m)'' is not positive on the grid; cannot fit a power law")
    cols = [np.ones_like(xi), -np.log(xi)] + [xi ** (-p) for p in range(1, corrections + 1)]
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design, np.log(y), rcond=None)
    fitted = np.exp(design @ coef)
    resid = float(np.max(np.abs(fitted - y) / y))
    return MomentFit(float(math.exp(coef[0])), float(coef[1]), resid)


_REGISTRY = {
    "cue": lambda: CUE(),
    "ginibre": lambda: Ginibre(),
    "bergman": lambda: Bergman(),
}


def measure_from_name(name: str) -> RadialMeasure:
    """Parse ``cue``, ``ginibre``, ``bergman``, ``jacobi:A``, ``gamma:P,A``,
    ``logstretch:C,Q`` or a path to a custom-measure JSON sidecar."""
    key = name.strip()
    low = key.lower()
    if low in _REGISTRY:
        return _REGISTRY[low]()
    head, _, args = low.partition(":")
    try:
        nums = [float(v) for v in args.split(",")] if args else []
        if head == "jacobi" and len(nums) == 1:
            return JacobiEdge(alpha=nums[0])
        if head == "gamma" and len(nums) == 2:
            return GammaWeight(p=nums[0], alpha=nums[1])
        if head == "logstretch" and len(nums) == 2:
            return LogStretch(c=nums[0], q=nums[1])
    except ValueError as exc:
        raise ValidationError(f"bad measure parameters in {name!r}") from exc
    path = Path(key)
    if path.suffix == ".json" and path.exists():
        conf = json.loads(path.read_text())
        csv_path = Path(conf["csv"])
        if not csv_path.is_absolute():
            csv_path = path.parent / csv_path
        return CustomMeasure.from_files(csv_path, path)
    raise ValidationError(f"unknown measure {name!r}")
