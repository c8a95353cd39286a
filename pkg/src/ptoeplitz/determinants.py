"""Log-determinants, angular generating functions and a brute-force oracle."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import CertificationError, ValidationError
from .radial_measures import RadialMeasure
from .sections import FiniteSection, m_section
from .symbols import Symbol, exp_symbol, from_trig, scale

__all__ = [
    "LogDet",
    "log_det",
    "angular_mgf",
    "log_char",
    "quadrature_oracle",
    "fd_cumulant",
]


def _wrap(phase: float) -> float:
    w = math.remainder(phase, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class LogDet:
    log_abs: float
    phase: float

    @property
    def value(self) -> complex:
        if self.log_abs == -math.inf:
            return 0j
        return complex(math.exp(self.log_abs) * complex(math.cos(self.phase), math.sin(self.phase)))

    @property
    def log(self) -> complex:
        return complex(self.log_abs, self.phase)


def log_det(m) -> LogDet:
    """Determinant as (log modulus, phase) from an LU factorization."""
    a = m.data if isinstance(m, FiniteSection) else np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("log_det needs a square matrix")
    if a.shape[0] == 0:
        return LogDet(0.0, 0.0)
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    d = np.diag(lu)
    if np.any(d == 0):
        return LogDet(-math.inf, 0.0)
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    with np.errstate(divide="ignore"):
        log_abs = float(np.sum(np.log(np.abs(d))))
    phase = float(np.sum(np.angle(d))) + math.pi * (swaps % 2)
    return LogDet(log_abs, _wrap(phase))


def _require_real(f: Symbol):
    if not f.real:
        raise ValidationError("the statistic f must be a real-valued symbol")


def angular_mgf(measure: RadialMeasure, f: Symbol, lam: float, n: int, center: bool = False) -> LogDet:
    """``log E[exp(i lam X_{f,n})] = log det M_{mu,n}(exp(i lam f))``.

    With ``center=True`` the statistic uses ``f - f_0``.
    """
    _require_real(f)
    if lam == 0:
        return LogDet(0.0, 0.0)
    g = f - from_trig([(0, f.coeff(0))]) if center else f
    a = exp_symbol(scale(g, 1j * lam))
    return log_det(m_section(measure, a, n))


def log_char(measure, f, lam, n, center=False) -> complex:
    return angular_mgf(measure, f, lam, n, center).log


# ---------------------------------------------------------------------------
# brute-force oracle


def _radial_rule(measure: RadialMeasure, max_power: int, panels: int = 80, order: int = 20):
    """Nodes/log-weights for ``int g(r) dmu(r)`` with Gauss-Legendre panels.

    Finite supports use panels in r; unbounded ones use panels in ln r over
    the range where ``r^max_power dmu`` is not negligible.
    """
    lo, hi = measure.support
    x, w = np.polynomial.legendre.leggauss(order)
    if math.isfinite(hi):
        edges = np.linspace(lo, hi, panels + 1)
        a, b = edges[:-1, None], edges[1:, None]
        r = (a + (b - a) / 2 * (1 + x)).ravel()
        lw = np.log(((b - a) / 2 * w).ravel()) + measure.log_density(r)
        return r, lw
    t_lo = math.log(lo) if lo > 0 else -40.0
    scan = np.linspace(t_lo, 12.0, 8001)
    r = np.exp(scan)
    base = measure.log_density(r) + scan
    keep = np.zeros_like(scan, dtype=bool)
    for p in (0, max_power):
        g = base + p * scan
        keep |= g > np.max(g) - 80
    idx = np.nonzero(keep)[0]
    t0 = scan[max(idx[0] - 1, 0)] if lo == 0 else t_lo
    t1 = scan[min(idx[-1] + 1, scan.size - 1)]
    edges = np.linspace(t0, t1, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    t = (a + (b - a) / 2 * (1 + x)).ravel()
    r = np.exp(t)
    lw = np.log(((b - a) / 2 * w).ravel()) + measure.log_density(r) + t
    return r, lw


def _vandermonde_sq_terms(n):
    """Monomials of ``prod_{j<k} (z_k - z_j)(conj z_k - conj z_j)``.

    Returns a dict mapping ``(a_0..a_{n-1}, b_0..b_{n-1})`` exponent tuples of
    ``z`` and ``conj z`` to integer coefficients.
    """
    poly = {((0,) * n, (0,) * n): 1}
    for j, k in itertools.combinations(range(n), 2):
        for conj in (False, True):
            new = {}
            for (a, b), c in poly.items():
                for var, sign in ((k, 1), (j, -1)):
                    if conj:
                        key = (a, tuple(e + (i == var) for i, e in enumerate(b)))
                    else:
                        key = (tuple(e + (i == var) for i, e in enumerate(a)), b)
                    new[key] = new.get(key, 0) + sign * c
            poly = {key: c for key, c in new.items() if c}
    return poly


def quadrature_oracle(measure: RadialMeasure, phi: Symbol, n: int) -> complex:
    """``E[prod phi(arg z_j)]`` by direct integration, for n <= 3.

    The squared Vandermonde is multiplied out into monomials; angular
    integrals of a trigonometric polynomial against ``e^{i(a-b) theta}`` are
    exact coefficient reads, radial integrals use quadrature of the density.
    """
    if n not in (1, 2, 3):
        raise ValidationError("the oracle supports n in {1, 2, 3}")
    top = 4 * (n - 1)
    if measure.is_atomic:
        moments = np.ones(top + 1)
    else:
        r, lw = _radial_rule(measure, top)
        moments = np.array([np.exp(np.logaddexp.reduce(p * np.log(r) + lw)) for p in range(top + 1)])
    total = 0j
    for (a, b), c in _vandermonde_sq_terms(n).items():
        term = complex(c)
        for aj, bj in zip(a, b):
            # int phi(theta) e^{i (aj - bj) theta} dtheta / 2pi = phi_{bj - aj}
            term *= phi.coeff(bj - aj) * moments[aj + bj]
        total += term
    norm = math.factorial(n) * np.prod([moments[2 * k] for k in range(n)])
    return complex(total / norm)


# ---------------------------------------------------------------------------
# finite-difference cumulants

_BASE_STEP = {1: 0.02, 2: 0.05, 3: 0.1, 4: 0.2}


def _stencil(L, order, h):
    if order == 1:
        return (L(h) - L(-h)) / (2 * h)
    if order == 2:
        return (L(h) - 2 * L(0.0) + L(-h)) / h**2
    if order == 3:
        return (L(2 * h) - 2 * L(h) + 2 * L(-h) - L(-2 * h)) / (2 * h**3)
    return (L(2 * h) - 4 * L(h) + 6 * L(0.0) - 4 * L(-h) + L(-2 * h)) / h**4


def fd_cumulant(measure: RadialMeasure, f: Symbol, n: int, order: int, h: float | None = None, tol: float = 1e-4) -> float:
    """``c_m = (-i)^m d^m/dlam^m log E[e^{i lam X}]`` at 0 by central differences.

    Differences are taken for the centered statistic ``f - f_0``; ``n f_0``
    is added back to ``c_1``.  Two Richardson levels (steps h, h/2, h/4);
    the two last extrapolants must agree within ``tol``.
    """
    if order not in (1, 2, 3, 4):
        raise ValidationError("order must be 1..4")
    _require_real(f)
    h = _BASE_STEP[order] if h is None else float(h)
    cache = {}

    def L(lam):
        if lam not in cache:
            cache[lam] = log_char(measure, f, lam, n, center=True)
        return cache[lam]

    d = [_stencil(L, order, h / 2**i) for i in range(3)]
    r1 = [(4 * d[i + 1] - d[i]) / 3 for i in range(2)]
    r2 = (16 * r1[1] - r1[0]) / 15
    if abs(r2 - r1[1]) > tol * max(1.0, abs(r2)):
        raise CertificationError(f"cumulant order {order}: Richardson levels disagree ({abs(r2 - r1[1]):.2e})")
    val = ((-1j) ** order * r2).real
    if order == 1:
        val += n * f.coeff(0).real
    return float(val)
