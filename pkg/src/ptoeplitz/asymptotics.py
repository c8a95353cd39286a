"""Limit constants and trace asymptotics for moment-perturbed Toeplitz determinants.

Notation: for symbols ``a, b`` the trace ``t_n(b, a) = trace P_n T(b) K(a) P_n``
and its regularized limits.  Everything is done in log space where a
determinant is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .determinants import log_det
from .errors import CertificationError, ValidationError
from .radial_measures import RadialMeasure, log_rho_band, rho_matrix
from .sections import kozak_inverse_section, m_section
from .symbols import Symbol, invert_symbol, log_symbol

__all__ = [
    "SzegoReport",
    "g_constant",
    "omega_pair",
    "omega_functional",
    "trace_section",
    "tau",
    "parity_sums",
    "parity_constants",
    "p_delta",
    "c_mu",
    "e_constant",
    "h_constant",
    "f_constant",
    "szego_sweep",
]


def _require_class(measure, kind):
    reg = measure.regularity
    if reg is None or reg.kind != kind:
        raise ValidationError(f"{measure.name} is not declared class {kind}")


def g_constant(a: Symbol, route: str = "log_mean") -> complex:
    """``G[a] = exp((log a)_0)``, or the (0,0) entry of ``T(a^-1)^-1``."""
    if route == "log_mean":
        return complex(np.exp(log_symbol(a).coeff(0)))
    if route == "kozak":
        return complex(kozak_inverse_section(a, 1).data[0, 0])
    raise ValidationError(f"unknown route {route!r}")


def omega_pair(a: Symbol, b: Symbol) -> complex:
    """``Omega(a, b) = -1/2 sum_m m^2 a_m b_{-m}``."""
    W = min(a.N, b.N)
    m = np.arange(-W, W + 1)
    return complex(-0.5 * np.sum(m**2 * a.coeff(m) * b.coeff(-m)))


def omega_functional(a: Symbol) -> complex:
    """``Omega[a] = 1/2 sum_k k^2 (log a)_k (log a)_{-k}``."""
    la = log_symbol(a)
    return -omega_pair(la, la)


# ---------------------------------------------------------------------------
# diagonal band sums


def _pair_weights(b: Symbol, a: Symbol, tol=1e-18):
    """Nonzero products ``b_{-m} a_m`` for m != 0, keyed by m."""
    W = min(a.N, b.N)
    m = np.arange(-W, W + 1)
    w = b.coeff(-m) * a.coeff(m)
    top = np.max(np.abs(w)) if w.size else 0.0
    keep = (m != 0) & (np.abs(w) > tol * max(top, 1e-300))
    return dict(zip(m[keep].tolist(), w[keep].tolist()))


def _band_terms(measure, m, k0, k1):
    """``rho(k + |m|, k) - 1`` for ``k0 <= k < k1``."""
    k = np.arange(k0, k1, dtype=float)
    return np.expm1(log_rho_band(measure, k, abs(m)))


def trace_section(measure: RadialMeasure, b: Symbol, a: Symbol, n: int) -> complex:
    """``sum_{j >= 0} sum_{k < n} b_{k-j} a_{j-k} (rho(j, k) - 1)``, exactly."""
    if n < 1:
        raise ValidationError("n must be positive")
    if measure.is_atomic:
        return 0j
    total = 0j
    for m, w in _pair_weights(b, a).items():
        # j = k + m; for m < 0 the row index starts at |m|
        count = n if m > 0 else n - abs(m)
        if count > 0:
            total += w * math.fsum(_band_terms(measure, m, 0, count))
    return complex(total)


def _accelerated_series(chunk, tol, k_start=1024, k_cap=1 << 24, what="series"):
    """Sum ``sum_k t_k`` given ``chunk(k0, k1)`` returning partial sums.

    Partial sums at doubling cutoffs are Aitken-accelerated; the series is
    certified when two successive accelerated values agree within ``tol``.
    Increment ratios above 0.9 signal divergence.
    """
    K = k_start
    partial = [chunk(0, K)]
    acc = []
    while K < k_cap:
        partial.append(partial[-1] + chunk(K, 2 * K))
        K *= 2
        if len(partial) >= 3:
            s0, s1, s2 = partial[-3:]
            d1, d2 = s1 - s0, s2 - s1
            if abs(d2) < 1e-300:
                return s2, K
            ratio = abs(d2 / d1) if abs(d1) > 0 else 0.0
            if K >= 1 << 14 and ratio > 0.9:
                raise CertificationError(f"{what} does not converge (increment ratio {ratio:.3f})")
            denom = d2 - d1
            acc.append(s2 - d2 * d2 / denom if abs(denom) > 1e-300 else s2)
            if len(acc) >= 2 and abs(acc[-1] - acc[-2]) < tol:
                return acc[-1], K
    raise CertificationError(f"{what} not certified up to K={k_cap}")


def tau(measure: RadialMeasure, a: Symbol, b: Symbol, tol: float = 1e-9) -> complex:
    """``sum_{j,k >= 0} b_{k-j} a_{j-k} (rho(j, k) - 1)`` for class C1 measures."""
    _require_class(measure, "C1")
    if measure.is_atomic:
        return 0j
    weights = _pair_weights(b, a)
    if not weights:
        return 0j

    def chunk(k0, k1):
        return complex(sum(w * math.fsum(_band_terms(measure, m, k0, k1)) for m, w in weights.items()))

    val, _ = _accelerated_series(chunk, tol, what="tau series")
    return complex(val)


# ---------------------------------------------------------------------------
# parity sums


def parity_sums(measure: RadialMeasure, x: float):
    """``(s+, s-)``: sums of ``h(l)`` over even / odd ``1 <= l <= x``."""
    _require_class(measure, "C2")
    top = int(math.floor(x))
    if top < 1:
        return 0.0, 0.0
    even = np.arange(2, top + 1, 2, dtype=float)
    odd = np.arange(1, top + 1, 2, dtype=float)
    s_plus = math.fsum(measure.h(even)) if even.size else 0.0
    s_minus = math.fsum(measure.h(odd))
    return s_plus, s_minus


def parity_constants(measure: RadialMeasure, x: float = 1e6, tol: float = 1e-6):
    """``C_+-`` in ``s+-(x) = iota(x) + C_+- + o(1)``.

    Evaluated at ``x`` and ``2x``; the two must agree within ``tol`` and the
    returned value is the first-order Richardson combination.
    """
    _require_class(measure, "C2")
    out = []
    for xx in (x, 2 * x):
        sp, sm = parity_sums(measure, xx)
        io = measure.iota(xx)
        out.append((sp - io, sm - io))
    (p1, m1), (p2, m2) = out
    if max(abs(p2 - p1), abs(m2 - m1)) > tol:
        raise CertificationError("parity constants unstable under doubling")
    return 2 * p2 - p1, 2 * m2 - m1


def p_delta(measure: RadialMeasure, n: int, m: int, delta: float) -> float:
    """``sum h(l)`` over ``2|m|^delta < l <= 2n`` with ``l = m mod 2``."""
    if delta < 1:
        raise ValidationError("delta must be >= 1")
    _require_class(measure, "C2")
    lo = 2 * abs(m) ** delta
    start = int(math.floor(lo)) + 1
    if (start - m) % 2:
        start += 1
    if start > 2 * n:
        return 0.0
    ell = np.arange(start, 2 * n + 1, 2, dtype=float)
    return math.fsum(measure.h(ell))


# ---------------------------------------------------------------------------
# additive constant C_mu(a, b)


def _residual_sweep(measure, a, b, j_min=8, j_max=16):
    """``r(n) = t_n(b, a) - Omega(a, b) iota(2n)`` at ``n = 2^j``."""
    weights = _pair_weights(b, a)
    om = omega_pair(a, b)
    n_max = 1 << j_max
    cums = {m: np.cumsum(_band_terms(measure, m, 0, n_max)) for m in weights}
    rows = []
    for j in range(j_min, j_max + 1):
        n = 1 << j
        t = sum(w * cums[m][(n if m > 0 else n - abs(m)) - 1] for m, w in weights.items())
        rows.append((n, complex(t) - om * measure.iota(2 * n)))
    return rows


def c_mu(measure: RadialMeasure, a: Symbol, b: Symbol, method: str = "residual", tol: float = 1e-8) -> complex:
    """Constant ``C_mu(a, b)`` in ``t_n(b, a) = Omega(a, b) iota(2n) + C_mu + o(1)``.

    ``residual``: the o(1) remainder is extrapolated away (Richardson in 1/n
    over doublings).  ``series``: an independent expansion through the
    parity constants, summing ``rho - 1 + m^2 h / 2`` along each diagonal.
    """
    _require_class(measure, "C2")
    if method == "residual":
        rows = _residual_sweep(measure, a, b)
        r = [v for _, v in rows]
        rich = [2 * r[i + 1] - r[i] for i in range(len(r) - 1)]
        if abs(rich[-1] - rich[-2]) > tol:
            raise CertificationError(f"C_mu residual not stabilized ({abs(rich[-1] - rich[-2]):.2e})")
        return complex(rich[-1])
    if method != "series":
        raise ValidationError(f"unknown method {method!r}")
    weights = _pair_weights(b, a)
    c_plus, c_minus = parity_constants(measure)

    def chunk(k0, k1):
        k = np.arange(k0, k1, dtype=float)
        tot = 0j
        for m, w in weights.items():
            mm = abs(m)
            terms = _band_terms(measure, m, k0, k1) + mm**2 / 2 * measure.h(2 * k + mm)
            tot += w * math.fsum(terms)
        return tot

    s1, _ = _accelerated_series(chunk, 1e-10, what="C_mu series")
    corr = 0j
    for m, w in weights.items():
        mm = abs(m)
        c_par = c_plus if mm % 2 == 0 else c_minus
        s_even, s_odd = parity_sums(measure, mm - 1) if mm > 1 else (0.0, 0.0)
        s_par = s_even if mm % 2 == 0 else s_odd
        corr += mm**2 * w * (c_par - s_par)
    return complex(s1 - 0.5 * corr)


# ---------------------------------------------------------------------------
# operator determinants on truncated sections


def _inner_width(ainv: Symbol, tol=1e-17):
    return ainv.trimmed(tol * float(np.max(np.abs(ainv.coeffs)))).N


def _tmat(s: Symbol, rows: int, cols: int) -> np.ndarray:
    span = rows + cols
    c = s.window(span)
    j = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    return c[span + j - k]


def _products(measure, a, ainv, N):
    """``P_N T(a^-1) M(a) P_N`` and ``P_N T(a^-1) K(a) P_N``."""
    L = N + _inner_width(ainv)
    left = _tmat(ainv, N, L)
    ta = _tmat(a, L, N)
    ma = ta * rho_matrix(measure, L)[:, :N]
    return left @ ma, left @ (ma - ta)


def _richardson_levels(logs, tol, what):
    """Two-level Richardson table in 1/N for values at N, 2N, 4N, 8N."""
    r1 = [2 * logs[i + 1] - logs[i] for i in range(len(logs) - 1)]
    r2 = [(4 * r1[i + 1] - r1[i]) / 3 for i in range(len(r1) - 1)]
    if abs(r2[-1] - r2[-2]) > tol:
        raise CertificationError(f"{what} truncation not certified ({abs(r2[-1] - r2[-2]):.2e})")
    return r2[-1]


def _levels(N_trunc):
    if N_trunc < 16:
        raise ValidationError("N_trunc must be at least 16")
    return [N_trunc // 8, N_trunc // 4, N_trunc // 2, N_trunc]


def e_constant(measure: RadialMeasure, a: Symbol, N_trunc: int = 256, tol: float = 1e-6) -> complex:
    """``E[a] = det T(a^-1) M(a)`` for class C1 measures.

    The truncated determinants converge like 1/N; they are evaluated at
    ``N/8 .. N`` and Richardson-extrapolated, the last two second-level
    extrapolants certifying the result to ``tol`` (relative).
    """
    _require_class(measure, "C1")
    ainv = invert_symbol(a)
    logs = [log_det(_products(measure, a, ainv, N)[0]).log for N in _levels(N_trunc)]
    return complex(np.exp(_richardson_levels(logs, tol, "E[a]")))


def h_constant(measure: RadialMeasure, a: Symbol, N_trunc: int = 256, tol: float = 1e-6) -> complex:
    """``H[a] = det(T(a^-1) M(a) exp(-T(a^-1) K(a)))`` on truncated sections."""
    ainv = invert_symbol(a)
    logs = []
    for N in _levels(N_trunc):
        x, y = _products(measure, a, ainv, N)
        logs.append(log_det(x @ expm(-y)).log)
    return complex(np.exp(_richardson_levels(logs, tol, "H[a]")))


def f_constant(measure: RadialMeasure, a: Symbol, N_trunc: int = 256, tol: float = 1e-6) -> complex:
    """``F[a] = exp(C_mu(a, a^-1)) H[a]`` for class C2 measures."""
    _require_class(measure, "C2")
    c = c_mu(measure, a, invert_symbol(a))
    return complex(np.exp(c) * h_constant(measure, a, N_trunc, tol))


# ---------------------------------------------------------------------------
# Szego-type ratio sweeps


@dataclass
class SzegoReport:
    n_grid: list
    ratios: list
    log_ratios: list
    extrapolated_limit: complex
    mode: str
    diagnostics: dict = field(default_factory=dict)


def _aitken(x0, x1, x2):
    d1, d2 = x1 - x0, x2 - x1
    denom = d2 - d1
    if abs(denom) < 1e-14 * max(1.0, abs(x2)):
        return x2
    return x2 - d2 * d2 / denom


def szego_sweep(measure: RadialMeasure, a: Symbol, n_grid: Sequence[int], mode: str = "C1", executor=None) -> SzegoReport:
    """``det M_{mu,n}(a) / (G[a]^n [exp(iota(2n) Omega[a])])`` along ``n_grid``.

    ``mode="C2"`` includes the ``iota`` factor.  The extrapolated limit is the
    Aitken value of the last three log-ratios.
    """
    grid = [int(n) for n in n_grid]
    if any(n < 1 for n in grid) or any(b <= a_ for a_, b in zip(grid, grid[1:])):
        raise ValidationError("n_grid must be strictly increasing positive integers")
    if mode not in ("C1", "C2"):
        raise ValidationError("mode must be C1 or C2")
    la = log_symbol(a)
    log_g = complex(la.coeff(0))
    om = -omega_pair(la, la) if mode == "C2" else 0j
    if mode == "C2":
        _require_class(measure, "C2")

    def one(n):
        return log_det(m_section(measure, a, n)).log

    dets = list(executor.map(one, grid)) if executor is not None else [one(n) for n in grid]
    iotas = [float(measure.iota(2 * n)) if mode == "C2" else 0.0 for n in grid]
    logs = []
    for n, ld, io in zip(grid, dets, iotas):
        if not math.isfinite(ld.real):
            raise CertificationError(f"det M_n(a) vanished at n={n}")
        logs.append(ld - n * log_g - io * om)
    limit = _aitken(*logs[-3:]) if len(logs) >= 3 else logs[-1]
    return SzegoReport(
        n_grid=grid,
        ratios=[complex(np.exp(v)) for v in logs],
        log_ratios=logs,
        extrapolated_limit=complex(np.exp(limit)),
        mode=mode,
        diagnostics={"iota": iotas, "log_G": log_g, "omega": om},
    )
