"""Fourier-coefficient calculus for functions on the unit circle.

Convention: ``f_k = (1/2pi) int f(theta) exp(-i k theta) dtheta``, so
``f(theta) = sum_k f_k exp(i k theta)``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.signal import fftconvolve

from .errors import AliasingWarning, NonInvertibleError, NonzeroWindingError, ValidationError

__all__ = [
    "Symbol",
    "PowerWeight",
    "TableWeight",
    "IotaWeight",
    "from_trig",
    "from_samples",
    "from_function",
    "from_csv",
    "flp_norm",
    "multiply",
    "power",
    "add",
    "scale",
    "exp_symbol",
    "log_symbol",
    "invert_symbol",
    "winding_number",
]

_REAL_TOL = 1e-12


def _next_pow2(n):
    return 1 << max(0, int(n - 1).bit_length())


@dataclass(frozen=True, eq=False)
class Symbol:
    """Finite window of Fourier coefficients ``f_{-N}, ..., f_N``.

    ``coeffs[N + k]`` holds ``f_k``.  ``tail_mass`` records the l2 norm of
    coefficients dropped when the symbol was produced by truncation.
    """

    coeffs: np.ndarray
    real: Optional[bool] = None
    tail_mass: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).copy()
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValidationError("coefficient window must be 1-d with odd length 2N+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        sym = np.max(np.abs(c - np.conj(c[::-1]))) if c.size else 0.0
        scale_ = max(1.0, float(np.max(np.abs(c))))
        is_real = bool(sym <= _REAL_TOL * scale_)
        if self.real is None:
            object.__setattr__(self, "real", is_real)
        elif self.real and not is_real:
            raise ValidationError("symbol tagged real but coefficients are not conjugate-symmetric")

    @property
    def N(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def grid_size(self) -> int:
        return _next_pow2(4 * self.N + 4)

    def coeff(self, k):
        """``f_k`` (zero outside the window); accepts int or int array."""
        k = np.asarray(k)
        N = self.N
        inside = np.abs(k) <= N
        out = np.where(inside, self.coeffs[np.clip(k + N, 0, 2 * N)], 0)
        return complex(out) if out.ndim == 0 else out

    def window(self, N: int) -> np.ndarray:
        """Coefficients on ``[-N, N]``, zero-padded or truncated."""
        return np.asarray(self.coeff(np.arange(-N, N + 1)), dtype=complex)

    def with_window(self, N: int) -> "Symbol":
        dropped = max(0, self.N - N)
        tail = 0.0
        if dropped:
            c = self.coeffs
            tail = float(np.sqrt(np.sum(np.abs(c[:dropped]) ** 2) + np.sum(np.abs(c[-dropped:]) ** 2)))
        return Symbol(self.window(N), self.real, math.hypot(self.tail_mass, tail))

    def trimmed(self, tol: float = 0.0) -> "Symbol":
        """Shrink the window to the outermost coefficient above ``tol``."""
        big = np.nonzero(np.abs(self.coeffs) > tol)[0]
        if big.size == 0:
            return Symbol(np.zeros(1), self.real, self.tail_mass)
        N = self.N
        reach = int(max(abs(big[0] - N), abs(big[-1] - N)))
        return self.with_window(reach)

    def on_grid(self, M: Optional[int] = None) -> np.ndarray:
        """Values at ``theta_j = 2 pi j / M``."""
        N = self.N
        M = self.grid_size if M is None else int(M)
        if M <= 2 * N:
            raise ValidationError("grid too small for the coefficient window")
        buf = np.zeros(M, dtype=complex)
        k = np.arange(-N, N + 1)
        buf[k % M] = self.coeffs
        vals = np.fft.ifft(buf) * M
        return vals.real.astype(complex) if self.real else vals

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        k = np.arange(-self.N, self.N + 1)
        vals = np.exp(1j * np.multiply.outer(theta, k)) @ self.coeffs
        if self.real:
            vals = vals.real
        return vals

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        if isinstance(other, Symbol):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __repr__(self):
        return f"Symbol(N={self.N}, real={self.real})"


@dataclass(frozen=True)
class PowerWeight:
    """``nu_n = (1 + |n|)^sigma``."""

    sigma: float

    def __call__(self, n):
        return (1.0 + np.abs(n)) ** self.sigma


@dataclass(frozen=True, eq=False)
class TableWeight:
    """Explicit weights ``nu_0, nu_1, ...``; symmetric by construction."""

    values: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v <= 0):
            raise ValidationError("weights must be positive")

    def __call__(self, n):
        v = np.asarray(self.values, dtype=float)
        idx = np.abs(np.asarray(n))
        if np.any(idx >= v.size):
            raise ValidationError("weight table shorter than the coefficient window")
        return v[idx]


@dataclass(frozen=True)
class IotaWeight:
    """``nu_m = sqrt(1 + m^2 iota(2 |m|^(2 sigma)))`` for a class C2 measure."""

    measure: object
    sigma: float

    def __call__(self, n):
        m = np.abs(np.asarray(n, dtype=float))
        out = np.ones_like(m)
        nz = m > 0
        if np.any(nz):
            out[nz] = np.sqrt(1 + m[nz] ** 2 * self.measure.iota(2 * m[nz] ** (2 * self.sigma)))
        return out


def from_trig(terms: Iterable, real: Optional[bool] = None) -> Symbol:
    """Symbol from ``(k, c)`` pairs; ``f(theta) = sum c exp(i k theta)``."""
    terms = list(terms)
    ks = [int(k) for k, _ in terms]
    if len(set(ks)) != len(ks):
        raise ValidationError("trigonometric indices must be distinct")
    N = max((abs(k) for k in ks), default=0)
    c = np.zeros(2 * N + 1, dtype=complex)
    for k, v in terms:
        c[N + int(k)] = v
    return Symbol(c, real)


def from_samples(values, N: int, real: Optional[bool] = None) -> Symbol:
    """Coefficients from samples on the uniform grid ``theta_j = 2 pi j / M``."""
    v = np.asarray(values, dtype=complex)
    M = v.size
    if M < 4 * N + 4:
        raise ValidationError(f"need M >= 4N+4 samples, got M={M} for N={N}")
    F = np.fft.fft(v) / M
    k = np.arange(-N, N + 1)
    c = F[k % M]
    top = np.max(np.abs(c))
    if top > 0 and max(abs(c[0]), abs(c[-1])) > 1e-8 * top:
        warnings.warn(f"edge coefficients of the window N={N} are not negligible", AliasingWarning, stacklevel=2)
    return Symbol(c, real)


def from_function(func, N: int, M: Optional[int] = None, real: Optional[bool] = None) -> Symbol:
    """Sample a vectorized function of theta and transform."""
    M = _next_pow2(4 * N + 4) if M is None else int(M)
    theta = 2 * np.pi * np.arange(M) / M
    return from_samples(func(theta), N, real)


def from_csv(path) -> Symbol:
    """Read a ``k,re,im`` CSV."""
    terms = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["k", "re", "im"]:
            raise ValidationError("symbol CSV must have header 'k,re,im'")
        for row in reader:
            terms.append((int(row["k"]), complex(float(row["re"]), float(row["im"]))))
    return from_trig(terms)


def flp_norm(s: Symbol, p: int, weight=None) -> float:
    """Weighted ``l^p`` norm of the coefficient sequence."""
    if p not in (1, 2):
        raise ValidationError("p must be 1 or 2")
    weight = PowerWeight(0.0) if weight is None else weight
    k = np.arange(-s.N, s.N + 1)
    nu = np.asarray(weight(k), dtype=float)
    if np.any(nu <= 0):
        raise ValidationError("weights must be positive")
    return float(np.sum(np.abs(s.coeffs) ** p * nu) ** (1.0 / p))


def multiply(s: Symbol, t: Symbol) -> Symbol:
    """Product of symbols; the window grows to ``N_s + N_t``."""
    if s.coeffs.size * t.coeffs.size > 1 << 16:
        c = fftconvolve(s.coeffs, t.coeffs)
    else:
        c = np.convolve(s.coeffs, t.coeffs)
    real = bool(s.real and t.real)
    if real:
        c = 0.5 * (c + np.conj(c[::-1]))
    return Symbol(c, real, math.hypot(s.tail_mass, t.tail_mass))


def power(s: Symbol, m: int) -> Symbol:
    if m < 0:
        raise ValidationError("use invert_symbol for negative powers")
    out = from_trig([(0, 1.0)])
    base = s
    while m:
        if m & 1:
            out = multiply(out, base)
        m >>= 1
        if m:
            base = multiply(base, base)
    return out


def add(s: Symbol, t: Symbol) -> Symbol:
    N = max(s.N, t.N)
    real = bool(s.real and t.real)
    return Symbol(s.window(N) + t.window(N), real, math.hypot(s.tail_mass, t.tail_mass))


def scale(s: Symbol, c) -> Symbol:
    c = complex(c)
    real = bool(s.real and c.imag == 0)
    return Symbol(s.coeffs * c, real, abs(c) * s.tail_mass)


def winding_number(values) -> int:
    """Winding of a closed sampled curve about 0, from summed phase increments."""
    v = np.asarray(values, dtype=complex)
    steps = np.angle(np.roll(v, -1) / v)
    return int(round(np.sum(steps) / (2 * np.pi)))


def _check_invertible(s: Symbol, vals):
    mod = np.min(np.abs(vals))
    if not mod > 1e-8:
        raise NonInvertibleError(f"symbol modulus {mod:.3g} is too small on the grid")
    w = winding_number(vals)
    if w != 0:
        raise NonzeroWindingError(f"symbol has winding number {w} about 0")


def _pointwise(s: Symbol, func, N_out: Optional[int], check=False, real_out=None) -> Symbol:
    """Apply ``func`` on a grid that resolves the result, then truncate.

    The grid is doubled until the transform of ``func(s)`` has decayed to
    roundoff near ``M/4``.  Without ``N_out`` the window is cut where the
    tail drops below 1e-16 of the largest coefficient.
    """
    M = max(64, _next_pow2(8 * s.N + 8), _next_pow2(4 * (N_out or 0) + 4))
    while True:
        vals = s.on_grid(M)
        if check:
            _check_invertible(s, vals)
        F = np.fft.fft(func(vals)) / M
        top = np.max(np.abs(F))
        band = np.abs(F[M // 4 - M // 16 : M // 4 + M // 16])
        if top == 0 or np.max(band) <= 1e-15 * top or M >= 1 << 22:
            break
        M *= 2
    k = np.arange(-(M // 2 - 1), M // 2)
    full = F[k % M]
    if N_out is None:
        mag = np.abs(full)
        big = np.nonzero(mag > 1e-16 * top)[0] if top > 0 else np.array([M // 2 - 1])
        reach = int(np.max(np.abs(k[big]))) if big.size else 0
        N_out = max(reach, s.N)
    c = full[(M // 2 - 1) - N_out : (M // 2 - 1) + N_out + 1] if N_out < M // 2 else np.pad(full, N_out - (M // 2 - 1))
    dropped = np.sqrt(max(0.0, float(np.sum(np.abs(full) ** 2) - np.sum(np.abs(c) ** 2))))
    real = s.real if real_out is None else real_out
    if real:
        c = 0.5 * (c + np.conj(c[::-1]))
    return Symbol(c, real, math.hypot(s.tail_mass, dropped))


def exp_symbol(s: Symbol, N_out: Optional[int] = None) -> Symbol:
    """``exp(s)`` as a symbol; the zero symbol maps to exactly 1."""
    if not np.any(s.coeffs):
        return from_trig([(0, 1.0)]).with_window(N_out or 0)
    return _pointwise(s, np.exp, N_out)


def _continuous_log(vals):
    phase = np.unwrap(np.angle(vals))
    # branch with mean phase in (-pi, pi]
    shift = 2 * np.pi * np.round(np.mean(phase) / (2 * np.pi))
    return np.log(np.abs(vals)) + 1j * (phase - shift)


def log_symbol(s: Symbol, N_out: Optional[int] = None) -> Symbol:
    """Continuous logarithm; needs zero winding and modulus bounded away from 0.

    A real symbol keeps its real tag only if it is positive on the circle.
    """
    vals = s.on_grid(max(64, _next_pow2(8 * s.N + 8)))
    _check_invertible(s, vals)
    positive = bool(s.real and np.all(vals.real > 0))
    return _pointwise(s, _continuous_log, N_out, check=True, real_out=positive)


def invert_symbol(s: Symbol, N_out: Optional[int] = None) -> Symbol:
    """Pointwise reciprocal ``1/s``."""
    return _pointwise(s, np.reciprocal, N_out, check=True)
