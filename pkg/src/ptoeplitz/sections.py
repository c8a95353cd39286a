"""Finite sections of Toeplitz, Hankel and moment-weighted operators."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import CertificationError, ValidationError
from .radial_measures import RadialMeasure, log_rho_band, rho_matrix
from .symbols import Symbol, invert_symbol

__all__ = [
    "FiniteSection",
    "toeplitz_section",
    "hankel_section",
    "m_section",
    "k_section",
    "hs_norm",
    "trace_norm",
    "diagonal_deficit_sum",
    "kozak_inverse_section",
    "flip",
]

KINDS = ("Toeplitz", "Hankel", "MMu", "KMu", "KozakInverse")


@dataclass(frozen=True, eq=False)
class FiniteSection:
    data: np.ndarray
    kind: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown section kind {self.kind!r}")
        d = np.asarray(self.data)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValidationError("sections are square")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def dump_csv(self, path) -> None:
        """Write ``row,col,re,im`` lines for every entry."""
        rows, cols = np.indices(self.data.shape)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "re", "im"])
            for r, c, v in zip(rows.ravel(), cols.ravel(), self.data.ravel()):
                w.writerow([r, c, repr(float(v.real)), repr(float(v.imag))])


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValidationError("section size n must be a positive integer")
    return int(n)


def _toeplitz_array(a: Symbol, n: int) -> np.ndarray:
    w = a.window(n - 1)
    col = w[n - 1 :]  # a_0 .. a_{n-1}
    row = w[n - 1 :: -1]  # a_0, a_{-1}, ..., a_{-(n-1)}
    return sla.toeplitz(col, row)


def flip(a: Symbol) -> Symbol:
    """``a~(t) = a(1/t)``: reversed coefficients."""
    return Symbol(a.coeffs[::-1].copy(), a.real, a.tail_mass)


def toeplitz_section(a: Symbol, n: int) -> FiniteSection:
    """``T_n(a)``, entry ``(j, k) = a_{j-k}``."""
    n = _check_n(n)
    return FiniteSection(_toeplitz_array(a, n), "Toeplitz", {"n": n, "symbol_N": a.N})


def hankel_section(a: Symbol, n: int) -> FiniteSection:
    """``H_n(a)``, entry ``(j, k) = a_{j+k+1}``."""
    n = _check_n(n)
    w = a.window(2 * n)
    pos = w[2 * n + 1 :]  # a_1 .. a_{2n}
    return FiniteSection(sla.hankel(pos[:n], pos[n - 1 : 2 * n - 1]), "Hankel", {"n": n, "symbol_N": a.N})


def m_section(measure: RadialMeasure, a: Symbol, n: int) -> FiniteSection:
    """``M_{mu,n}(a)``, entry ``(j, k) = a_{j-k} rho(j, k)``."""
    n = _check_n(n)
    data = _toeplitz_array(a, n) * rho_matrix(measure, n)
    return FiniteSection(data, "MMu", {"measure": measure.name, "n": n, "symbol_N": a.N})


def k_section(measure: RadialMeasure, a: Symbol, n: int) -> FiniteSection:
    """``M_{mu,n}(a) - T_n(a)``."""
    n = _check_n(n)
    t = _toeplitz_array(a, n)
    data = t * rho_matrix(measure, n) - t
    return FiniteSection(data, "KMu", {"measure": measure.name, "n": n, "symbol_N": a.N})


def hs_norm(s: FiniteSection) -> float:
    return float(np.linalg.norm(s.data, "fro"))


def trace_norm(s: FiniteSection) -> float:
    try:
        sv = np.linalg.svd(s.data, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise CertificationError("SVD did not converge") from exc
    return float(np.sum(sv))


def diagonal_deficit_sum(measure: RadialMeasure, m: int, n: int) -> float:
    """``sum_{k<n} |rho(k+|m|, k) - 1|``, the trace norm of the diagonal of ``K(t^m)`` cut to n."""
    n = _check_n(n)
    m = abs(int(m))
    if m == 0:
        return 0.0
    logr = log_rho_band(measure, np.arange(n, dtype=float), m)
    return float(np.sum(np.abs(np.expm1(logr))))


def kozak_inverse_section(a: Symbol, n: int, N_big: int | None = None, tol: float = 1e-9, max_doublings: int = 4) -> FiniteSection:
    """``P_n T(a^-1)^-1 P_n`` from the inverse of a large section ``T_N(a^-1)``.

    ``N`` is doubled until the leading n x n block moves by less than ``tol``.
    """
    n = _check_n(n)
    N = max(4 * n, int(N_big or 0))
    ainv = invert_symbol(a)

    def block(size):
        tn = _toeplitz_array(ainv, size)
        e = np.zeros((size, n), dtype=complex)
        e[:n, :n] = np.eye(n)
        return np.linalg.solve(tn, e)[:n, :]

    prev = block(N)
    for _ in range(max_doublings):
        N *= 2
        cur = block(N)
        if np.max(np.abs(cur - prev)) < tol:
            return FiniteSection(cur, "KozakInverse", {"n": n, "N_big": N, "symbol_N": a.N})
        prev = cur
    raise CertificationError(f"Kozak section did not stabilize up to N={N}")
