"""Mean-measure formulas and Monte Carlo samplers for the radial ensemble.

Random numbers come from counter-based Philox streams keyed by the user seed;
each (replica, point) pair owns its own stream, so results do not depend on
evaluation order or threading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .errors import CertificationError, ValidationError
from .radial_measures import RadialMeasure
from .symbols import Symbol

__all__ = [
    "PointSample",
    "stream",
    "mean_density",
    "mean_absolute_moment",
    "circular_law_check",
    "sample_moduli",
    "sample_dpp",
    "empirical_statistic",
]

_TAG_MODULI = 1
_TAG_DPP = 2
_MAX_PROPOSALS = 10**6


def stream(seed: int, *counter: int) -> np.random.Generator:
    """Philox generator keyed by ``seed`` with counter words ``counter``.

    The first counter word is left free for the generator to advance.
    """
    key = np.random.SeedSequence(int(seed)).generate_state(2, dtype=np.uint64)
    words = [0, 0, 0, 0]
    for i, c in enumerate(counter[:3]):
        words[i + 1] = int(c)
    return np.random.Generator(np.random.Philox(key=key, counter=np.array(words, dtype=np.uint64)))


def _open_uniform(rng, size):
    """Uniforms strictly inside (0, 1)."""
    return (rng.integers(0, 1 << 53, size=size).astype(float) + 0.5) / float(1 << 53)


@dataclass(frozen=True, eq=False)
class PointSample:
    radii: np.ndarray
    angles: np.ndarray
    seed: int
    measure: str
    n: int
    replica: int = 0

    @property
    def points(self):
        return list(zip(self.radii.tolist(), self.angles.tolist()))

    @property
    def z(self) -> np.ndarray:
        return self.radii * np.exp(1j * self.angles)


def _log_terms(measure, n, r):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    k = np.arange(n, dtype=float)
    lm = measure.log_moment(2 * k)
    with np.errstate(divide="ignore", invalid="ignore"):
        lr = np.log(r)
        terms = np.where(k[None, :] == 0, 0.0, 2 * k[None, :] * lr[:, None]) - lm[None, :]
    return terms


def mean_density(measure: RadialMeasure, n: int, r):
    """``(1/n) sum_{k<n} r^{2k} / m_{2k}``: the mean measure relative to ``dmu(r) dtheta / 2pi``."""
    if n < 1:
        raise ValidationError("n must be positive")
    if np.any(np.asarray(r) < 0):
        raise ValidationError("radius must be nonnegative")
    out = np.exp(logsumexp(_log_terms(measure, n, r), axis=1) - math.log(n))
    return float(out[0]) if np.ndim(r) == 0 else out


def mean_absolute_moment(measure: RadialMeasure, n: int, l: int) -> float:
    """``(1/n) sum_{k<n} m_{2k+l} / m_{2k}``."""
    if n < 1 or l < 0:
        raise ValidationError("need n >= 1 and l >= 0")
    k = np.arange(n, dtype=float)
    logs = measure.log_moment(2 * k + l) - measure.log_moment(2 * k)
    return float(np.exp(logsumexp(logs) - math.log(n)))


def circular_law_check(measure: RadialMeasure, n: int, l_max: int) -> dict:
    """Radii ``(rho_l (alpha l + 1))^(1/l)`` from scaled absolute moments.

    ``rho_l = mean_absolute_moment / n^(alpha l)``; for a weighted circular
    law these roots are the same for every l.  Returns per-l radii, their
    mean, and the max spread.
    """
    alpha = measure.mean_measure_alpha
    if alpha is None:
        raise ValidationError(f"{measure.name} has no declared mean-measure exponent")
    if l_max < 1:
        raise ValidationError("l_max must be >= 1")
    ls = np.arange(1, l_max + 1)
    scaled = np.array([mean_absolute_moment(measure, n, int(l)) / n ** (alpha * l) for l in ls])
    radii = (scaled * (alpha * ls + 1)) ** (1.0 / ls)
    fitted = float(np.mean(radii))
    return {
        "l": ls.tolist(),
        "scaled_moments": scaled.tolist(),
        "radii": radii.tolist(),
        "fitted_radius": fitted,
        "max_deviation": float(np.max(np.abs(radii - fitted))),
    }


def sample_moduli(measure: RadialMeasure, n: int, seed: int, replica: int = 0) -> np.ndarray:
    """Independent radii, the k-th with density ``r^{2k} dmu / m_{2k}``."""
    if n < 1:
        raise ValidationError("n must be positive")
    rng = stream(seed, _TAG_MODULI, replica)
    u = _open_uniform(rng, n)
    return np.array([measure.quantile(k, u[k]) for k in range(n)], dtype=float)


def _features(measure, n, r, theta, lm_half):
    """Normalized ``(phi_k(z))_k`` and nothing else; ``phi_k = z^k / sqrt(2 pi m_2k)``."""
    k = np.arange(n)
    with np.errstate(divide="ignore"):
        lr = math.log(r) if r > 0 else -math.inf
    logs = np.where(k == 0, 0.0, k * lr) - lm_half
    logs -= logsumexp(2 * logs) / 2
    return np.exp(logs) * np.exp(1j * k * theta)


def sample_dpp(measure: RadialMeasure, n: int, seed: int, replica: int = 0, batch: int = 16) -> PointSample:
    """Exact draw of the n-point ensemble by sequential projection sampling.

    Proposals come from the mean measure (k uniform, radius from the k-th
    radial law, uniform angle); a proposal is accepted with probability
    ``1 - ||Q v||^2`` where v is the normalized feature vector and Q projects
    onto the span of the features of points already placed.
    """
    if not 1 <= n <= 64:
        raise ValidationError("sample_dpp supports 1 <= n <= 64")
    lm_half = measure.log_moment(2.0 * np.arange(n)) / 2
    basis = np.zeros((n, n), dtype=complex)
    radii = np.empty(n)
    angles = np.empty(n)
    for i in range(n):
        rng = stream(seed, _TAG_DPP, replica, i)
        tried = 0
        while True:
            if tried >= _MAX_PROPOSALS:
                raise CertificationError(
                    f"sampler starved: {tried} proposals for point {i} (measure {measure.name}, n={n}, seed={seed})"
                )
            ks = rng.integers(0, n, size=batch)
            us = _open_uniform(rng, batch)
            ths = 2 * np.pi * rng.random(batch)
            acc = rng.random(batch)
            hit = None
            for j in range(batch):
                r = float(measure.quantile(int(ks[j]), us[j]))
                v = _features(measure, n, r, ths[j], lm_half)
                proj = basis[:i].conj() @ v
                p = max(0.0, 1.0 - float(np.sum(np.abs(proj) ** 2)))
                if acc[j] < p:
                    hit = (r, ths[j], v, proj)
                    break
            tried += batch
            if hit is not None:
                break
        r, th, v, proj = hit
        resid = v - basis[:i].T @ proj
        basis[i] = resid / np.linalg.norm(resid)
        radii[i], angles[i] = r, th
    return PointSample(radii, angles, int(seed), measure.name, n, replica)


def empirical_statistic(sample: PointSample, f: Symbol) -> float:
    """``X_{f,n} = sum_k f(arg z_k)``."""
    if not f.real:
        raise ValidationError("f must be real-valued")
    return float(np.sum(f(sample.angles)))
