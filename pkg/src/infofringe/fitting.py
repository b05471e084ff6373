"""Maximum-likelihood determination of the fringe wavenumber from click counts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, NonIdentifiableError
from .geometry import Sign

PROB_FLOOR = 1e-12
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
# grid points per period of the fastest oscillation cos(k |x|_max) in k
GRID_POINTS_PER_PERIOD = 32
MIN_GRID = 2001
TIE_TOL = 1e-9


@dataclass(frozen=True)
class KEstimate:
    k_hat: float
    log_likelihood: float
    stderr: float
    multimodal: bool = False
    k_max: float = math.nan

    def __post_init__(self):
        if not self.k_hat >= 0:
            raise DomainError("k_hat must be >= 0")
        if not math.isfinite(self.log_likelihood):
            raise DomainError("log-likelihood must be finite")

    def as_report(self) -> dict:
        return {
            "k_hat": self.k_hat,
            "stderr": self.stderr,
            "loglik": self.log_likelihood,
            "multimodal": self.multimodal,
            "k_max": self.k_max,
        }


def check_count_table(data, min_distinct: int = 2):
    """Validate ``(x, n1, n2)`` rows and merge rows that share an ``x``.

    Returns sorted ``x`` and the matching ``n1``, ``n2`` arrays.
    """
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        raise DomainError("no data")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DomainError("data must be rows of (x, n1, n2)")
    if not np.all(np.isfinite(arr)):
        raise DomainError("data must be finite")
    x, n1, n2 = arr.T
    if np.any(n1 < 0) or np.any(n2 < 0):
        raise DomainError("counts must be >= 0")
    xs, inverse = np.unique(x, return_inverse=True)
    c1 = np.bincount(inverse, weights=n1, minlength=len(xs))
    c2 = np.bincount(inverse, weights=n2, minlength=len(xs))
    if np.any(c1 + c2 <= 0):
        raise DomainError("every x needs at least one trial")
    if len(xs) < min_distinct:
        raise NonIdentifiableError(
            "all data at a single path difference; k cannot be identified"
        )
    return xs, c1, c2


def log_likelihood(k, x, n1, n2, sign=Sign.PLUS):
    """Binomial log-likelihood of the counts under ``f = (1 +/- cos k x)/2``.

    ``k`` may be an array; probabilities are floored at ``PROB_FLOOR``.
    """
    k = np.asarray(k, dtype=float)
    c = Sign(sign).factor * np.cos(np.multiply.outer(k, np.asarray(x, dtype=float)))
    p1 = np.maximum(0.5 * (1.0 + c), PROB_FLOOR)
    p2 = np.maximum(0.5 * (1.0 - c), PROB_FLOOR)
    out = np.log(p1) @ np.asarray(n1, dtype=float) + np.log(p2) @ np.asarray(n2, dtype=float)
    return out[()] if out.ndim == 0 else out


def observed_information(k, x, n1, n2, sign=Sign.PLUS) -> float:
    """``-d^2 L / dk^2`` at ``k``."""
    s = Sign(sign).factor
    x = np.asarray(x, dtype=float)
    c, sn = np.cos(k * x), np.sin(k * x)
    p1 = np.maximum(0.5 * (1.0 + s * c), PROB_FLOOR)
    p2 = np.maximum(0.5 * (1.0 - s * c), PROB_FLOOR)
    d1 = -0.5 * s * x * sn
    dd1 = -0.5 * s * x * x * c
    # p2 = 1 - p1, so its derivatives are the negatives
    second = n1 * (dd1 / p1 - (d1 / p1) ** 2) + n2 * (-dd1 / p2 - (d1 / p2) ** 2)
    return float(-np.sum(second))


def golden_section_max(func, a: float, b: float, tol: float = 1e-12, max_iter: int = 200):
    """Maximize a unimodal ``func`` on ``[a, b]``; returns ``(x, func(x))``."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = func(d)
    return (c, fc) if fc >= fd else (d, fd)


def default_k_max(x) -> float:
    """Largest k resolvable from the spacing of the sampled path differences."""
    xs = np.unique(np.asarray(x, dtype=float))
    return math.pi / float(np.min(np.diff(xs)))


def likelihood_grid(x, n1, n2, sign=Sign.PLUS, k_max=None, n_grid=None):
    """Coarse scan of the log-likelihood on ``[0, k_max]``; returns ``(ks, values)``."""
    k_max = default_k_max(x) if k_max is None else float(k_max)
    if not k_max > 0:
        raise DomainError("k_max must be > 0")
    if n_grid is None:
        period = 2.0 * math.pi / max(float(np.max(np.abs(x))), 1e-300)
        n_grid = max(MIN_GRID, int(math.ceil(k_max / period * GRID_POINTS_PER_PERIOD)) + 1)
    ks = np.linspace(0.0, k_max, int(n_grid))
    return ks, log_likelihood(ks, x, n1, n2, sign)


def fit_k(data, sign=Sign.PLUS, k_max=None, n_grid=None) -> KEstimate:
    """Maximum-likelihood fringe wavenumber from rows of ``(x, n1, n2)``.

    The likelihood is oscillatory in ``k``, so a grid scan over ``[0, k_max]``
    picks the global bracket and golden-section search refines it.  If
    several grid maxima tie within ``TIE_TOL`` the smallest ``k`` wins and
    ``multimodal`` is set.
    """
    sign = Sign(sign)
    x, n1, n2 = check_count_table(data)
    ks, values = likelihood_grid(x, n1, n2, sign, k_max, n_grid)
    k_max = float(ks[-1])
    best = float(np.max(values))
    tol = TIE_TOL * max(1.0, abs(best))
    near = np.flatnonzero(values >= best - tol)
    # adjacent grid points near the top belong to the same peak
    peaks = np.split(near, np.flatnonzero(np.diff(near) > 1) + 1)
    multimodal = len(peaks) > 1
    i = int(near[0])

    def objective(k):
        return float(log_likelihood(k, x, n1, n2, sign))

    k_hat, l_hat = float(ks[i]), float(values[i])
    lo, hi = float(ks[max(i - 1, 0)]), float(ks[min(i + 1, len(ks) - 1)])
    k_ref, l_ref = golden_section_max(objective, lo, hi)
    if l_ref > l_hat:
        k_hat, l_hat = k_ref, l_ref

    info = observed_information(k_hat, x, n1, n2, sign)
    stderr = 1.0 / math.sqrt(info) if info > 0 and math.isfinite(info) else math.nan
    return KEstimate(k_hat, l_hat, stderr, multimodal, k_max)
