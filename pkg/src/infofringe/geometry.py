"""Statistical-distance geometry of two-outcome distributions and the fringe law.

A two-outcome distribution ``(f, 1 - f)`` that depends on a path difference
``x`` has line element

    ds^2 = sum_i (d sqrt(P_i))^2 = f'^2 / (4 f (1 - f)) dx^2 .

Requiring the information density ``|ds/dx|`` to be the same at every ``x``
gives ``|f'| / sqrt(f (1 - f)) = k`` whose non-constant solutions through a
boundary value ``f(0) in {0, 1}`` are ``f(x) = (1 +/- cos k x) / 2``.

Two rates appear and differ by a factor of two:

* :func:`information_speed` is ``ds/dx`` itself;
* :func:`information_rate` is ``|f'| / sqrt(f (1 - f)) = 2 ds/dx``, the
  quantity that equals ``k`` on the fringe law.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .exceptions import BoundarySingularityError, DomainError
from .oracle import ScalePreparation, SetupConfig, SetupKind
from .pairs import ProbabilityPair

# a fringe that comes this close to 0 or 1 is treated as touching the boundary
CONTACT_TOL = 1e-9
# RK4 substep cap, as a fraction of the distance to the nearest boundary contact
SUBSTEP_FRACTION = 0.03


class Sign(enum.Enum):
    PLUS = "plus"  # f(0) = 1
    MINUS = "minus"  # f(0) = 0

    @property
    def factor(self) -> float:
        return 1.0 if self is Sign.PLUS else -1.0

    def flipped(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS

    @classmethod
    def from_boundary(cls, f0) -> "Sign":
        if f0 == 1:
            return cls.PLUS
        if f0 == 0:
            return cls.MINUS
        raise DomainError(f"boundary value must be 0 or 1, got {f0!r}")


def _complement(f, complement):
    return 1.0 - f if complement is None else complement


def metric_density(f, fprime, complement=None):
    """Fisher information density ``(ds/dx)^2 = f'^2 / (4 f (1 - f))``.

    ``complement`` may carry an accurately computed ``1 - f``; near ``f = 1``
    the subtraction loses digits.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(_complement(f, complement), dtype=float)
    if np.any(f <= 0.0) or np.any(g <= 0.0):
        raise BoundarySingularityError(
            "metric density is 0/0 at f = 0 or f = 1; use the boundary expansion"
        )
    out = np.asarray(fprime, dtype=float) ** 2 / (4.0 * f * g)
    return out[()] if out.ndim == 0 else out


def information_speed(f, fprime, complement=None):
    """``|ds/dx|``, the statistical distance travelled per unit path difference."""
    return np.sqrt(metric_density(f, fprime, complement))


def information_rate(f, fprime, complement=None):
    """``|f'| / sqrt(f (1 - f))``; equals ``2 |ds/dx|`` and is ``k`` on the fringe law."""
    return 2.0 * information_speed(f, fprime, complement)


def statistical_distance(a, b) -> float:
    """Geodesic distance between two distributions on the sqrt-probability sphere.

    Equal to ``arccos(sqrt(a1 b1) + sqrt(a2 b2))``, computed as the angle between
    the unit vectors ``sqrt(a)`` and ``sqrt(b)`` in a form that keeps full
    precision for nearly equal arguments.
    """
    u = np.sqrt(np.asarray(tuple(a), dtype=float))
    v = np.sqrt(np.asarray(tuple(b), dtype=float))
    return float(2.0 * math.atan2(np.linalg.norm(u - v), np.linalg.norm(u + v)))


def bhattacharyya_angle(a, b) -> float:
    """Textbook ``arccos`` form of :func:`statistical_distance`."""
    (a1, a2), (b1, b2) = a, b
    bc = math.sqrt(a1 * b1) + math.sqrt(a2 * b2)
    return math.acos(min(1.0, max(-1.0, bc)))


@dataclass(frozen=True)
class FringeLaw:
    """Closed-form fringe ``f(x) = (1 +/- cos k x) / 2``."""

    k: float
    sign: Sign = Sign.PLUS

    def __post_init__(self):
        k = float(self.k)
        if not math.isfinite(k) or k < 0:
            raise DomainError(f"fringe wavenumber must be finite and >= 0, got {k!r}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "sign", Sign(self.sign))

    def _cos(self, x):
        return self.sign.factor * np.cos(self.k * np.asarray(x, dtype=float))

    def evaluate(self, x):
        out = 0.5 * (1.0 + self._cos(x))
        return out[()] if out.ndim == 0 else out

    __call__ = evaluate

    def complement(self, x):
        """``1 - f(x)`` evaluated without cancellation."""
        out = 0.5 * (1.0 - self._cos(x))
        return out[()] if out.ndim == 0 else out

    def derivative(self, x):
        out = -0.5 * self.sign.factor * self.k * np.sin(self.k * np.asarray(x, dtype=float))
        return out[()] if out.ndim == 0 else out

    def pair(self, x) -> ProbabilityPair:
        return ProbabilityPair(float(self.evaluate(x)), float(self.complement(x)))

    def information_rate(self, x):
        return information_rate(self.evaluate(x), self.derivative(x), self.complement(x))

    def relabeled(self) -> "FringeLaw":
        """Same physics with detectors 1 and 2 swapped."""
        return FringeLaw(self.k, self.sign.flipped())


def closed_form_fringe(k: float, sign=Sign.PLUS) -> FringeLaw:
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k!r}")
    return FringeLaw(k, Sign(sign))


@dataclass(frozen=True)
class MetricSample:
    x: float
    speed: float

    def __post_init__(self):
        if self.speed < 0:
            raise DomainError("information speed is nonnegative")


def metric_profile(law: FringeLaw, xs) -> list:
    """Sample ``ds/dx`` of ``law`` along ``xs``; points on the boundary are skipped."""
    out = []
    for x in np.asarray(xs, dtype=float):
        f, g = law.evaluate(x), law.complement(x)
        if f <= 0.0 or g <= 0.0:
            continue
        out.append(MetricSample(float(x), float(information_speed(f, law.derivative(x), g))))
    return out


@dataclass(frozen=True, eq=False)
class FringeTable:
    """Numerical solution of the constant-information-rate equation on a grid."""

    xs: np.ndarray
    fs: np.ndarray
    k: float
    f0: int
    step: float
    slopes: np.ndarray = field(repr=False)

    def __post_init__(self):
        xs, fs = np.asarray(self.xs, dtype=float), np.asarray(self.fs, dtype=float)
        if xs.shape != fs.shape or xs.ndim != 1 or xs.size < 2:
            raise DomainError("xs and fs must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise DomainError("xs must be strictly increasing")
        if np.any(fs < 0) or np.any(fs > 1):
            raise DomainError("table values must lie in [0, 1]")
        if fs[0] != self.f0:
            raise DomainError("first table value must equal the boundary value")
        xs.setflags(write=False)
        fs.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "fs", fs)

    @cached_property
    def _spline(self):
        return CubicHermiteSpline(self.xs, self.fs, self.slopes, extrapolate=False)

    def evaluate(self, x):
        """Cubic Hermite interpolation using the ODE slopes at the nodes."""
        out = np.clip(self._spline(np.asarray(x, dtype=float)), 0.0, 1.0)
        return out[()] if out.ndim == 0 else out

    __call__ = evaluate

    def sup_deviation(self, law: FringeLaw) -> float:
        """Largest absolute difference from ``law`` over the grid nodes."""
        return float(np.max(np.abs(self.fs - law.evaluate(self.xs))))

    def to_csv(self, path_or_buf, extra_header=()):
        from .io import write_fringe_table

        write_fringe_table(self, path_or_buf, extra_header)


def _grid(x_max: float, step: float) -> np.ndarray:
    n = int(math.floor(x_max / step * (1 + 1e-12)))
    xs = step * np.arange(n + 1)
    if x_max - xs[-1] > 1e-9 * step:
        xs = np.append(xs, x_max)
    else:
        xs[-1] = x_max
    return xs


def constant_metric_ode_solve(k: float, f0: int, x_max: float, step: float) -> FringeTable:
    """Integrate ``df/dx = s k sqrt(f (1 - f))`` from the boundary value ``f0``.

    The drift sign ``s`` starts pointing into the interior and flips every
    time the solution touches 0 or 1.  The right-hand side is not Lipschitz
    at the boundary, so the constant solution is also admissible there; the
    solver leaves each contact along the local expansion
    ``f = b -/+ (k d)^2 / 4`` (``d`` the distance from the contact) for one
    step, and integrates with classical RK4 elsewhere.

    A contact is declared when the gap to the boundary the drift points at
    falls to ``(k step / 2)^2`` (the expansion then puts the boundary within
    one step) or below ``CONTACT_TOL``; its position follows by inverting
    the same expansion.  RK4 substeps are capped at ``SUBSTEP_FRACTION`` of
    the expansion's distance to the nearest boundary, since the stage
    estimates degrade there.
    """
    k, step, x_max = float(k), float(step), float(x_max)
    if not k > 0:
        raise DomainError("k must be > 0; the k = 0 law is constant and needs no integration")
    if not step > 0:
        raise DomainError("step must be > 0")
    if not x_max >= step:
        raise DomainError("x_max must be >= step")
    Sign.from_boundary(f0)
    f0 = int(f0)

    def rhs(f, s):
        return s * k * math.sqrt(max(f * (1.0 - f), 0.0))

    def expansion(x, b, x_c):
        q = 0.25 * (k * (x - x_c)) ** 2
        return b - q if b == 1.0 else b + q

    contact_gap = max(CONTACT_TOL, (0.5 * k * step) ** 2)
    min_substep = 1e-3 * step

    xs = _grid(x_max, step)
    fs = np.empty_like(xs)
    slopes = np.empty_like(xs)
    fs[0], slopes[0] = f0, 0.0

    b, x_c = float(f0), 0.0
    s = -1.0 if b == 1.0 else 1.0
    in_zone = True
    x, f = 0.0, float(f0)
    for i in range(1, len(xs)):
        xn = xs[i]
        if in_zone and xn > x_c + step:
            # leave the contact along the expansion, then hand over to RK4
            x, f = x_c + step, expansion(x_c + step, b, x_c)
            in_zone = False
        while not in_zone and x < xn:
            gap = (1.0 - f) if s > 0 else f
            if gap <= contact_gap:
                b, x_c, s = (1.0 if s > 0 else 0.0), x + 2.0 * math.sqrt(gap) / k, -s
                in_zone = True
                break
            near = 2.0 * math.sqrt(min(f, 1.0 - f)) / k
            h = min(xn - x, step, max(SUBSTEP_FRACTION * near, min_substep))
            k1 = rhs(f, s)
            k2 = rhs(f + 0.5 * h * k1, s)
            k3 = rhs(f + 0.5 * h * k2, s)
            k4 = rhs(f + h * k3, s)
            f = min(max(f + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, 0.0), 1.0)
            x = xn if xn - x - h <= 1e-15 * max(1.0, xn) else x + h
        if in_zone:
            fs[i] = min(max(expansion(xn, b, x_c), 0.0), 1.0)
            slopes[i] = 0.5 * k * k * (xn - x_c) * (-1.0 if b == 1.0 else 1.0)
        else:
            fs[i] = f
            slopes[i] = rhs(f, s)
    return FringeTable(xs=xs, fs=fs, k=k, f0=f0, step=step, slopes=slopes)


def setup1_inference(r1: float, r2: float) -> ProbabilityPair:
    """Which-path arrangement: arm lengths carry no information, so both detectors get 1/2."""
    if r1 < 0 or r2 < 0:
        raise DomainError("arm lengths must be >= 0")
    return ProbabilityPair(0.5, 0.5)


class KSelection(enum.Enum):
    DETERMINISTIC = "deterministic"
    IDENTIFIED = "identified"
    FREE = "free"


@dataclass(frozen=True)
class KChoice:
    kind: KSelection
    k: Optional[float] = None


def choose_k(config: SetupConfig) -> KChoice:
    """Fringe wavenumber implied by what the preparation fixes.

    No prepared length scale forces ``k = 0``; a fixed momentum supplies
    ``k = p``; otherwise ``k`` is left to be measured.
    """
    prep = config.scale_prepared
    if prep is ScalePreparation.NONE:
        return KChoice(KSelection.DETERMINISTIC, 0.0)
    if prep is ScalePreparation.MOMENTUM_FIXED:
        return KChoice(KSelection.IDENTIFIED, config.p)
    return KChoice(KSelection.FREE)


def infer_distribution(config: SetupConfig, k: Optional[float] = None) -> ProbabilityPair:
    """Outcome distribution inferred from the preparation alone.

    ``k`` must be supplied when the preparation leaves it free.
    """
    if config.kind is SetupKind.OPEN_ARMS:
        return setup1_inference(config.r1, config.r2)
    choice = choose_k(config)
    if choice.kind is not KSelection.FREE:
        k = choice.k
    elif k is None:
        raise DomainError("k is a free parameter for this preparation; pass it explicitly")
    sign = Sign.MINUS if config.flip_detectors else Sign.PLUS
    return closed_form_fringe(k, sign).pair(config.x)


TRANSFORMS: dict = {
    "identity": lambda x: np.asarray(x, dtype=float),
    "sqrt": lambda x: np.sqrt(np.asarray(x, dtype=float)),
    "square": lambda x: np.asarray(x, dtype=float) ** 2,
}


def reparametrized_fringe(
    transform, k: float, sign=Sign.PLUS, domain=(0.0, 2 * math.pi), n_check: int = 4097
) -> Callable:
    """Fringe obtained by applying the constant-rate rule in ``y = transform(x)``.

    Returns ``x -> (1 +/- cos(k y(x))) / 2``.  The transform is checked to fix
    the origin and to be strictly monotone on ``domain``.
    """
    if isinstance(transform, str):
        try:
            transform = TRANSFORMS[transform]
        except KeyError:
            raise DomainError(f"unknown transform {transform!r}") from None
    law = closed_form_fringe(k, sign)
    if abs(float(transform(0.0))) > 1e-12:
        raise DomainError("transform must map 0 to 0")
    lo, hi = domain
    ys = np.asarray(transform(np.linspace(lo, hi, n_check)), dtype=float)
    dy = np.diff(ys)
    if not (np.all(dy > 0) or np.all(dy < 0)):
        raise DomainError("transform is not strictly monotone (non-invertible) on the domain")

    def fringe(x):
        return law.evaluate(transform(x))

    return fringe
