"""Standard two-mode amplitude model of the Mach-Zehnder interferometer.

This is the reference against which the inferred fringe law is checked.
Conventions (hbar = 1):

* beam splitter ``B = (1/sqrt 2) [[1, i], [i, 1]]``
* free propagation along an arm of length ``r`` multiplies the amplitude by
  ``exp(i p r)``
* the particle enters in mode 1

With these conventions detector port 2 is the bright port at zero path
difference.  Detector 1 of the returned :class:`ProbabilityPair` is mapped to
the bright port, so that ``P1 = (1 + cos p x) / 2``.  Set
``SetupConfig.flip_detectors`` to use the other labeling.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, InvalidStateError
from .pairs import ProbabilityPair

NORM_TOL = 1e-9

BEAM_SPLITTER = np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=np.complex128) / math.sqrt(2.0)


class SetupKind(enum.Enum):
    OPEN_ARMS = "open"  # which-path arrangement, one detector per arm
    RECOMBINED = "recombined"  # arms mixed on a second beam splitter


class ScalePreparation(enum.Enum):
    NONE = "none"
    MOMENTUM_FIXED = "momentum"
    FREE_PARAMETER = "free"


@dataclass(frozen=True)
class ModeState:
    """Two complex mode amplitudes of a single particle."""

    a1: complex
    a2: complex

    @property
    def norm2(self) -> float:
        return abs(self.a1) ** 2 + abs(self.a2) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2], dtype=np.complex128)

    @classmethod
    def from_array(cls, arr) -> "ModeState":
        return cls(complex(arr[0]), complex(arr[1]))

    def check(self, tol: float = NORM_TOL) -> "ModeState":
        if not abs(self.norm2 - 1.0) <= tol:
            raise InvalidStateError(f"state norm^2 is {self.norm2!r}, expected 1")
        return self


@dataclass(frozen=True)
class SetupConfig:
    """Preparation of one interferometer run.

    ``r1``, ``r2`` are arm lengths in arbitrary units and ``p`` the particle
    wavenumber in the inverse unit.
    """

    kind: SetupKind = SetupKind.RECOMBINED
    r1: float = 0.0
    r2: float = 0.0
    p: float = 0.0
    scale_prepared: ScalePreparation = ScalePreparation.MOMENTUM_FIXED
    flip_detectors: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", SetupKind(self.kind))
        object.__setattr__(self, "scale_prepared", ScalePreparation(self.scale_prepared))
        for name in ("r1", "r2", "p"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def x(self) -> float:
        """Path difference ``r1 - r2``."""
        return self.r1 - self.r2

    def with_kind(self, kind) -> "SetupConfig":
        return SetupConfig(kind, self.r1, self.r2, self.p, self.scale_prepared, self.flip_detectors)

    @classmethod
    def from_path_difference(cls, x: float, **kwargs) -> "SetupConfig":
        """Build a config realizing path difference ``x`` with the shorter arm at 0."""
        if x >= 0:
            return cls(r1=x, r2=0.0, **kwargs)
        return cls(r1=0.0, r2=-x, **kwargs)


def apply_beam_splitter(state: ModeState) -> ModeState:
    state.check()
    return ModeState.from_array(BEAM_SPLITTER @ state.as_array())


def propagate_phases(state: ModeState, r1: float, r2: float, p: float) -> ModeState:
    state.check()
    for v in (r1, r2, p):
        if not math.isfinite(v):
            raise DomainError("r1, r2 and p must be finite")
    return ModeState(np.exp(1j * p * r1) * state.a1, np.exp(1j * p * r2) * state.a2)


def output_state(config: SetupConfig) -> ModeState:
    """Amplitudes at the detectors, in beam-splitter port order."""
    state = apply_beam_splitter(ModeState(1.0 + 0j, 0j))
    state = propagate_phases(state, config.r1, config.r2, config.p)
    if config.kind is SetupKind.RECOMBINED:
        state = apply_beam_splitter(state)
    return state


def detection_probabilities(config: SetupConfig) -> ProbabilityPair:
    if config.kind is SetupKind.OPEN_ARMS:
        # each arm carries |1/sqrt 2|^2 after the first splitter, independent of r1, r2, p
        return ProbabilityPair(0.5, 0.5)
    out = output_state(config)
    bright, dark = abs(out.a2) ** 2, abs(out.a1) ** 2
    # renormalize so the pair sums to 1 at floating-point precision
    total = bright + dark
    bright, dark = bright / total, dark / total
    if config.flip_detectors:
        bright, dark = dark, bright
    return ProbabilityPair(bright, dark)
