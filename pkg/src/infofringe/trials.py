"""Monte Carlo detector clicks, frequency estimates and delayed-choice runs.

Each trial draws one uniform deviate ``u_t`` from the counter-based stream
and clicks detector 1 iff ``u_t < P1``.  Because ``u_t`` depends only on the
seed and the trial id, splitting a run across workers never changes it.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import stats

from .exceptions import DomainError
from .geometry import FringeLaw, KSelection, Sign, choose_k, closed_form_fringe, statistical_distance
from .oracle import SetupConfig, SetupKind, detection_probabilities
from .pairs import ProbabilityPair
from .rng import CLICK_STREAM, POLICY_STREAM, check_seed, uniforms

DEFAULT_CHUNK = 1 << 18


def outcome_probability(config: SetupConfig, law: Optional[FringeLaw] = None) -> float:
    """Probability that detector 1 clicks for one trial of ``config``.

    An explicit ``law`` overrides the preparation for the recombined
    arrangement.  Otherwise a preparation without a length scale gives the
    deterministic ``k = 0`` law, and any other preparation is sampled from
    the amplitude oracle (which realizes ``k = p``).
    """
    if config.kind is SetupKind.OPEN_ARMS:
        return 0.5
    if law is not None:
        return float(law.evaluate(config.x))
    if choose_k(config).kind is KSelection.DETERMINISTIC:
        sign = Sign.MINUS if config.flip_detectors else Sign.PLUS
        return float(closed_form_fringe(0.0, sign).evaluate(config.x))
    return detection_probabilities(config).p1


@dataclass(frozen=True)
class ClickRecord:
    trial_id: int
    x: float
    setup_kind: SetupKind
    outcome: int
    delayed_choice: bool = False


@dataclass(frozen=True, eq=False)
class ClickStream:
    """Columnar store of click records; iterate to get :class:`ClickRecord` objects."""

    trial_id: np.ndarray
    x: np.ndarray
    recombined: np.ndarray
    outcome: np.ndarray
    delayed_choice: np.ndarray

    def __len__(self):
        return len(self.trial_id)

    def __iter__(self):
        for t, x, rec, out, dc in zip(
            self.trial_id, self.x, self.recombined, self.outcome, self.delayed_choice
        ):
            kind = SetupKind.RECOMBINED if rec else SetupKind.OPEN_ARMS
            yield ClickRecord(int(t), float(x), kind, int(out), bool(dc))

    def counts(self, kind: Optional[SetupKind] = None) -> tuple:
        """``(n1, n2)`` over all trials, or over trials run in arrangement ``kind``."""
        mask = np.ones(len(self), dtype=bool)
        if kind is not None:
            mask = self.recombined == (SetupKind(kind) is SetupKind.RECOMBINED)
        n1 = int(np.count_nonzero(self.outcome[mask] == 1))
        return n1, int(np.count_nonzero(mask)) - n1

    def to_csv(self, path_or_buf, header=()):
        from .io import write_click_stream

        write_click_stream(self, path_or_buf, header)


@dataclass(frozen=True)
class TrialResult:
    n1: int
    n2: int
    p1: float
    clicks: Optional[ClickStream] = None

    @property
    def n(self) -> int:
        return self.n1 + self.n2


def _chunks(n: int, chunk: int):
    return [(a, min(a + chunk, n)) for a in range(0, n, chunk)]


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_trials(
    config: SetupConfig,
    n: int,
    seed: int,
    law: Optional[FringeLaw] = None,
    record: bool = False,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
    first_trial: int = 0,
) -> TrialResult:
    """Simulate ``n`` single-particle trials of ``config``.

    Trial ids run from ``first_trial``; disjoint id ranges under one seed give
    independent samples (used by sweeps that share a seed).
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    seed = check_seed(seed)
    p1 = outcome_probability(config, law)

    def work(span):
        a, b = span
        hit = uniforms(seed, first_trial + a, b - a, CLICK_STREAM) < p1
        return int(np.count_nonzero(hit)), (hit if record else None)

    parts = _map(work, _chunks(n, chunk), workers)
    n1 = sum(c for c, _ in parts)
    clicks = None
    if record:
        hits = np.concatenate([h for _, h in parts])
        clicks = ClickStream(
            trial_id=np.arange(first_trial, first_trial + n, dtype=np.int64),
            x=np.full(n, config.x),
            recombined=np.full(n, config.kind is SetupKind.RECOMBINED),
            outcome=np.where(hits, 1, 2).astype(np.int8),
            delayed_choice=np.zeros(n, dtype=bool),
        )
    return TrialResult(n1, n - n1, p1, clicks)


@dataclass(frozen=True)
class EmpiricalPair:
    """Observed frequencies with the binomial standard error of ``p1_hat``."""

    pair: ProbabilityPair
    stderr: float
    n: int

    @property
    def p1(self) -> float:
        return self.pair.p1

    @property
    def p2(self) -> float:
        return self.pair.p2

    def sigma(self, p1_true: float) -> float:
        """Binomial standard deviation of ``p1_hat`` if the true value were ``p1_true``."""
        return math.sqrt(p1_true * (1.0 - p1_true) / self.n)

    def z_score(self, p1_true: float) -> float:
        """Deviation from ``p1_true`` in units of :meth:`sigma`.

        A degenerate truth (0 or 1) has zero spread: the score is 0 on an
        exact match and infinite otherwise.
        """
        diff = self.p1 - p1_true
        sd = self.sigma(p1_true)
        if sd == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / sd


def empirical_distribution(n1: int, n2: int) -> EmpiricalPair:
    n1, n2 = int(n1), int(n2)
    if n1 < 0 or n2 < 0:
        raise DomainError("counts must be >= 0")
    n = n1 + n2
    if n == 0:
        raise DomainError("no trials")
    p = n1 / n
    return EmpiricalPair(ProbabilityPair(p, n2 / n), math.sqrt(p * (1.0 - p) / n), n)


def empirical_statistical_distance(counts_a, counts_b) -> float:
    """Statistical distance between the frequency estimates of two count pairs."""
    return statistical_distance(empirical_distribution(*counts_a).pair, empirical_distribution(*counts_b).pair)


def homogeneity_pvalue(count_pairs) -> float:
    """Chi-squared test that all ``(n1, n2)`` rows share one click probability."""
    table = np.asarray(count_pairs, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 2:
        raise DomainError("need at least two (n1, n2) rows")
    if np.any(table.sum(axis=0) == 0):
        # one detector never clicked anywhere: identical rows by construction
        return 1.0
    return float(stats.chi2_contingency(table, correction=False).pvalue)


def _always(kind: SetupKind):
    def policy(trial_ids, policy_seed):
        return np.full(len(trial_ids), kind is SetupKind.RECOMBINED)

    return policy


def _fair_coin(trial_ids, policy_seed):
    trial_ids = np.asarray(trial_ids)
    start = int(trial_ids[0]) if len(trial_ids) else 0
    if len(trial_ids) and not np.array_equal(trial_ids, np.arange(start, start + len(trial_ids))):
        return np.array([uniforms(policy_seed, int(t), 1, POLICY_STREAM)[0] < 0.5 for t in trial_ids])
    return uniforms(policy_seed, start, len(trial_ids), POLICY_STREAM) < 0.5


POLICIES: dict = {
    "always-open": _always(SetupKind.OPEN_ARMS),
    "always-recombined": _always(SetupKind.RECOMBINED),
    "fair-coin": _fair_coin,
}

Policy = Union[str, Callable]


def resolve_policy(policy: Policy) -> Callable:
    if callable(policy):
        return policy
    try:
        return POLICIES[policy]
    except KeyError:
        raise DomainError(f"unknown choice policy {policy!r}; choose from {sorted(POLICIES)}") from None


def delayed_choice_run(
    base: SetupConfig,
    n: int,
    seed: int,
    policy: Policy = "fair-coin",
    policy_seed: Optional[int] = None,
    law: Optional[FringeLaw] = None,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> ClickStream:
    """Trials whose arrangement (open or recombined) is decided per trial.

    ``policy(trial_ids, policy_seed)`` returns a boolean array, True where the
    second beam splitter is inserted.  Policy draws use their own stream, so
    a degenerate policy reproduces :func:`run_trials` click for click.
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    seed = check_seed(seed)
    policy_seed = seed if policy_seed is None else check_seed(policy_seed)
    choose = resolve_policy(policy)
    p_rec = outcome_probability(base.with_kind(SetupKind.RECOMBINED), law)
    p_open = outcome_probability(base.with_kind(SetupKind.OPEN_ARMS), law)

    def work(span):
        a, b = span
        ids = np.arange(a, b, dtype=np.int64)
        recombined = np.asarray(choose(ids, policy_seed), dtype=bool)
        p1 = np.where(recombined, p_rec, p_open)
        hit = uniforms(seed, a, b - a, CLICK_STREAM) < p1
        return recombined, hit

    parts = _map(work, _chunks(n, chunk), workers)
    recombined = np.concatenate([r for r, _ in parts])
    hits = np.concatenate([h for _, h in parts])
    return ClickStream(
        trial_id=np.arange(n, dtype=np.int64),
        x=np.full(n, base.x),
        recombined=recombined,
        outcome=np.where(hits, 1, 2).astype(np.int8),
        delayed_choice=np.ones(n, dtype=bool),
    )
