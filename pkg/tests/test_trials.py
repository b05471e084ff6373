import math

import numpy as np
import pytest

from infofringe import (
    ClickRecord,
    DomainError,
    SetupConfig,
    SetupKind,
    closed_form_fringe,
    delayed_choice_run,
    empirical_distribution,
    empirical_statistical_distance,
    run_trials,
)
from infofringe.rng import uniforms
from infofringe.trials import homogeneity_pvalue, outcome_probability

OPEN = SetupKind.OPEN_ARMS


def sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


# -- generator ----------------------------------------------------------------

def test_uniforms_are_counter_addressed():
    full = uniforms(42, 0, 1000)
    for start in (0, 1, 3, 4, 5, 17, 999):
        assert np.array_equal(uniforms(42, start, 1000 - start), full[start:])
    assert not np.array_equal(uniforms(43, 0, 1000), full)
    assert not np.array_equal(uniforms(42, 0, 1000, stream=1), full)


def test_uniforms_range_and_moments():
    u = uniforms(7, 0, 200_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 4 * math.sqrt(1 / 12 / len(u))


def test_seed_validation():
    with pytest.raises(DomainError):
        uniforms(-1, 0, 1)
    with pytest.raises(DomainError):
        uniforms(2**64, 0, 1)


# -- run_trials ---------------------------------------------------------------

def test_open_arms_frequency():
    n = 10**6
    res = run_trials(SetupConfig(OPEN, r1=3.0, r2=0.2, p=4.0), n, seed=5)
    assert res.n1 + res.n2 == n
    assert abs(res.n1 / n - 0.5) <= 3 * math.sqrt(0.25 / n)


def test_bright_port_is_certain():
    res = run_trials(SetupConfig(r1=2.0, r2=2.0, p=5.0), 10_000, seed=1)
    assert (res.n1, res.n2) == (10_000, 0)


def test_third_of_pi():
    k = 2.0
    cfg = SetupConfig.from_path_difference(math.pi / 3 / k, p=k)
    n = 10**6
    res = run_trials(cfg, n, seed=99)
    assert res.p1 == pytest.approx(0.75, abs=1e-12)
    assert abs(res.n1 / n - 0.75) <= 3 * sigma(0.75, n)


def test_explicit_law_overrides_oracle():
    cfg = SetupConfig.from_path_difference(1.0, p=5.0, scale_prepared="free")
    law = closed_form_fringe(math.pi / 2)
    assert outcome_probability(cfg, law) == pytest.approx(0.5 * (1 + math.cos(math.pi / 2)))


def test_no_scale_is_deterministic():
    for x in (0.0, 0.4, 2.0, 7.0):
        cfg = SetupConfig.from_path_difference(x, p=3.0, scale_prepared="none")
        res = run_trials(cfg, 5000, seed=3)
        assert res.n1 == 5000


def test_reproducible_across_workers_and_chunks():
    cfg = SetupConfig.from_path_difference(0.9, p=1.0)
    a = run_trials(cfg, 100_001, seed=12, record=True)
    b = run_trials(cfg, 100_001, seed=12, record=True, workers=4, chunk=7919)
    assert (a.n1, a.n2) == (b.n1, b.n2)
    assert np.array_equal(a.clicks.outcome, b.clicks.outcome)
    c = run_trials(cfg, 50_001, seed=12, record=True, first_trial=50_000)
    assert np.array_equal(c.clicks.outcome, a.clicks.outcome[50_000:])
    assert c.clicks.trial_id[0] == 50_000


def test_n_must_be_positive():
    with pytest.raises(DomainError):
        run_trials(SetupConfig(), 0, seed=1)


def test_click_records():
    res = run_trials(SetupConfig(OPEN), 10, seed=2, record=True)
    records = list(res.clicks)
    assert len(records) == 10
    assert all(isinstance(r, ClickRecord) and r.outcome in (1, 2) for r in records)
    assert [r.trial_id for r in records] == list(range(10))
    assert res.clicks.counts() == (res.n1, res.n2)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_consistency_bands(seed):
    cfg = SetupConfig.from_path_difference(0.7, p=1.0)
    p = outcome_probability(cfg)
    errors = []
    for n in (10**4, 10**5, 10**6):
        res = run_trials(cfg, n, seed=seed)
        err = abs(res.n1 / n - p)
        assert err <= 4 * sigma(p, n)
        errors.append(err)
    assert errors[-1] < 4 * sigma(p, 10**5)


def test_band_coverage():
    cfg = SetupConfig.from_path_difference(math.pi / 3, p=1.0)
    p, n = 0.75, 10**4
    covered = 0
    for rep in range(100):
        res = run_trials(cfg, n, seed=1000 + rep)
        covered += abs(res.n1 / n - p) <= 3 * sigma(p, n)
    assert covered >= 99


def test_open_arms_independent_of_x():
    rows = []
    for j, x in enumerate(np.linspace(0, 5, 10)):
        res = run_trials(SetupConfig.from_path_difference(x, kind=OPEN, p=2.0), 50_000, seed=300 + j)
        rows.append((res.n1, res.n2))
    assert homogeneity_pvalue(rows) > 0.01


def test_homogeneity_detects_fringe():
    rows = []
    for j, x in enumerate(np.linspace(0, 3, 10)):
        res = run_trials(SetupConfig.from_path_difference(x, p=1.0), 5_000, seed=300 + j)
        rows.append((res.n1, res.n2))
    assert homogeneity_pvalue(rows) < 1e-6
    assert homogeneity_pvalue([(5, 0), (7, 0)]) == 1.0


# -- empirical distribution -------------------------------------------------------

def test_empirical_examples():
    e = empirical_distribution(750_000, 250_000)
    assert e.p1 == 0.75
    assert e.stderr == pytest.approx(4.33e-4, abs=1e-6)
    e = empirical_distribution(0, 1234)
    assert (e.p1, e.stderr) == (0.0, 0.0)
    assert empirical_distribution(321, 321).p1 == 0.5
    with pytest.raises(DomainError):
        empirical_distribution(0, 0)
    with pytest.raises(DomainError):
        empirical_distribution(-1, 3)


def test_z_scores():
    e = empirical_distribution(510, 490)
    assert e.z_score(0.5) == pytest.approx(0.01 / math.sqrt(0.25 / 1000))
    assert empirical_distribution(0, 10).z_score(0.0) == 0.0
    assert empirical_distribution(1, 9).z_score(0.0) == math.inf


def test_empirical_distance():
    assert empirical_statistical_distance((40, 60), (40, 60)) == 0.0
    n = 10**6
    assert empirical_statistical_distance((n, 0), (0, n)) == pytest.approx(math.pi / 2)
    k = 1.0
    a = run_trials(SetupConfig.from_path_difference(0.0, p=k), n, seed=8)
    b = run_trials(SetupConfig.from_path_difference(math.pi / 2, p=k), n, seed=9)
    d = empirical_statistical_distance((a.n1, a.n2), (b.n1, b.n2))
    assert abs(d - math.pi / 4) < 0.01
    with pytest.raises(DomainError):
        empirical_statistical_distance((0, 0), (1, 1))


# -- delayed choice ---------------------------------------------------------------

def test_always_recombined_reduces_to_run_trials():
    base = SetupConfig.from_path_difference(1.1, p=1.0)
    stream = delayed_choice_run(base, 20_000, seed=4, policy="always-recombined")
    plain = run_trials(base, 20_000, seed=4, record=True)
    assert np.array_equal(stream.outcome, plain.clicks.outcome)
    assert stream.counts(OPEN) == (0, 0)
    assert all(r.delayed_choice for r in list(stream)[:5])


def test_fair_coin_conditional_laws():
    base = SetupConfig.from_path_difference(math.pi, p=1.0)
    n = 2 * 10**6
    stream = delayed_choice_run(base, n, seed=21, policy="fair-coin", policy_seed=22)
    n1, n2 = stream.counts(SetupKind.RECOMBINED)
    assert n1 == 0  # dark port at k x = pi
    o1, o2 = stream.counts(OPEN)
    assert abs(o1 / (o1 + o2) - 0.5) <= 3 * sigma(0.5, o1 + o2)
    assert abs((n1 + n2) / n - 0.5) <= 3 * sigma(0.5, n)


def test_always_open_is_x_independent():
    rows = []
    for j, x in enumerate(np.linspace(0, 6, 10)):
        stream = delayed_choice_run(SetupConfig.from_path_difference(x, p=1.0), 20_000, seed=50 + j, policy="always-open")
        rows.append(stream.counts(OPEN))
    assert homogeneity_pvalue(rows) > 0.01


def test_policy_is_deterministic_and_worker_independent():
    base = SetupConfig.from_path_difference(0.5, p=2.0)
    a = delayed_choice_run(base, 30_000, seed=1, policy_seed=2)
    b = delayed_choice_run(base, 30_000, seed=1, policy_seed=2, workers=3, chunk=1000)
    assert np.array_equal(a.recombined, b.recombined) and np.array_equal(a.outcome, b.outcome)
    c = delayed_choice_run(base, 30_000, seed=1, policy_seed=3)
    assert not np.array_equal(a.recombined, c.recombined)


def test_custom_and_unknown_policy():
    base = SetupConfig.from_path_difference(0.0, p=1.0)
    stream = delayed_choice_run(base, 100, seed=1, policy=lambda ids, s: ids % 2 == 0)
    assert np.array_equal(stream.recombined, np.arange(100) % 2 == 0)
    with pytest.raises(DomainError):
        delayed_choice_run(base, 10, seed=1, policy="sometimes")
