"""Shared fixtures and random-model machinery for the test suite."""

import numpy as np
import pytest

from ipmc import (
    PMF,
    CredalSet,
    StateSpace,
    TransitionModel,
    bundled_model_path,
    load_model,
)


@pytest.fixture(scope="session")
def channel():
    return load_model(bundled_model_path("channel"))


@pytest.fixture(scope="session")
def channel_rewards():
    return load_model(bundled_model_path("channel_unit_rewards"))


@pytest.fixture(scope="session")
def channel_eps():
    return load_model(bundled_model_path("channel_eps"))


@pytest.fixture(scope="session")
def geriatric_models():
    return {
        name: load_model(bundled_model_path(name))
        for name in ("geriatric_dep1", "geriatric_dep2", "geriatric_dep3",
                     "geriatric_imprecise")
    }


@pytest.fixture
def gap_witness():
    """Imprecise model where only a time-varying row choice attains the
    upper hitting bound: stationary max 0.51 < true upper 0.65."""
    space = StateSpace(["s", "g", "z"])
    rows = [
        CredalSet.from_vertices(space, [[0.0, 0.5, 0.5], [0.7, 0.3, 0.0]]),
        CredalSet.from_pmf(PMF(space, [0.0, 1.0, 0.0])),
        CredalSet.from_pmf(PMF(space, [0.0, 0.0, 1.0])),
    ]
    return TransitionModel(space, rows, horizon=2)


# ---------------------------------------------------------------------------
# random models for the oracle-equivalence and property suites


def random_pmf_weights(rng, n, allow_sparse=True):
    weights = rng.dirichlet(np.ones(n))
    if allow_sparse and n > 1:
        drop = rng.random(n) < 0.35
        if drop.all():
            drop[rng.integers(n)] = False
        weights = np.where(drop, 0.0, weights)
        weights = weights / weights.sum()
    return weights


def random_precise_model(rng, max_states=5, max_horizon=5, max_reward=3):
    n = int(rng.integers(2, max_states + 1))
    space = StateSpace([f"s{i}" for i in range(n)])
    rows = [
        CredalSet.from_pmf(PMF(space, random_pmf_weights(rng, n)))
        for _ in range(n)
    ]
    rewards = rng.integers(0, max_reward + 1, size=n)
    horizon = int(rng.integers(0, max_horizon + 1))
    return TransitionModel(space, rows, rewards=rewards, horizon=horizon)


def random_imprecise_model(rng, max_reward=3):
    """Small imprecise model whose full vertex-assignment enumeration stays
    within the oracle work guard."""
    if rng.random() < 0.3:
        # one interval row on a three-state space
        n = 3
        space = StateSpace([f"s{i}" for i in range(n)])
        rows = []
        interval_at = int(rng.integers(n))
        for i in range(n):
            if i == interval_at:
                center = random_pmf_weights(rng, n, allow_sparse=False)
                width = rng.uniform(0.0, 0.25, size=n)
                lower = np.clip(center - width, 0.0, 1.0)
                upper = np.clip(center + width, 0.0, 1.0)
                rows.append(CredalSet.from_intervals(space, lower, upper))
            else:
                rows.append(CredalSet.from_pmf(PMF(space, random_pmf_weights(rng, n))))
        horizon = int(rng.integers(1, 4))
    else:
        # one or two explicit vertex rows
        n = int(rng.integers(2, 5))
        space = StateSpace([f"s{i}" for i in range(n)])
        n_credal = int(rng.integers(1, 3))
        credal_rows = set(rng.choice(n, size=min(n_credal, n), replace=False).tolist())
        rows = []
        for i in range(n):
            if i in credal_rows:
                k = int(rng.integers(2, 4))
                pmfs = [random_pmf_weights(rng, n) for _ in range(k)]
                rows.append(CredalSet.from_vertices(space, pmfs))
            else:
                rows.append(CredalSet.from_pmf(PMF(space, random_pmf_weights(rng, n))))
        horizon = int(rng.integers(1, 4))
    rewards = rng.integers(0, max_reward + 1, size=len(space))
    return TransitionModel(space, rows, rewards=rewards, horizon=horizon)


def random_subset(rng, space, allow_empty=False):
    mask = rng.random(len(space)) < 0.5
    if not allow_empty and not mask.any():
        mask[rng.integers(len(space))] = True
    return frozenset(s for s, m in zip(space.states, mask) if m)
