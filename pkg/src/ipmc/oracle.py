"""Brute-force ground truth by direct path enumeration.

Everything in this module works from the definitional semantics: paths are
enumerated explicitly, their probabilities are products of one-step
transition probabilities, and query values are sums over paths.  Imprecise
bounds are obtained by enumerating *every* assignment of a row vertex to
each (state, time step) pair, so time-inhomogeneous behaviour is covered;
nothing here shares code with the backward recursions it is meant to
check.

The enumeration explodes quickly and is guarded; this is a test oracle,
not an inference engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    ExplosionGuardError,
    ImpreciseModelError,
    MissingRewardsError,
    NegativeBudgetError,
    NegativeHorizonError,
)

#: Cap on |S|**(horizon+1) for plain path enumeration.
PATH_GUARD = 1_000_000

#: Cap on (number of vertex assignments) x (number of paths).
WORK_GUARD = 2_000_000

QUERIES = ("hitting", "conditional-hitting", "expected-reward", "bounded-reward")


@dataclass(frozen=True)
class WeightedPath:
    """A state sequence together with its (positive) probability."""

    states: tuple
    probability: float


def path_reward(rewards, path, t) -> int:
    """Cumulative reward of ``path`` over positions 0..t, both inclusive."""
    if t < 0 or t >= len(path):
        raise IndexError(f"position {t} outside path of length {len(path)}")
    return int(sum(rewards[s] for s in path[: t + 1]))


def _as_step_matrices(model, matrices, horizon):
    if matrices is not None:
        matrices = [np.asarray(m, dtype=float) for m in matrices]
        if len(matrices) == 1:
            matrices = matrices * horizon
        if len(matrices) != horizon and horizon > 0:
            raise ValueError(f"need {horizon} step matrices, got {len(matrices)}")
        return matrices
    if not model.is_precise:
        raise ImpreciseModelError(
            "path enumeration needs a precise model or explicit step matrices"
        )
    return [model.matrix] * horizon


def enumerate_paths(model, start, horizon, matrices=None,
                    guard=PATH_GUARD):
    """All positive-probability paths of length ``horizon`` from ``start``.

    ``matrices`` may supply an explicit transition matrix per time step
    (one entry is recycled across steps); otherwise the model must be
    precise.  Probabilities are exact products and sum to one.
    """
    if horizon < 0:
        raise NegativeHorizonError(f"horizon {horizon} is negative")
    space = model.space
    if len(space) ** (horizon + 1) > guard:
        raise ExplosionGuardError(
            f"{len(space)}^{horizon + 1} potential paths exceed the guard"
        )
    steps = _as_step_matrices(model, matrices, horizon)
    start_idx = space.position(start)

    paths = []

    def extend(prefix, probability, depth):
        if depth == horizon:
            paths.append(
                WeightedPath(tuple(space.states[i] for i in prefix), probability)
            )
            return
        row = steps[depth][prefix[-1]]
        for nxt in np.flatnonzero(row > 0.0):
            extend(prefix + [int(nxt)], probability * float(row[nxt]), depth + 1)

    extend([start_idx], 1.0, 0)
    return paths


# ---------------------------------------------------------------------------
# query statistics, per enumerated path


def _first_qualifying_time(path_idx, keep_mask, goal_mask):
    """First position in the goal set with every earlier position allowed."""
    for t, s in enumerate(path_idx):
        if goal_mask[s]:
            return t
        if not keep_mask[s]:
            return None
    return None


def _path_statistic(path_idx, query, params):
    if query == "hitting":
        t = params["horizon"]
        return 1.0 if any(params["targets"][s] for s in path_idx[: t + 1]) else 0.0
    if query == "conditional-hitting":
        hit = _first_qualifying_time(
            path_idx[: params["horizon"] + 1], params["phi1"], params["phi2"]
        )
        return 0.0 if hit is None else 1.0
    if query == "expected-reward":
        rewards = params["rewards"]
        stop = params["horizon"]
        for t, s in enumerate(path_idx[: params["horizon"] + 1]):
            if params["phi"][s]:
                stop = t
                break
        return float(sum(rewards[s] for s in path_idx[: stop + 1]))
    if query == "bounded-reward":
        hit = _first_qualifying_time(
            path_idx[: params["horizon"] + 1], params["phi1"], params["phi2"]
        )
        if hit is None:
            return 0.0
        spent = sum(params["rewards"][s] for s in path_idx[: hit + 1])
        return 1.0 if spent <= params["budget"] else 0.0
    raise ValueError(f"unknown query {query!r}")


def _normalize_query(model, query, horizon, targets, phi1, phi2, budget):
    if query not in QUERIES:
        raise ValueError(f"unknown query {query!r}; expected one of {QUERIES}")
    horizon = model.horizon if horizon is None else int(horizon)
    if horizon < 0:
        raise NegativeHorizonError(f"horizon {horizon} is negative")
    params = {"horizon": horizon}
    if query == "hitting":
        params["targets"] = model.space.mask(targets)
    if query in ("conditional-hitting", "bounded-reward"):
        params["phi1"] = model.space.mask(phi1)
        params["phi2"] = model.space.mask(phi2)
    if query in ("expected-reward", "bounded-reward"):
        if model.rewards is None:
            raise MissingRewardsError("model declares no rewards")
        params["rewards"] = model.rewards
    if query == "expected-reward":
        params["phi"] = model.space.mask(targets)
    if query == "bounded-reward":
        if budget is None or budget < 0:
            raise NegativeBudgetError(f"budget {budget!r} must be >= 0")
        params["budget"] = int(budget)
    return horizon, params


# ---------------------------------------------------------------------------
# enumeration over vertex assignments


def _row_vertex_matrices(model, vertex_cap):
    """Per-row arrays of vertex weight vectors; intervals are expanded."""
    out = []
    for row in model.rows:
        verts = row.vertices(cap=vertex_cap)
        out.append(np.vstack([p.weights for p in verts]))
    return out


def _union_support_paths(start_idx, supports, horizon):
    """Index paths positive under at least one vertex assignment."""
    paths = []

    def extend(prefix, depth):
        if depth == horizon:
            paths.append(tuple(prefix))
            return
        for nxt in np.flatnonzero(supports[prefix[-1]]):
            extend(prefix + [int(nxt)], depth + 1)

    extend([start_idx], 0)
    return np.array(paths, dtype=np.int64).reshape(len(paths), horizon + 1)


def _selection_values(model, paths, horizon, stats, vertex_cap,
                      guard, stationary):
    """Query values for every vertex assignment; returns (count, per-query min/max).

    ``paths`` is the index-path array the rows of ``stats`` refer to;
    ``stats`` holds one per-path statistic column per query.  The return
    value is a pair of arrays holding, per query, the smallest and largest
    expectation over all assignments.
    """
    n_states = len(model.space)
    rows = _row_vertex_matrices(model, vertex_cap)
    counts = [len(r) for r in rows]

    per_step = int(np.prod(counts, dtype=np.int64))
    assignments = per_step if stationary or horizon <= 1 else per_step ** horizon
    if assignments * max(len(paths), 1) > guard:
        raise ExplosionGuardError(
            f"{assignments} vertex assignments x {len(paths)} paths "
            f"exceed the work guard of {guard}"
        )

    vmax = max(counts)
    padded = np.zeros((n_states, vmax, n_states))
    for s, r in enumerate(rows):
        padded[s, : len(r)] = r

    steprows = paths[:, :-1]
    stepcols = paths[:, 1:]
    tau = np.arange(horizon)[None, :]

    lo = np.full(stats.shape[1], np.inf)
    hi = np.full(stats.shape[1], -np.inf)

    if horizon == 0:
        value = stats[0] if len(paths) else np.zeros(stats.shape[1])
        return 1, (value.copy(), value.copy())

    per_state_choices = [range(c) for c in counts]
    if stationary:
        combos = (
            np.tile(np.asarray(c, dtype=np.int64), (horizon, 1))
            for c in itertools.product(*per_state_choices)
        )
    else:
        combos = (
            np.asarray(c, dtype=np.int64).reshape(horizon, n_states)
            for c in itertools.product(*(per_state_choices * horizon))
        )

    total = 0
    for choice in combos:
        chosen = choice[tau, steprows]
        probs = padded[steprows, chosen, stepcols].prod(axis=1)
        values = probs @ stats
        np.minimum(lo, values, out=lo)
        np.maximum(hi, values, out=hi)
        total += 1
    return total, (lo, hi)


def brute_force(model, query, start, *, targets=None, phi1=None, phi2=None,
                horizon=None, budget=None, guard=WORK_GUARD,
                vertex_cap=12, stationary=False):
    """Definitional value of a query from ``start``.

    Returns a float for precise models and a ``(lower, upper)`` pair for
    imprecise ones, obtained by exhausting all per-(state, step) vertex
    assignments.  ``stationary=True`` restricts the assignments to
    time-constant ones, which in general yields a narrower (non-exact)
    envelope; it exists to demonstrate that distinction.
    """
    results = brute_force_many(
        model,
        [dict(query=query, targets=targets, phi1=phi1, phi2=phi2,
              horizon=horizon, budget=budget)],
        start,
        guard=guard,
        vertex_cap=vertex_cap,
        stationary=stationary,
    )
    return results[0]


def brute_force_many(model, queries, start, *, guard=WORK_GUARD,
                     vertex_cap=12, stationary=False):
    """Evaluate several queries in one enumeration pass.

    ``queries`` is a list of dicts with keys ``query`` plus the relevant
    parameters of :func:`brute_force`.  All queries must share a horizon.
    """
    horizons = set()
    normalized = []
    for q in queries:
        horizon, params = _normalize_query(
            model, q["query"], q.get("horizon"), q.get("targets"),
            q.get("phi1"), q.get("phi2"), q.get("budget"),
        )
        horizons.add(horizon)
        normalized.append((q["query"], params))
    if len(horizons) != 1:
        raise ValueError("all queries in one pass must share a horizon")
    horizon = horizons.pop()

    space = model.space
    start_idx = space.position(start)
    if model.is_precise:
        paths = enumerate_paths(model, start, horizon, guard=guard)
        index = {s: i for i, s in enumerate(space.states)}
        out = []
        for query, params in normalized:
            value = sum(
                p.probability
                * _path_statistic([index[s] for s in p.states], query, params)
                for p in paths
            )
            out.append(float(value))
        return out

    supports = [row.upper > 0.0 for row in model.rows]
    paths = _union_support_paths(start_idx, supports, horizon)
    stats = np.array(
        [
            [_path_statistic(list(p), query, params) for query, params in normalized]
            for p in paths
        ],
        dtype=float,
    )
    _, (lo, hi) = _selection_values(
        model, paths, horizon, stats, vertex_cap, guard, stationary
    )
    return [(float(l), float(h)) for l, h in zip(lo, hi)]


def monte_carlo_estimate(model, query, start, *, targets=None, phi1=None,
                         phi2=None, horizon=None, budget=None, samples=500,
                         seed=None, vertex_cap=12):
    """Sampled envelope of a query value under random vertex assignments.

    A spot-check helper only: the returned ``(low, high)`` pair is inside
    the true bounds with equality only in the limit.  Never used by the
    test suite's assertions.
    """
    horizon, params = _normalize_query(
        model, query, horizon, targets, phi1, phi2, budget
    )
    rng = np.random.default_rng(seed)
    rows = _row_vertex_matrices(model, vertex_cap)
    space = model.space
    start_idx = space.position(start)
    supports = [np.any(r > 0.0, axis=0) for r in rows]
    paths = _union_support_paths(start_idx, supports, horizon)
    stats = np.array(
        [_path_statistic(list(p), query, params) for p in paths], dtype=float
    )

    lo, hi = np.inf, -np.inf
    for _ in range(samples):
        matrices = [
            np.vstack([r[rng.integers(len(r))] for r in rows])
            for _ in range(max(horizon, 1))
        ]
        value = 0.0
        for p, stat in zip(paths, stats):
            prob = 1.0
            for t in range(horizon):
                prob *= matrices[t][p[t], p[t + 1]]
                if prob == 0.0:
                    break
            value += prob * stat
        lo = min(lo, value)
        hi = max(hi, value)
    return float(lo), float(hi)
