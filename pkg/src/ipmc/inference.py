"""Transition models and the backward recursions over them.

Everything here works on a :class:`TransitionModel` whose rows are credal
sets (singleton rows make the model precise) and computes value vectors by
backward induction over a finite horizon: hitting probabilities,
conditional hitting probabilities, expected cumulative rewards, and
bounded-reward probabilities.  Each recursion exists in three modes:
precise, lower and upper; the imprecise modes optimize every row locally
at every step, which is exact under epistemic irrelevance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .credal import PMF, CredalSet, StateSpace
from .errors import (
    ImpreciseModelError,
    MissingRewardsError,
    NegativeBudgetError,
    NegativeHorizonError,
    UnknownAtomError,
)


class Mode(enum.Enum):
    """Which bound a recursion computes."""

    PRECISE = "precise"
    LOWER = "lower"
    UPPER = "upper"

    @classmethod
    def from_string(cls, text: str) -> "Mode":
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown mode {text!r}") from None


class TransitionModel:
    """Labelled Markov (reward) model with credal transition rows.

    Parameters
    ----------
    space:
        The ordered state space.
    rows:
        One :class:`CredalSet` per state, in state order.  A singleton row
        is a precise transition distribution.
    labels:
        Per-state sets of atomic propositions, drawn from ``atoms``.
    atoms:
        The declared set of atomic propositions.
    rewards:
        Optional per-state natural-number rewards.
    horizon:
        Number of transitions the model is considered over; unbounded
        until operators are evaluated at this horizon.
    initial:
        Optional start state identifier, or a PMF/CredalSet over states.
    """

    def __init__(self, space, rows, labels=None, atoms=None, rewards=None,
                 horizon=0, initial=None):
        self.space = space
        rows = tuple(rows)
        if len(rows) != len(space):
            raise ValueError("need exactly one transition row per state")
        for row in rows:
            if row.space != space:
                raise ValueError("row defined over a different state space")
        self.rows = rows

        if labels is None:
            labels = [frozenset() for _ in space.states]
        labels = tuple(frozenset(l) for l in labels)
        if len(labels) != len(space):
            raise ValueError("need exactly one label set per state")
        self.atoms = frozenset(atoms) if atoms is not None else frozenset().union(*labels)
        for s, lab in zip(space.states, labels):
            extra = lab - self.atoms
            if extra:
                raise UnknownAtomError(
                    f"state {s!r} labelled with undeclared atoms {sorted(extra)}"
                )
        self.labels = labels

        if rewards is not None:
            rewards = np.asarray(rewards)
            if rewards.shape != (len(space),):
                raise ValueError("need exactly one reward per state")
            if np.any(rewards < 0) or np.any(rewards != np.floor(rewards)):
                raise ValueError("rewards must be non-negative integers")
            rewards = rewards.astype(np.int64)
            rewards.setflags(write=False)
        self.rewards = rewards

        if horizon < 0:
            raise NegativeHorizonError(f"horizon {horizon} is negative")
        self.horizon = int(horizon)

        if isinstance(initial, str):
            space.position(initial)  # validate
        self.initial = initial

    @cached_property
    def is_precise(self) -> bool:
        return all(row.is_singleton for row in self.rows)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Stacked transition matrix; only defined for precise models."""
        if not self.is_precise:
            raise ImpreciseModelError("model has non-singleton rows")
        m = np.vstack([row.singleton_pmf().weights for row in self.rows])
        m.setflags(write=False)
        return m

    def label_mask(self, atom: str) -> np.ndarray:
        if atom not in self.atoms:
            raise UnknownAtomError(f"undeclared atom {atom!r}")
        return np.array([atom in lab for lab in self.labels], dtype=bool)

    def with_rows(self, rows, initial=...) -> "TransitionModel":
        return TransitionModel(
            self.space,
            rows,
            labels=self.labels,
            atoms=self.atoms,
            rewards=self.rewards,
            horizon=self.horizon,
            initial=self.initial if initial is ... else initial,
        )

    def __repr__(self):
        kind = "precise" if self.is_precise else "imprecise"
        return (
            f"TransitionModel({len(self.space)} states, {kind}, "
            f"horizon={self.horizon})"
        )


# ---------------------------------------------------------------------------
# one-step operators


def apply_primal(model: TransitionModel, f) -> np.ndarray:
    """Left product with the transition matrix: pushes a marginal forward.

    Applied to the weight vector of the distribution of the current state,
    this yields the distribution of the next state.  Precise models only.
    """
    if not model.is_precise:
        raise ImpreciseModelError("primal operator needs a precise model")
    f = np.asarray(f, dtype=float)
    return model.matrix.T @ f


def apply_dual(model: TransitionModel, f, mode: Mode = Mode.PRECISE) -> np.ndarray:
    """One-step conditional expectation of ``f``, per starting state.

    In the lower/upper modes each state's row credal set is optimized
    independently, which makes the operator non-linear.
    """
    f = np.asarray(f, dtype=float)
    if model.is_precise:
        # All three modes coincide on singleton rows.
        return model.matrix @ f
    if mode is Mode.PRECISE:
        raise ImpreciseModelError("precise mode needs singleton rows")
    if mode is Mode.UPPER:
        return np.array([row.upper_expectation(f) for row in model.rows])
    return np.array([row.lower_expectation(f) for row in model.rows])


def make_absorbing(model: TransitionModel, targets) -> TransitionModel:
    """Replace the rows of ``targets`` with point masses on themselves."""
    mask = model.space.mask(targets)
    rows = list(model.rows)
    for i in np.flatnonzero(mask):
        point = np.zeros(len(model.space))
        point[i] = 1.0
        rows[i] = CredalSet.from_pmf(PMF(model.space, point))
    return model.with_rows(rows)


# ---------------------------------------------------------------------------
# hitting probabilities


def _check_horizon(horizon):
    if horizon < 0:
        raise NegativeHorizonError(f"horizon {horizon} is negative")


def hitting_trajectory(model, targets, horizon, mode=Mode.PRECISE) -> np.ndarray:
    """Hitting probabilities of ``targets`` for every t = 0..horizon.

    Returns an array of shape ``(horizon + 1, n_states)``; row ``t`` is the
    probability of visiting the target set within ``t`` transitions.
    """
    _check_horizon(horizon)
    inside = model.space.mask(targets)
    outside = ~inside
    h = inside.astype(float)
    out = np.empty((horizon + 1, len(model.space)))
    out[0] = h
    for t in range(1, horizon + 1):
        h = inside + outside * apply_dual(model, h, mode)
        out[t] = h
    return out


def hitting_probabilities(model, targets, horizon, mode=Mode.PRECISE) -> np.ndarray:
    """Probability of visiting ``targets`` within ``horizon`` transitions."""
    return hitting_trajectory(model, targets, horizon, mode)[-1]


def conditional_hitting_trajectory(model, phi1, phi2, horizon,
                                   mode=Mode.PRECISE) -> np.ndarray:
    """Like :func:`hitting_trajectory`, but every state visited before the
    target set must belong to ``phi1``."""
    _check_horizon(horizon)
    goal = model.space.mask(phi2)
    keep = model.space.mask(phi1) & ~goal
    h = goal.astype(float)
    out = np.empty((horizon + 1, len(model.space)))
    out[0] = h
    for t in range(1, horizon + 1):
        h = goal + keep * apply_dual(model, h, mode)
        out[t] = h
    return out


def conditional_hitting(model, phi1, phi2, horizon, mode=Mode.PRECISE) -> np.ndarray:
    """Probability of reaching ``phi2`` within ``horizon`` steps through
    ``phi1`` states only."""
    return conditional_hitting_trajectory(model, phi1, phi2, horizon, mode)[-1]


def next_step_probability(model, phi, mode=Mode.PRECISE) -> np.ndarray:
    """Probability that the next state lies in ``phi``."""
    return apply_dual(model, model.space.mask(phi).astype(float), mode)


# ---------------------------------------------------------------------------
# expected cumulative reward


def _require_rewards(model):
    if model.rewards is None:
        raise MissingRewardsError("model declares no rewards")


def expected_reward_trajectory(model, phi, horizon, mode=Mode.PRECISE) -> np.ndarray:
    """Expected reward accumulated until ``phi`` is entered or time runs out.

    Every visited state contributes its reward, including both the start
    state and the state that enters ``phi`` (or the last state within the
    horizon when ``phi`` is never reached).  With rewards equal to the
    indicator of ``phi`` this reduces exactly to the hitting probability.
    """
    _check_horizon(horizon)
    _require_rewards(model)
    rew = model.rewards.astype(float)
    outside = ~model.space.mask(phi)
    e = rew.copy()
    out = np.empty((horizon + 1, len(model.space)))
    out[0] = e
    for t in range(1, horizon + 1):
        e = rew + outside * apply_dual(model, e, mode)
        out[t] = e
    return out


def expected_cumulative_reward(model, phi, horizon, mode=Mode.PRECISE) -> np.ndarray:
    return expected_reward_trajectory(model, phi, horizon, mode)[-1]


# ---------------------------------------------------------------------------
# bounded-reward probabilities


@dataclass(frozen=True)
class BoundedRewardTable:
    """Bounded-reward probabilities indexed by state and reward budget.

    ``values[s, k]`` is the probability, from state ``s``, of reaching the
    goal set through allowed states while spending at most ``k * scale``
    reward.  ``scale`` is the greatest common divisor of the rewards, which
    the recursion divides out to keep the budget axis short.
    """

    space: StateSpace
    budget: int
    scale: int
    values: np.ndarray

    def at_budget(self, budget: int) -> np.ndarray:
        """Probability vector for an exact budget ``0 <= budget <= self.budget``."""
        if budget < 0:
            raise NegativeBudgetError(f"budget {budget} is negative")
        if budget > self.budget:
            raise ValueError(f"budget {budget} exceeds table budget {self.budget}")
        col = min(budget // self.scale, self.values.shape[1] - 1)
        return self.values[:, col].copy()

    @property
    def final(self) -> np.ndarray:
        return self.values[:, -1].copy()


def bounded_reward_probabilities(model, phi1, phi2, horizon, budget,
                                 mode=Mode.PRECISE,
                                 paper_literal=False) -> BoundedRewardTable:
    """Probability of a ``phi1``-until-``phi2`` event with bounded cost.

    The event: some state within ``horizon`` steps satisfies ``phi2``, all
    earlier states satisfy ``phi1``, and the cumulative reward up to and
    including the satisfying state is at most ``budget``.

    The default recursion deducts the *current* state's reward from the
    budget carried into the next step and treats an overdrawn budget as an
    impossible event; it agrees with direct path enumeration.  With
    ``paper_literal=True`` an alternative published variant is used
    instead, which deducts the successor's reward and scores overdrawn
    budgets as probability one; it is provided for comparison only and is
    documented to disagree with path enumeration.
    """
    _check_horizon(horizon)
    _require_rewards(model)
    if budget < 0:
        raise NegativeBudgetError(f"budget {budget} is negative")
    if int(budget) != budget:
        raise ValueError("budget must be an integer")
    budget = int(budget)

    goal = model.space.mask(phi2)
    keep = model.space.mask(phi1) & ~goal

    if paper_literal:
        rew = model.rewards.copy()
        scale = 1
    else:
        scale = int(np.gcd.reduce(model.rewards))
        if scale == 0:  # all rewards zero: the budget never binds
            scale = max(budget, 1)
        rew = model.rewards // scale
    top = budget // scale
    n_states = len(model.space)

    # column k of x holds the probabilities for budget k (scaled units)
    budgets = np.arange(top + 1)
    affordable = rew[:, None] <= budgets[None, :]
    x = (goal[:, None] & affordable).astype(float)

    for _ in range(horizon):
        new = np.zeros_like(x)
        if paper_literal:
            # Published variant: budget shifted by the successor's reward,
            # overdrawn budgets scored as certain success.
            chi = np.empty_like(x)
            for k in range(top + 1):
                shifted = budgets[k] - rew
                col = np.where(
                    shifted <= 0, 1.0, x[np.arange(n_states), np.maximum(shifted, 0)]
                )
                chi[:, k] = col
            for k in range(top + 1):
                propagated = apply_dual(model, chi[:, k], mode)
                new[:, k] = affordable[:, k] * (goal + keep * propagated)
        else:
            stepped = np.empty_like(x)
            for k in range(top + 1):
                stepped[:, k] = apply_dual(model, x[:, k], mode)
            for s in range(n_states):
                if goal[s]:
                    new[s] = affordable[s]
                elif keep[s]:
                    shifted = budgets - rew[s]
                    ok = shifted >= 0
                    new[s, ok] = stepped[s, shifted[ok]]
        x = new

    values = x
    values.setflags(write=False)
    return BoundedRewardTable(space=model.space, budget=budget, scale=scale,
                              values=values)
