"""Finite-state probability primitives: mass functions, credal sets, bounds.

A credal set is a closed convex set of probability mass functions over a
common finite state space.  Two concrete representations are supported:

* an explicit list of vertices (extreme mass functions), and
* per-state probability intervals ``lower(s) <= P(s) <= upper(s)``.

Lower and upper expectations are exact in both representations: a maximum
over vertices in the first case, a greedy mass allocation (equal to the
linear-programming optimum for coherent intervals) in the second.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import (
    EpsOutOfRangeError,
    IncoherentCredalSetError,
    NegativeWeightError,
    NotNormalizedError,
    StateSpaceTooLargeError,
    UnknownStateError,
)

#: Tolerance used when validating normalization and interval coherence.
NORMALIZATION_TOL = 1e-9

#: Default cap on the state-space size for interval vertex enumeration.
VERTEX_CAP = 12


class StateSpace:
    """Ordered, non-empty set of distinct state identifiers."""

    __slots__ = ("states", "index")

    def __init__(self, states):
        states = tuple(str(s) for s in states)
        if not states:
            raise ValueError("state space must be non-empty")
        if len(set(states)) != len(states):
            raise ValueError("state identifiers must be unique")
        self.states = states
        self.index = {s: i for i, s in enumerate(states)}

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __eq__(self, other):
        return isinstance(other, StateSpace) and self.states == other.states

    def __hash__(self):
        return hash(self.states)

    def __repr__(self):
        return f"StateSpace({list(self.states)!r})"

    def position(self, state) -> int:
        try:
            return self.index[state]
        except KeyError:
            raise UnknownStateError(f"unknown state {state!r}") from None

    def mask(self, subset) -> np.ndarray:
        """Boolean membership vector for a collection of state identifiers."""
        if isinstance(subset, np.ndarray) and subset.dtype == bool:
            if subset.shape != (len(self),):
                raise UnknownStateError("boolean mask has wrong length")
            return subset.copy()
        out = np.zeros(len(self), dtype=bool)
        for s in subset:
            out[self.position(s)] = True
        return out


def _frozen(array) -> np.ndarray:
    arr = np.array(array, dtype=float)
    arr.setflags(write=False)
    return arr


class PMF:
    """Probability mass function over a :class:`StateSpace`.

    Weights must be non-negative and sum to one within ``NORMALIZATION_TOL``.
    """

    __slots__ = ("space", "weights")

    def __init__(self, space: StateSpace, weights):
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(space),):
            raise ValueError(
                f"expected {len(space)} weights, got shape {weights.shape}"
            )
        if np.any(weights < -NORMALIZATION_TOL):
            bad = space.states[int(np.argmin(weights))]
            raise NegativeWeightError(f"negative weight for state {bad!r}")
        total = float(weights.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NotNormalizedError(f"weights sum to {total!r}, expected 1")
        self.space = space
        self.weights = _frozen(np.clip(weights, 0.0, 1.0))

    def __call__(self, state) -> float:
        return float(self.weights[self.space.position(state)])

    def expectation(self, f) -> float:
        return float(np.dot(self.weights, np.asarray(f, dtype=float)))

    def support(self):
        """States carrying strictly positive mass."""
        return tuple(
            s for s, w in zip(self.space.states, self.weights) if w > NORMALIZATION_TOL
        )

    def __eq__(self, other):
        return (
            isinstance(other, PMF)
            and self.space == other.space
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self):
        pairs = ", ".join(
            f"{s}: {w:g}" for s, w in zip(self.space.states, self.weights)
        )
        return f"PMF({{{pairs}}})"


def make_pmf(space: StateSpace, weights) -> PMF:
    """Validate a weight vector into a :class:`PMF`."""
    return PMF(space, weights)


def _check_intervals(space, lower, upper):
    if lower.shape != (len(space),) or upper.shape != (len(space),):
        raise ValueError("interval bounds must match the state-space size")
    if np.any(lower < -NORMALIZATION_TOL) or np.any(upper > 1.0 + NORMALIZATION_TOL):
        raise IncoherentCredalSetError("interval bounds must lie in [0, 1]")
    if np.any(upper - lower < -NORMALIZATION_TOL):
        bad = space.states[int(np.argmin(upper - lower))]
        raise IncoherentCredalSetError(f"lower bound exceeds upper for {bad!r}")
    if lower.sum() > 1.0 + NORMALIZATION_TOL or upper.sum() < 1.0 - NORMALIZATION_TOL:
        raise IncoherentCredalSetError(
            f"no mass function fits: sum(lower)={lower.sum():g}, "
            f"sum(upper)={upper.sum():g}"
        )


class CredalSet:
    """Closed convex set of PMFs, given by vertices or per-state intervals."""

    __slots__ = ("space", "kind", "_vertices", "_matrix", "lower", "upper")

    def __init__(self, *, space, kind, vertices=None, lower=None, upper=None):
        self.space = space
        self.kind = kind
        if kind == "vertices":
            if not vertices:
                raise ValueError("vertex list must be non-empty")
            self._vertices = tuple(vertices)
            self._matrix = _frozen(np.vstack([p.weights for p in self._vertices]))
            self.lower = _frozen(self._matrix.min(axis=0))
            self.upper = _frozen(self._matrix.max(axis=0))
        elif kind == "intervals":
            lower = np.asarray(lower, dtype=float)
            upper = np.asarray(upper, dtype=float)
            _check_intervals(space, lower, upper)
            lower = np.clip(lower, 0.0, 1.0)
            upper = np.clip(upper, 0.0, 1.0)
            self._vertices = None
            self._matrix = None
            self.lower = _frozen(lower)
            self.upper = _frozen(np.maximum(lower, upper))
        else:
            raise ValueError(f"unknown representation {kind!r}")

    # -- constructors --------------------------------------------------

    @classmethod
    def from_vertices(cls, space: StateSpace, pmfs) -> "CredalSet":
        pmfs = [p if isinstance(p, PMF) else PMF(space, p) for p in pmfs]
        for p in pmfs:
            if p.space != space:
                raise ValueError("vertex defined over a different state space")
        return cls(space=space, kind="vertices", vertices=pmfs)

    @classmethod
    def from_pmf(cls, pmf: PMF) -> "CredalSet":
        """Singleton set: a precise transition row."""
        return cls(space=pmf.space, kind="vertices", vertices=[pmf])

    @classmethod
    def from_intervals(cls, space: StateSpace, lower, upper) -> "CredalSet":
        return cls(space=space, kind="intervals", lower=lower, upper=upper)

    # -- structure -----------------------------------------------------

    @property
    def is_singleton(self) -> bool:
        if self.kind == "vertices":
            if len(self._vertices) == 1:
                return True
            return bool(
                np.all(self.upper - self.lower <= NORMALIZATION_TOL)
            )
        return bool(np.all(self.upper - self.lower <= NORMALIZATION_TOL))

    def singleton_pmf(self) -> PMF:
        """The unique element of a singleton set."""
        if not self.is_singleton:
            raise ValueError("credal set is not a singleton")
        if self.kind == "vertices":
            return self._vertices[0]
        mid = (self.lower + self.upper) / 2.0
        return PMF(self.space, mid / mid.sum())

    def vertices(self, cap: int = VERTEX_CAP):
        """All extreme points of the set.

        Interval sets are enumerated; the space size must not exceed ``cap``.
        """
        if self.kind == "vertices":
            return list(self._vertices)
        return vertices_from_intervals(self.space, self.lower, self.upper, cap=cap)

    # -- expectation bounds ---------------------------------------------

    def upper_expectation(self, f) -> float:
        """sup of the expectation of ``f`` over the set."""
        f = np.asarray(f, dtype=float)
        if self.kind == "vertices":
            return float(np.max(self._matrix @ f))
        return _interval_upper(self.lower, self.upper, f)

    def lower_expectation(self, f) -> float:
        """inf of the expectation of ``f``; conjugate of the upper bound."""
        return -self.upper_expectation(-np.asarray(f, dtype=float))

    def __repr__(self):
        if self.kind == "vertices":
            return f"CredalSet(vertices={len(self._vertices)})"
        pairs = ", ".join(
            f"{s}: [{lo:g}, {hi:g}]"
            for s, lo, hi in zip(self.space.states, self.lower, self.upper)
        )
        return f"CredalSet({{{pairs}}})"


def _interval_upper(lower, upper, f) -> float:
    # Continuous-knapsack allocation: states get their upper bound in
    # decreasing order of f until the unit of mass runs out; ties broken
    # by state order for determinism.  Optimal for box-plus-simplex sets.
    order = np.argsort(-f, kind="stable")
    p = lower.astype(float).copy()
    slack = 1.0 - float(p.sum())
    for i in order:
        if slack <= 0.0:
            break
        take = min(float(upper[i] - lower[i]), slack)
        p[i] += take
        slack -= take
    return float(np.dot(p, f))


def linear_vacuous(center: PMF, eps: float, support=None) -> CredalSet:
    """Contaminate ``center`` with an ``eps`` fraction of arbitrary mass.

    Produces the interval set ``[(1-eps)*c(s), (1-eps)*c(s) + eps]`` on the
    given support (default: the center's own support).  States off the
    support keep probability zero, so impossible transitions stay
    impossible.
    """
    if not 0.0 <= eps <= 1.0:
        raise EpsOutOfRangeError(f"contamination level {eps!r} outside [0, 1]")
    space = center.space
    if support is None:
        support_mask = center.weights > NORMALIZATION_TOL
    else:
        support_mask = space.mask(support)
        off = ~support_mask & (center.weights > NORMALIZATION_TOL)
        if np.any(off):
            bad = space.states[int(np.argmax(off))]
            raise ValueError(f"center puts mass on {bad!r} outside the support")
    lower = np.where(support_mask, (1.0 - eps) * center.weights, 0.0)
    upper = np.where(support_mask, (1.0 - eps) * center.weights + eps, 0.0)
    return CredalSet.from_intervals(space, lower, np.clip(upper, 0.0, 1.0))


def vertices_from_intervals(space, lower, upper, cap: int = VERTEX_CAP):
    """Complete list of extreme points of an interval credal set.

    Every extreme point sits at a bound on all but at most one state, so it
    suffices to pick a pivot state, clamp the rest to a lower/upper pattern
    and give the pivot whatever mass is left.  Exponential in the space
    size, hence the ``cap``.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    _check_intervals(space, lower, upper)
    n = len(space)
    if n > cap:
        raise StateSpaceTooLargeError(
            f"vertex enumeration over {n} states exceeds the cap of {cap}"
        )
    if n == 1:
        return [PMF(space, [1.0])]

    seen = {}
    for pivot in range(n):
        others = [j for j in range(n) if j != pivot]
        for pattern in itertools.product((False, True), repeat=n - 1):
            p = np.empty(n)
            for j, hi in zip(others, pattern):
                p[j] = upper[j] if hi else lower[j]
            p[pivot] = 0.0
            residual = 1.0 - p.sum()
            if residual < lower[pivot] - NORMALIZATION_TOL:
                continue
            if residual > upper[pivot] + NORMALIZATION_TOL:
                continue
            # keep the exact residual so the vertex stays normalized;
            # feasibility was already checked within tolerance
            p[pivot] = residual
            key = tuple(np.round(p, 12))
            if key not in seen:
                seen[key] = PMF(space, p)
    return list(seen.values())
