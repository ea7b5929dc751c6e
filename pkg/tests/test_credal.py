"""Probability and credal-set primitives."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ipmc import (
    PMF,
    CredalSet,
    StateSpace,
    linear_vacuous,
    make_pmf,
    vertices_from_intervals,
)
from ipmc.errors import (
    EpsOutOfRangeError,
    IncoherentCredalSetError,
    NegativeWeightError,
    NotNormalizedError,
    StateSpaceTooLargeError,
    UnknownStateError,
)

TOL = 1e-12


def space(n):
    return StateSpace([f"s{i}" for i in range(n)])


class TestStateSpace:
    def test_rejects_empty_and_duplicates(self):
        with pytest.raises(ValueError):
            StateSpace([])
        with pytest.raises(ValueError):
            StateSpace(["a", "a"])

    def test_mask_and_unknown_state(self):
        sp = StateSpace(["a", "b", "c"])
        assert sp.mask({"a", "c"}).tolist() == [True, False, True]
        with pytest.raises(UnknownStateError):
            sp.mask({"nope"})


class TestMakePmf:
    def test_degenerate_row(self):
        p = make_pmf(space(4), [1, 0, 0, 0])
        assert p.weights.tolist() == [1, 0, 0, 0]

    def test_two_state_row(self):
        p = make_pmf(space(2), [0.9, 0.1])
        assert p.expectation([0.0, 1.0]) == pytest.approx(0.1)

    def test_not_normalized(self):
        with pytest.raises(NotNormalizedError):
            make_pmf(space(2), [0.5, 0.6])

    def test_negative_weight(self):
        with pytest.raises(NegativeWeightError):
            make_pmf(space(2), [1.1, -0.1])

    def test_immutable(self):
        p = make_pmf(space(2), [0.5, 0.5])
        with pytest.raises(ValueError):
            p.weights[0] = 0.0


class TestLinearVacuous:
    def test_band_endpoints(self):
        sp = StateSpace(["delivered", "lost"])
        cs = linear_vacuous(PMF(sp, [0.9, 0.1]), 0.01)
        assert cs.lower[1] == pytest.approx(0.099)
        assert cs.upper[1] == pytest.approx(0.109)
        assert cs.lower[0] == pytest.approx(0.891)
        assert cs.upper[0] == pytest.approx(0.901)

    def test_band_endpoints_bigger_eps(self):
        sp = StateSpace(["delivered", "lost"])
        cs = linear_vacuous(PMF(sp, [0.9, 0.1]), 0.03)
        assert cs.lower[1] == pytest.approx(0.097)
        assert cs.upper[1] == pytest.approx(0.127)

    def test_zero_eps_is_point_set(self):
        sp = space(3)
        center = PMF(sp, [0.2, 0.3, 0.5])
        cs = linear_vacuous(center, 0.0)
        assert cs.is_singleton
        assert np.allclose(cs.singleton_pmf().weights, center.weights)

    def test_off_support_stays_impossible(self):
        sp = space(3)
        cs = linear_vacuous(PMF(sp, [0.5, 0.5, 0.0]), 0.2)
        assert cs.lower[2] == 0.0 and cs.upper[2] == 0.0

    def test_eps_out_of_range(self):
        with pytest.raises(EpsOutOfRangeError):
            linear_vacuous(PMF(space(2), [0.5, 0.5]), 1.5)

    def test_center_must_fit_support(self):
        sp = space(3)
        with pytest.raises(ValueError):
            linear_vacuous(PMF(sp, [0.5, 0.5, 0.0]), 0.1, support=["s0"])

    def test_full_contamination_is_vacuous(self):
        sp = space(4)
        cs = linear_vacuous(PMF(sp, [0.25] * 4), 1.0, support=sp.states)
        f = np.array([3.0, -1.0, 7.5, 0.0])
        assert cs.upper_expectation(f) == pytest.approx(7.5)
        assert cs.lower_expectation(f) == pytest.approx(-1.0)


class TestExpectationBounds:
    def test_interval_indicator(self):
        sp = StateSpace(["lost", "delivered"])
        cs = CredalSet.from_intervals(sp, [0.099, 0.891], [0.109, 0.901])
        ind = np.array([1.0, 0.0])
        assert cs.upper_expectation(ind) == pytest.approx(0.109)
        assert cs.lower_expectation(ind) == pytest.approx(0.099)

    def test_singleton_reduces_to_expectation(self):
        sp = space(3)
        p = PMF(sp, [0.2, 0.3, 0.5])
        cs = CredalSet.from_pmf(p)
        f = np.array([1.0, -2.0, 4.0])
        assert cs.upper_expectation(f) == pytest.approx(p.expectation(f))
        assert cs.lower_expectation(f) == pytest.approx(p.expectation(f))

    def test_two_state_interval_optimum(self):
        # vertices are (0.3, 0.7) and (0.5, 0.5); max P(a) is 0.5, min 0.3
        sp = StateSpace(["a", "b"])
        cs = CredalSet.from_intervals(sp, [0.3, 0.5], [0.5, 0.7])
        f = np.array([1.0, 0.0])
        assert cs.upper_expectation(f) == pytest.approx(0.5)
        assert cs.lower_expectation(f) == pytest.approx(0.3)

    def test_incoherent_intervals_rejected(self):
        sp = space(2)
        with pytest.raises(IncoherentCredalSetError):
            CredalSet.from_intervals(sp, [0.6, 0.6], [0.7, 0.7])
        with pytest.raises(IncoherentCredalSetError):
            CredalSet.from_intervals(sp, [0.0, 0.0], [0.3, 0.4])
        with pytest.raises(IncoherentCredalSetError):
            CredalSet.from_intervals(sp, [0.5, 0.2], [0.4, 0.8])


class TestVerticesFromIntervals:
    def test_two_state_band(self):
        sp = StateSpace(["lost", "delivered"])
        verts = vertices_from_intervals(sp, [0.099, 0.891], [0.109, 0.901])
        got = sorted(tuple(np.round(v.weights, 6)) for v in verts)
        assert got == [(0.099, 0.901), (0.109, 0.891)]

    def test_point_intervals_single_vertex(self):
        sp = space(3)
        verts = vertices_from_intervals(sp, [0.2, 0.3, 0.5], [0.2, 0.3, 0.5])
        assert len(verts) == 1
        assert np.allclose(verts[0].weights, [0.2, 0.3, 0.5])

    def test_symmetric_three_state_cube(self):
        sp = space(3)
        verts = vertices_from_intervals(sp, [0.2] * 3, [0.5] * 3)
        assert len(verts) == 6
        for v in verts:
            assert sorted(np.round(v.weights, 6)) == [0.2, 0.3, 0.5]

    def test_cap(self):
        sp = space(13)
        with pytest.raises(StateSpaceTooLargeError):
            vertices_from_intervals(sp, [0.0] * 13, [1.0] * 13)


# ---------------------------------------------------------------------------
# property-based invariants


@st.composite
def coherent_intervals(draw, max_states=6):
    n = draw(st.integers(min_value=2, max_value=max_states))
    center = np.array(
        draw(
            st.lists(
                st.floats(min_value=0.01, max_value=1.0),
                min_size=n, max_size=n,
            )
        )
    )
    center = center / center.sum()
    widths = np.array(
        draw(
            st.lists(
                st.floats(min_value=0.0, max_value=0.5),
                min_size=n, max_size=n,
            )
        )
    )
    lower = np.clip(center - widths, 0.0, 1.0)
    upper = np.clip(center + widths, 0.0, 1.0)
    return StateSpace([f"s{i}" for i in range(n)]), lower, upper


def gambles(n):
    return st.lists(
        st.floats(min_value=-10.0, max_value=10.0),
        min_size=n, max_size=n,
    )


@given(coherent_intervals(), st.data())
@settings(max_examples=150, deadline=None)
def test_greedy_equals_vertex_maximum(intervals, data):
    sp, lower, upper = intervals
    cs = CredalSet.from_intervals(sp, lower, upper)
    f = np.array(data.draw(gambles(len(sp))))
    verts = vertices_from_intervals(sp, lower, upper)
    best = max(v.expectation(f) for v in verts)
    worst = min(v.expectation(f) for v in verts)
    assert cs.upper_expectation(f) == pytest.approx(best, abs=1e-9)
    assert cs.lower_expectation(f) == pytest.approx(worst, abs=1e-9)


@given(coherent_intervals(), st.data())
@settings(max_examples=100, deadline=None)
def test_bound_order_and_conjugacy(intervals, data):
    sp, lower, upper = intervals
    cs = CredalSet.from_intervals(sp, lower, upper)
    f = np.array(data.draw(gambles(len(sp))))
    lo, hi = cs.lower_expectation(f), cs.upper_expectation(f)
    assert lo <= hi + TOL
    assert lo == pytest.approx(-cs.upper_expectation(-f), abs=TOL)


@given(coherent_intervals(), st.data(),
       st.floats(min_value=-5.0, max_value=5.0),
       st.floats(min_value=0.0, max_value=4.0))
@settings(max_examples=100, deadline=None)
def test_constant_additivity_and_homogeneity(intervals, data, shift, scale):
    sp, lower, upper = intervals
    cs = CredalSet.from_intervals(sp, lower, upper)
    f = np.array(data.draw(gambles(len(sp))))
    base = cs.upper_expectation(f)
    assert cs.upper_expectation(f + shift) == pytest.approx(base + shift, abs=1e-9)
    assert cs.upper_expectation(scale * f) == pytest.approx(scale * base, abs=1e-9)


@given(st.integers(min_value=2, max_value=6), st.data())
@settings(max_examples=100, deadline=None)
def test_singleton_bounds_coincide(n, data):
    sp = StateSpace([f"s{i}" for i in range(n)])
    raw = np.array(data.draw(gambles(n)))
    weights = np.abs(raw) + 0.01
    p = PMF(sp, weights / weights.sum())
    cs = CredalSet.from_pmf(p)
    f = np.array(data.draw(gambles(n)))
    assert cs.lower_expectation(f) == pytest.approx(cs.upper_expectation(f), abs=TOL)
    assert cs.upper_expectation(f) == pytest.approx(p.expectation(f), abs=TOL)
