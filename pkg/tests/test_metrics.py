import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moorank.metrics import (
    IntervalSet,
    ScalingParams,
    average_hypervolume,
    confidence_uncertainty,
    hypervolume_2d,
    hypervolume_mc,
    min_max_scale,
)

from .oracles import inclusion_exclusion_hypervolume

REF = (2.0, 2.0)


class TestMinMaxScale:
    def test_two_point_extremes(self):
        scaled, params = min_max_scale([[1.0, 10.0], [3.0, 30.0]])
        np.testing.assert_allclose(scaled, [[0.0, 0.0], [1.0, 1.0]])
        np.testing.assert_allclose(params.mins, [1.0, 10.0])

    def test_single_point_maps_to_zero(self):
        scaled, _ = min_max_scale([[4.0, 5.0]])
        np.testing.assert_allclose(scaled, [[0.0, 0.0]])

    def test_constant_column_maps_to_zero(self):
        scaled, _ = min_max_scale([[1.0, 10.0], [2.0, 10.0], [3.0, 10.0]])
        np.testing.assert_allclose(scaled[:, 1], [0.0, 0.0, 0.0])
        np.testing.assert_allclose(scaled[:, 0], [0.0, 0.5, 1.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            min_max_scale(np.empty((0, 2)))

    def test_shared_params_apply(self):
        _, params = min_max_scale([[0.0, 0.0], [2.0, 4.0]])
        np.testing.assert_allclose(params.apply([[1.0, 2.0]]), [[0.5, 0.5]])

    @given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 30))
    def test_output_in_unit_box(self, seed, n):
        pts = np.random.default_rng(seed).normal(scale=50.0, size=(n, 2))
        scaled, _ = min_max_scale(pts)
        assert np.all(scaled >= 0.0) and np.all(scaled <= 1.0)


class TestHypervolume2d:
    def test_single_rectangle(self):
        assert hypervolume_2d([[0.5, 0.5]], REF).value == pytest.approx(2.25)

    def test_inclusion_exclusion_of_two_boxes(self):
        assert hypervolume_2d([[0.0, 1.0], [1.0, 0.0]], REF).value == pytest.approx(3.0)

    def test_empty_set_is_zero(self):
        assert hypervolume_2d(np.empty((0, 2)), REF).value == 0.0

    def test_points_beyond_reference_contribute_nothing(self):
        assert hypervolume_2d([[2.0, 2.0], [3.0, 0.0], [0.0, 5.0]], REF).value == 0.0

    def test_reference_dimension_mismatch(self):
        with pytest.raises(ValueError):
            hypervolume_2d([[0.0, 0.0]], (2.0, 2.0, 2.0))

    def test_duplicate_points_counted_once(self):
        single = hypervolume_2d([[0.5, 0.5]], REF).value
        doubled = hypervolume_2d([[0.5, 0.5], [0.5, 0.5]], REF).value
        assert doubled == single

    @settings(deadline=None, max_examples=50)
    @given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 10))
    def test_matches_inclusion_exclusion_oracle(self, seed, n):
        pts = np.random.default_rng(seed).random((n, 2)) * 2.0
        exact = hypervolume_2d(pts, REF).value
        oracle = inclusion_exclusion_hypervolume(pts, REF)
        assert exact == pytest.approx(oracle, rel=1e-10, abs=1e-12)

    @settings(deadline=None, max_examples=30)
    @given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 20))
    def test_adding_points_never_decreases(self, seed, n):
        rng = np.random.default_rng(seed)
        pts = rng.random((n, 2))
        extra = rng.random(2)
        base = hypervolume_2d(pts, REF).value
        grown = hypervolume_2d(np.vstack([pts, extra]), REF).value
        assert grown >= base - 1e-12

    @settings(deadline=None, max_examples=30)
    @given(seed=st.integers(0, 2**31 - 1))
    def test_dominated_point_removal_invariant(self, seed):
        rng = np.random.default_rng(seed)
        pts = rng.random((8, 2))
        dominated = pts[rng.integers(8)] + rng.random(2) * 0.5
        with_dominated = hypervolume_2d(np.vstack([pts, dominated]), REF).value
        without = hypervolume_2d(pts, REF).value
        assert with_dominated == pytest.approx(without, abs=1e-12)


class TestHypervolumeMc:
    def test_matches_exact_within_four_sigma(self):
        value, stderr = hypervolume_mc([[0.5, 0.5]], REF, samples=200_000, seed=0)
        assert abs(value - 2.25) <= 4.0 * stderr

    def test_empty_set_exactly_zero(self):
        assert hypervolume_mc(np.empty((0, 2)), REF, samples=100, seed=0) == (0.0, 0.0)

    def test_same_seed_same_estimate(self):
        a = hypervolume_mc([[0.3, 0.6], [0.6, 0.3]], REF, samples=10_000, seed=9)
        b = hypervolume_mc([[0.3, 0.6], [0.6, 0.3]], REF, samples=10_000, seed=9)
        assert a == b

    def test_zero_volume_box(self):
        value, stderr = hypervolume_mc([[2.0, 2.0]], REF, samples=100, seed=0)
        assert value == 0.0 and stderr == 0.0

    def test_three_objectives_supported(self):
        # box [1,2]^3 from a single point: volume 1
        value, stderr = hypervolume_mc([[1.0, 1.0, 1.0]], (2.0, 2.0, 2.0), samples=50_000, seed=3)
        assert value == pytest.approx(1.0, abs=4 * max(stderr, 1e-12))


class TestAverageHypervolume:
    def test_two_rectangles(self):
        assert average_hypervolume([[0.0, 1.0], [1.0, 0.0]], REF) == pytest.approx(2.0)

    def test_single_point(self):
        assert average_hypervolume([[0.0, 0.0]], REF) == pytest.approx(4.0)

    def test_point_at_reference_contributes_zero(self):
        assert average_hypervolume([[2.0, 2.0]], REF) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            average_hypervolume(np.empty((0, 2)), REF)

    @settings(deadline=None, max_examples=40)
    @given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 25))
    def test_never_exceeds_union_hypervolume(self, seed, n):
        pts = np.random.default_rng(seed).random((n, 2)) * 2.0
        union = hypervolume_2d(pts, REF).value
        assert average_hypervolume(pts, REF) <= union + 1e-12


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 40))
def test_scaled_hypervolume_bounds(seed, n):
    # after min-max scaling every point lies in the unit box, so the
    # hypervolume against (2,2) is at most 4 and any single point's box
    # is at least the (1,1) corner box
    pts = np.random.default_rng(seed).normal(scale=30.0, size=(n, 2))
    scaled, _ = min_max_scale(pts)
    hv = hypervolume_2d(scaled, REF).value
    assert 0.0 <= hv <= 4.0
    per_point = np.prod(2.0 - scaled, axis=1)
    assert np.all(per_point >= 1.0 - 1e-12)


class TestConfidenceUncertainty:
    def test_product_of_normalized_widths(self):
        # widths: obj0 in {0, 1, 0.5}, obj1 in {0, 1, 0.4} so the third
        # solution normalizes to (0.5, 0.4)
        lo = np.zeros((3, 2))
        hi = np.array([[0.0, 0.0], [1.0, 1.0], [0.5, 0.4]])
        per_solution, mean = confidence_uncertainty(IntervalSet(lo90=lo, hi90=hi))
        assert per_solution[2] == pytest.approx(0.2)
        assert per_solution[0] == 0.0
        assert per_solution[1] == pytest.approx(1.0)
        assert mean == pytest.approx((0.0 + 1.0 + 0.2) / 3.0)

    def test_zero_width_objective_zeroes_solution(self):
        lo = np.zeros((2, 2))
        hi = np.array([[0.0, 1.0], [1.0, 1.0]])
        per_solution, _ = confidence_uncertainty(IntervalSet(lo90=lo, hi90=hi))
        assert per_solution[0] == 0.0

    def test_identical_widths_all_zero(self):
        lo = np.zeros((3, 2))
        hi = np.ones((3, 2)) * 0.25
        per_solution, mean = confidence_uncertainty(IntervalSet(lo90=lo, hi90=hi))
        assert np.all(per_solution == 0.0) and mean == 0.0

    def test_inverted_interval_rejected(self):
        with pytest.raises(ValueError):
            IntervalSet(lo90=np.ones((1, 2)), hi90=np.zeros((1, 2)))


class TestScalingParams:
    def test_bad_ordering_rejected(self):
        with pytest.raises(ValueError):
            ScalingParams(mins=np.array([1.0]), maxs=np.array([0.0]))
