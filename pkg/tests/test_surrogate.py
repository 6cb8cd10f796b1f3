import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moorank.surrogate import (
    FEATURE_SPACE,
    KnnSurrogate,
    derive_log_features,
    fit_report,
    generate_synthetic,
    knn_predict,
    load_dataset,
    split_indices,
)

from .oracles import brute_force_neighbors

HEADER = "freshness,views,likes,comments,clicks,dwell_ms,time_step\n"


def parse(*rows):
    return load_dataset(io.StringIO(HEADER + "".join(r + "\n" for r in rows)))


class TestLoadDataset:
    def test_single_row_without_time_step(self):
        ds = parse("2.0,100,5,1,40,35000,")
        assert ds.row_count == 1
        assert ds.dropped_rows == 0
        assert ds.time_step[0] == 0
        assert ds.steps_present() == []

    def test_negative_count_dropped_and_counted(self):
        ds = parse("2.0,100,5,1,40,35000,", "2.0,-3,5,1,40,35000,")
        assert ds.row_count == 1
        assert ds.dropped_rows == 1

    def test_non_numeric_row_dropped(self):
        ds = parse("2.0,100,5,1,40,35000,1", "oops,100,5,1,40,35000,1")
        assert ds.row_count == 1
        assert ds.dropped_rows == 1

    def test_header_only_is_an_error(self):
        with pytest.raises(ValueError, match="no valid rows"):
            parse()

    def test_missing_column_named(self):
        stream = io.StringIO("freshness,views,likes,comments,clicks\n1,2,3,4,5\n")
        with pytest.raises(ValueError, match="dwell_ms"):
            load_dataset(stream)

    def test_out_of_range_time_step_dropped(self):
        ds = parse("2.0,100,5,1,40,35000,2", "2.0,100,5,1,40,35000,9")
        assert ds.row_count == 1
        assert ds.dropped_rows == 1

    def test_subset_for_step(self):
        ds = parse("1,10,1,0,5,100,1", "2,20,2,0,6,200,2", "3,30,3,0,7,300,2")
        sub = ds.subset_for_step(2)
        assert sub.row_count == 2
        assert ds.steps_present() == [1, 2]

    def test_round_trip_through_csv(self, tmp_path):
        ds = generate_synthetic(3, (40, 40))
        path = tmp_path / "data.csv"
        ds.write_csv(path)
        again = load_dataset(path)
        assert again.row_count == ds.row_count
        np.testing.assert_allclose(again.views, ds.views)
        np.testing.assert_allclose(again.dwell_ms, ds.dwell_ms)
        assert again.steps_present() == [1, 2]


class TestLogFeatures:
    def test_zero_maps_to_log_shift(self):
        ds = parse("0,0,0,0,0,0,")
        X, Y = derive_log_features(ds)
        assert X[0, 0] == pytest.approx(math.log(1e-5), abs=1e-9)
        assert X[0, 0] == pytest.approx(-11.5129, abs=1e-4)
        assert Y[0, 1] == pytest.approx(math.log(1e-5), abs=1e-9)

    def test_unit_point_of_shifted_log(self):
        assert FEATURE_SPACE.transform([1.0 - 1e-5])[0] == pytest.approx(0.0)

    @given(x1=st.floats(0, 1e9), x2=st.floats(0, 1e9))
    def test_strictly_monotone(self, x1, x2):
        # strict ordering is preserved whenever the gap survives float
        # rounding under the 1e-5 shift
        if x1 < x2:
            t1 = FEATURE_SPACE.transform([x1])[0]
            t2 = FEATURE_SPACE.transform([x2])[0]
            assert t1 <= t2
            if x2 - x1 > 1e-9 * (1.0 + x2):
                assert t1 < t2

    def test_inverse_on_range(self):
        values = np.array([0.0, 1.0, 17.5, 120000.0])
        np.testing.assert_allclose(
            FEATURE_SPACE.inverse(FEATURE_SPACE.transform(values)), values, atol=1e-9
        )


class TestKnnSurrogate:
    def test_exact_training_point_with_k1(self):
        points = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        targets = np.array([[10.0], [20.0], [30.0]])
        model = KnnSurrogate.fit(points, targets, k=1)
        (mean, lo, hi), = knn_predict(model, [1.0, 1.0])
        assert mean == lo == hi == 20.0

    def test_three_neighbor_mean(self):
        points = np.array([[0.0], [0.1], [0.2], [5.0]])
        targets = np.array([[1.0], [2.0], [9.0], [100.0]])
        model = KnnSurrogate.fit(points, targets, k=3)
        (mean, lo, hi), = knn_predict(model, [0.1])
        assert mean == pytest.approx(4.0)
        assert lo <= mean <= hi

    def test_duplicate_points_zero_width_interval(self):
        points = np.zeros((4, 2))
        targets = np.full((4, 1), 7.0)
        model = KnnSurrogate.fit(points, targets, k=4)
        (mean, lo, hi), = knn_predict(model, [0.0, 0.0])
        assert mean == lo == hi == 7.0

    def test_k_larger_than_dataset_rejected(self):
        with pytest.raises(ValueError, match="k"):
            KnnSurrogate.fit(np.zeros((3, 2)), np.zeros((3, 1)), k=4)

    def test_deterministic_predictions(self):
        rng = np.random.default_rng(5)
        model = KnnSurrogate.fit(rng.random((100, 3)), rng.random((100, 2)), k=7)
        q = rng.random((20, 3))
        first = model.predict(q)
        second = model.predict(q)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)

    @settings(deadline=None, max_examples=25)
    @given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 12))
    def test_interval_brackets_mean(self, seed, k):
        rng = np.random.default_rng(seed)
        model = KnnSurrogate.fit(rng.random((60, 4)), rng.normal(size=(60, 2)), k=k)
        mean, lo, hi = model.predict(rng.random((10, 4)))
        assert np.all(lo <= mean) and np.all(mean <= hi)

    @settings(deadline=None, max_examples=25)
    @given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 9))
    def test_neighbor_sets_match_brute_force(self, seed, k):
        rng = np.random.default_rng(seed)
        points = rng.random((200, 3))
        model = KnnSurrogate.fit(points, rng.random((200, 1)), k=k)
        queries = rng.random((5, 3))
        idx = model.neighbors(queries)
        for q, found in zip(queries, idx):
            assert set(found.tolist()) == set(brute_force_neighbors(points, q, k))


class TestGenerateSynthetic:
    def test_per_step_row_counts(self):
        sizes = (50, 60, 70, 80)
        ds = generate_synthetic(0, sizes)
        assert ds.row_count == sum(sizes)
        for step, size in zip((1, 2, 3, 4), sizes):
            assert int((ds.time_step == step).sum()) == size

    def test_same_seed_identical(self):
        a = generate_synthetic(42, (100, 100))
        b = generate_synthetic(42, (100, 100))
        np.testing.assert_array_equal(a.clicks, b.clicks)
        np.testing.assert_array_equal(a.dwell_ms, b.dwell_ms)

    def test_different_seed_differs(self):
        a = generate_synthetic(1, (100,))
        b = generate_synthetic(2, (100,))
        assert not np.array_equal(a.clicks, b.clicks)

    def test_static_mode_has_no_step_labels(self):
        ds = generate_synthetic(0, (120,))
        assert ds.row_count == 120
        assert ds.steps_present() == []

    def test_counts_are_nonnegative_integers(self):
        ds = generate_synthetic(9, (500,))
        for column in (ds.views, ds.likes, ds.comments, ds.clicks):
            assert np.all(column >= 0)
            np.testing.assert_array_equal(column, np.round(column))

    def test_too_many_steps_rejected(self):
        with pytest.raises(ValueError):
            generate_synthetic(0, (10,) * 5)

    def test_response_surfaces_move_between_steps(self):
        # the same activity profile must map to different engagement in
        # different time steps, otherwise no change is detectable
        ds = generate_synthetic(11, (3000, 3000))
        from moorank.surrogate import derive_log_features as dlf

        s1, s2 = ds.subset_for_step(1), ds.subset_for_step(2)
        X1, Y1 = dlf(s1)
        X2, Y2 = dlf(s2)
        m1 = KnnSurrogate.fit(X1, Y1, k=15)
        m2 = KnnSurrogate.fit(X2, Y2, k=15)
        queries = X1[:200]
        p1, _, _ = m1.predict(queries)
        p2, _, _ = m2.predict(queries)
        assert np.abs(p1 - p2).max() > 0.1


class TestSplits:
    def test_split_sizes(self):
        train, test, val = split_indices(1000, seed=0)
        assert len(train) == 800 and len(test) == 100 and len(val) == 100
        assert sorted(np.concatenate([train, test, val]).tolist()) == list(range(1000))

    def test_fit_report_shape(self):
        ds = generate_synthetic(5, (800,))
        report = fit_report(ds, k=10, seed=1)
        assert len(report) == 2
        for entry in report:
            assert set(entry) == {"r2", "mse"}
            assert entry["mse"] >= 0.0
