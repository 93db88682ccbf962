import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chanlearn import forest as rf
from chanlearn.dataset import Dataset, build_classification, build_regression


def _ds(x, y, n_classes=None):
    x = np.asarray(x, dtype=float)
    return Dataset(x, y, 1.0, x.shape[1], "classification", "D1", 0, n_classes or int(np.max(y)) + 1)


def test_single_feature_separates_perfectly():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(300, 6))
    y = (x[:, 0] > 0.1).astype(int) + (x[:, 0] > 1.0).astype(int)
    fitted = rf.fit(_ds(x, y), n_estimators=10, seed=1)
    acc, conf = rf.accuracy(fitted, _ds(x, y))
    assert acc == 1.0
    np.testing.assert_array_equal(np.diag(conf), np.bincount(y))


def test_single_class_gives_single_leaf_trees():
    x = np.random.default_rng(1).normal(size=(40, 3))
    fitted = rf.fit(_ds(x, np.full(40, 2), n_classes=3), n_estimators=5, seed=0)
    assert all(t.n_nodes == 1 for t in fitted.trees)
    assert np.all(rf.predict(fitted, x) == 2)


def test_same_seed_same_forest():
    ds = build_classification(10, 6, seed=2)
    a = rf.fit(ds, n_estimators=8, seed=3)
    b = rf.fit(ds, n_estimators=8, seed=3)
    assert a.to_dict() == b.to_dict()
    c = rf.fit(ds, n_estimators=8, seed=4)
    assert a.to_dict() != c.to_dict()


def test_thread_count_does_not_change_result():
    ds = build_classification(10, 6, seed=2)
    assert rf.fit(ds, 6, seed=1, threads=1).to_dict() == rf.fit(ds, 6, seed=1, threads=3).to_dict()


def _stump(label, n_classes):
    counts = np.zeros((1, n_classes), dtype=np.int64)
    counts[0, label] = 1
    return rf.Tree(np.array([rf.LEAF]), np.zeros(1), np.array([rf.LEAF]), np.array([rf.LEAF]), counts)


def test_vote_rules():
    agree = rf.Forest([_stump(3, 5)] * 4, 4, 0, 2, 5)
    assert rf.predict(agree, np.zeros(2)) == 3
    tie = rf.Forest([_stump(3, 5), _stump(1, 5), _stump(3, 5), _stump(1, 5)], 4, 0, 2, 5)
    assert rf.predict(tie, np.zeros(2)) == 1


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=12), st.randoms(use_true_random=False))
def test_prediction_invariant_under_tree_order(labels, rnd):
    trees = [_stump(k, 5) for k in labels]
    shuffled = list(trees)
    rnd.shuffle(shuffled)
    x = np.zeros((3, 2))
    a = rf.Forest(trees, len(trees), 0, 2, 5).predict(x)
    b = rf.Forest(shuffled, len(trees), 0, 2, 5).predict(x)
    np.testing.assert_array_equal(a, b)
    assert a[0] == min(k for k in set(labels) if labels.count(k) == max(map(labels.count, labels)))


def test_split_goes_left_on_equality():
    x = np.array([[0.0], [1.0], [1.0], [2.0]])
    y = np.array([0, 0, 0, 1])
    tree = rf.grow_tree(x, y, 2, 1, np.random.default_rng(0))
    assert tree.threshold[0] == 1.5
    np.testing.assert_array_equal(tree.predict(np.array([[1.5], [1.5000001]])), [0, 1])


def test_duplicate_rows_with_conflicting_labels_terminate():
    x = np.ones((6, 2))
    y = np.array([0, 1, 0, 1, 1, 0])
    tree = rf.grow_tree(x, y, 2, 1, np.random.default_rng(0))
    assert tree.n_nodes == 1


def test_serialisation_round_trip():
    ds = build_classification(6, 5, seed=1)
    fitted = rf.fit(ds, n_estimators=4, seed=0)
    back = rf.Forest.from_dict(fitted.to_dict())
    np.testing.assert_array_equal(back.predict(ds.features), fitted.predict(ds.features))


def test_rejects_regression_data_and_bad_width():
    with pytest.raises(ValueError, match="forest supports classification only"):
        rf.fit(build_regression(20, seed=0))
    fitted = rf.fit(build_classification(4, 5, seed=0), n_estimators=2)
    with pytest.raises(ValueError):
        fitted.predict(np.zeros((2, 7)))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 60), st.integers(1, 5), st.integers(2, 4), st.integers(0, 10_000))
def test_fully_grown_trees_fit_distinct_rows(n, d, k, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    y = rng.integers(0, k, n)
    tree = rf.grow_tree(x, y, k, max(1, int(np.ceil(np.sqrt(d)))), rng)
    np.testing.assert_array_equal(tree.predict(x), y)
