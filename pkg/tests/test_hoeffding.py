import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import numpy as np
import pytest

from src.learners.hoeffding import (
    HoeffdingTree,
    LearningLeaf,
    SplitNode,
    entropy,
    hoeffding_bound,
    information_gain,
)
from src.streams.core import Instance, LabeledInstance
from src.utils.rng import seeded_rng


def _feed(tree: HoeffdingTree, rows, labels) -> None:
    for x, y in zip(rows, labels):
        tree.update(LabeledInstance(Instance(x), int(y)))


def test_hoeffding_bound_value() -> None:
    assert hoeffding_bound(1.0, 1e-7, 1_000) == pytest.approx(0.0898, abs=1e-4)


def test_entropy_of_balanced_and_pure_distributions() -> None:
    assert entropy(np.array([5.0, 5.0])) == pytest.approx(1.0)
    assert entropy(np.array([7.0, 0.0])) == 0.0
    assert entropy(np.zeros(2)) == 0.0


def test_information_gain_rejects_tiny_branches() -> None:
    pre = np.array([500.0, 500.0])
    assert information_gain(pre, np.array([500.0, 0.0]), np.array([0.0, 500.0])) == pytest.approx(1.0)
    assert information_gain(pre, np.array([1.0, 0.0]), np.array([499.0, 500.0])) == -np.inf


def test_empty_tree_predicts_class_zero() -> None:
    assert HoeffdingTree(2).predict(Instance([0.1, 0.2])) == 0


def test_small_leaf_predicts_majority_class() -> None:
    tree = HoeffdingTree(1)
    _feed(tree, [[0.0]] * 3 + [[5.0]] * 5, [0, 0, 0, 1, 1, 1, 1, 1])
    assert tree.predict(Instance([0.0])) == 1


def test_single_class_stream_never_splits() -> None:
    rng = seeded_rng(1)
    tree = HoeffdingTree(2, grace_period=50)
    _feed(tree, rng.uniform(size=(2_000, 2)), [1] * 2_000)
    assert tree.n_leaves == 1
    assert tree.predict(Instance([0.5, 0.5])) == 1


def test_class_prior_decides_between_identical_likelihoods() -> None:
    rng = seeded_rng(5)
    leaf = LearningLeaf(1, 2)
    for value in rng.standard_normal(900):
        leaf.observe(np.array([value]), 0)
    for value in rng.standard_normal(100):
        leaf.observe(np.array([value]), 1)
    assert leaf.naive_bayes_class(np.array([0.0])) == 0


def test_naive_bayes_picks_nearer_gaussian() -> None:
    leaf = LearningLeaf(1, 2)
    for value in (-1.0, 0.0, 1.0):
        leaf.observe(np.array([value]), 0)
    for value in (4.0, 5.0, 6.0):
        leaf.observe(np.array([value]), 1)
    assert leaf.mean[:, 0] == pytest.approx([0.0, 5.0])
    assert leaf.naive_bayes_class(np.array([4.9])) == 1


def test_inherited_counts_alone_never_win_the_naive_bayes_vote() -> None:
    rng = seeded_rng(11)
    leaf = LearningLeaf(2, 2, class_counts=np.array([25.0, 5.0]))
    for x in rng.standard_normal((20, 2)):
        leaf.observe(x, 0)
    queries = rng.standard_normal((1_000, 2))
    assert all(leaf.naive_bayes_class(x) == 0 for x in queries)


def test_leaf_without_observations_falls_back_to_inherited_majority() -> None:
    leaf = LearningLeaf(2, 3, class_counts=np.array([2.0, 9.0, 4.0]))
    assert leaf.naive_bayes_class(np.array([0.3, -1.2])) == 1


def test_freshly_split_leaves_predict_what_they_observed() -> None:
    rng = seeded_rng(12)
    rows = rng.uniform(size=(2_000, 2))
    labels = (rows[:, 0] > 0.5).astype(int)
    tree = HoeffdingTree(2, grace_period=200)
    _feed(tree, rows[:400], labels[:400])
    assert isinstance(tree.root, SplitNode)
    queries = rng.uniform(size=(500, 2))
    hits = sum(tree.predict(Instance(x)) == int(x[0] > 0.5) for x in queries)
    assert hits / 500 > 0.9


def test_separable_stream_splits_on_the_informative_attribute() -> None:
    rng = seeded_rng(2)
    rows = rng.uniform(size=(1_000, 2))
    tree = HoeffdingTree(2)
    _feed(tree, rows, (rows[:, 0] > 0.5).astype(int))
    assert isinstance(tree.root, SplitNode)
    assert tree.root.attribute == 0
    assert 0.3 < tree.root.threshold < 0.7
    assert tree.first_split_at == 200
    assert tree.predict(Instance([0.9, 0.1])) == 1
    assert tree.predict(Instance([0.1, 0.9])) == 0


def test_leaf_count_is_bounded_by_checks() -> None:
    rng = seeded_rng(3)
    rows = rng.uniform(size=(5_000, 3))
    labels = ((rows[:, 0] > 0.5) ^ (rows[:, 1] > 0.5)).astype(int)
    tree = HoeffdingTree(3, grace_period=100)
    _feed(tree, rows, labels)
    assert tree.n_leaves <= 5_000 // 100 + 1
    assert tree.model_size() == tree.n_leaves
    assert tree.instances_seen == 5_000


def test_tied_attributes_wait_for_the_tie_threshold() -> None:
    rng = seeded_rng(4)
    column = rng.uniform(size=200)
    rows = np.column_stack([column, column])
    tree = HoeffdingTree(2, grace_period=10_000)
    _feed(tree, rows, (column > 0.5).astype(int))
    assert tree.ht_try_split(tree.root) is None
    assert tree.n_leaves == 1


def test_split_times_are_recorded_in_order() -> None:
    rng = seeded_rng(6)
    rows = rng.uniform(size=(4_000, 2))
    labels = ((rows[:, 0] > 0.3) & (rows[:, 1] > 0.6)).astype(int)
    tree = HoeffdingTree(2, grace_period=100)
    _feed(tree, rows, labels)
    assert tree.split_times == sorted(tree.split_times)
    assert len(tree.split_times) == tree.n_leaves - 1


def test_rejects_out_of_range_label() -> None:
    with pytest.raises(ValueError):
        HoeffdingTree(1).update(LabeledInstance(Instance([0.0]), 3))


def test_weights_are_not_exposed() -> None:
    assert HoeffdingTree(2).weights() is None
