import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import auc_brute_force
from ocmeta.errors import DataError, DimensionError
from ocmeta.metrics import auc, average_ranks
from ocmeta.rng import Rng


def test_average_ranks_with_ties():
    ranks = average_ranks(np.array([10.0, 20.0, 20.0, 30.0]))
    assert np.array_equal(ranks, np.array([1.0, 2.5, 2.5, 4.0]))


def test_average_ranks_all_equal():
    ranks = average_ranks(np.full(5, 3.0))
    assert np.array_equal(ranks, np.full(5, 3.0))


def test_perfect_separation():
    scores = np.array([0.1, 0.2, 5.0, 6.0])
    labels = np.array([1, 1, -1, -1])
    assert auc(scores, labels) == 1.0


def test_chance_level_from_full_ties():
    scores = np.ones(6)
    labels = np.array([1, 1, 1, -1, -1, -1])
    assert auc(scores, labels) == 0.5


def test_hand_value_three_quarters():
    # outlier scores {2, 4} vs inlier scores {1, 3}: 3 of 4 pairs ordered right
    scores = np.array([1.0, 2.0, 3.0, 4.0])
    labels = np.array([1, -1, 1, -1])
    assert auc(scores, labels) == 0.75


def test_reversed_scores_complement():
    rng = Rng(3)
    scores = rng.gaussian_matrix(1, 40)[0]
    labels = np.where(rng.gaussian_matrix(1, 40)[0] > 0, 1, -1)
    labels[:2] = [1, -1]
    assert auc(scores, labels) + auc(-scores, labels) == 1.0


def test_invariance_under_increasing_transform():
    rng = Rng(5)
    scores = np.round(rng.gaussian_matrix(1, 60)[0] * 3)  # plenty of ties
    labels = np.where(rng.gaussian_matrix(1, 60)[0] > 0, 1, -1)
    labels[:2] = [1, -1]
    assert auc(2.0 * scores + 1.0, labels) == auc(scores, labels)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_matches_brute_force(data):
    n = data.draw(st.integers(min_value=2, max_value=40))
    raw = data.draw(
        st.lists(
            st.floats(min_value=-50, max_value=50, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    scores = np.round(np.asarray(raw))  # quantize to force tie groups
    n_out = data.draw(st.integers(min_value=1, max_value=n - 1))
    labels = np.concatenate([-np.ones(n_out, dtype=int), np.ones(n - n_out, dtype=int)])
    perm = Rng(data.draw(st.integers(min_value=0, max_value=2**32))).permutation(n)
    labels = labels[perm]
    assert abs(auc(scores, labels) - auc_brute_force(scores, labels)) <= 1e-12


def test_errors():
    with pytest.raises(DimensionError):
        auc(np.ones(3), np.ones(2, dtype=int))
    with pytest.raises(DataError):
        auc(np.ones(3), np.array([1, 0, -1]))
    with pytest.raises(DataError):
        auc(np.ones(3), np.array([1, 1, 1]))
    with pytest.raises(DataError):
        auc(np.ones(3), np.array([-1, -1, -1]))
