"""Seeded region growing and connectivity relabeling tests."""

from __future__ import annotations

import numpy as np
import pytest

from pyrseg.segment import connected_components_of, relabel_connected, segment_top

from .conftest import union_find_components


def test_two_plateaus_recovered_exactly():
    img = np.full((12, 12), 200.0)
    img[3:9, 2:7] = 40.0
    labels, means = segment_top(img, 12.0)
    assert labels.max() == 1
    assert np.array_equal(labels == 1, img == 40.0)
    assert means[0] == 200.0 and means[1] == 40.0


def test_admission_uses_running_mean():
    # 10 joins the seed (|10-0| <= 12) and drags the mean to 5, which then
    # rejects 20; the row splits into two regions
    img = np.array([[0.0, 10.0, 20.0, 30.0]])
    labels, means = segment_top(img, 12.0)
    assert list(labels[0]) == [0, 0, 1, 1]
    assert means[0] == 5.0 and means[1] == 25.0


def test_growth_order_frozen():
    # full golden run: pins raster seeding, FIFO growth, the N,W,E,S probe
    # order and the running-mean admission rule all at once
    rng = np.random.RandomState(42)
    img = rng.randint(0, 256, size=(6, 6)).astype(np.float64)
    labels, means = segment_top(img, 40.0)
    want = np.array(
        [[0, 1, 2, 3, 4, 4],
         [5, 6, 2, 2, 7, 7],
         [8, 9, 2, 2, 2, 2],
         [10, 10, 10, 11, 12, 2],
         [13, 10, 14, 15, 16, 16],
         [17, 10, 18, 19, 19, 20]], dtype=np.int32)
    assert np.array_equal(labels, want)
    assert means[2] == pytest.approx(100.875, abs=0)
    assert means[10] == pytest.approx(149.4, abs=1e-12)


def test_labels_dense_in_discovery_order():
    rng = np.random.RandomState(1)
    img = rng.randint(0, 256, size=(16, 16)).astype(np.float64)
    labels, means = segment_top(img, 25.0)
    n = labels.max() + 1
    assert len(means) == n
    firsts = [np.flatnonzero(labels.ravel() == k)[0] for k in range(n)]
    assert firsts == sorted(firsts)  # id order is seed discovery order
    assert labels[0, 0] == 0


def test_means_are_exact_region_averages():
    rng = np.random.RandomState(2)
    img = rng.randint(0, 256, size=(20, 20)).astype(np.float64)
    labels, means = segment_top(img, 30.0)
    for k in range(labels.max() + 1):
        sel = img[labels == k]
        assert means[k] == sel.sum() / sel.size  # bitwise-reproducible sums


def test_tolerance_zero_gives_constant_components():
    rng = np.random.RandomState(3)
    img = rng.randint(0, 3, size=(15, 15)).astype(np.float64) * 80
    labels, _ = segment_top(img, 0.0)
    assert np.array_equal(labels, union_find_components(img, 4))


def test_negative_tolerance_rejected():
    with pytest.raises(ValueError):
        segment_top(np.zeros((2, 2)), -1.0)


@pytest.mark.parametrize("connectivity", [4, 8])
def test_relabel_matches_union_find(connectivity):
    rng = np.random.RandomState(7)
    for _ in range(20):
        h, w = rng.randint(2, 13, size=2)
        labels = rng.randint(0, 4, size=(h, w)).astype(np.int32)
        got = relabel_connected(labels, connectivity)
        want = union_find_components(labels, connectivity)
        assert np.array_equal(got, want)


def test_relabel_splits_disconnected_id():
    labels = np.zeros((3, 5), dtype=np.int32)
    labels[:, 2] = 1  # a wall splitting id 0
    out = relabel_connected(labels, 4)
    assert out.max() == 2
    assert len(np.unique(out[:, :2])) == 1
    assert len(np.unique(out[:, 3:])) == 1
    assert np.all(out[:, :2] != out[0, 3])


def test_relabel_8_bridges_diagonals():
    labels = np.array([[1, 0], [0, 1]], dtype=np.int32)
    assert relabel_connected(labels, 4).max() == 3
    assert relabel_connected(labels, 8).max() == 1


def test_component_ids_follow_raster_first_pixel():
    mask = np.array([[0, 1, 0, 1],
                     [0, 1, 0, 1]], dtype=np.int8)
    n, comp = connected_components_of(mask, 4)
    assert n == 4
    assert comp[0, 0] == 0 and comp[0, 1] == 1 and comp[0, 2] == 2 and comp[0, 3] == 3


def test_relabel_idempotent():
    rng = np.random.RandomState(9)
    labels = rng.randint(0, 5, size=(10, 10)).astype(np.int32)
    once = relabel_connected(labels, 4)
    assert np.array_equal(once, relabel_connected(once, 4))
