"""Seeded region growing for the pyramid top, plus connectivity relabeling.

The growing order is part of the contract: seeds are taken in raster order,
growth is breadth-first with a FIFO queue, neighbors are probed N, W, E, S,
and a pixel joins a region iff its intensity is within `tolerance` of the
region's running mean.  Identical inputs always yield identical label maps.
"""

from __future__ import annotations

from collections import deque

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

DEFAULT_TOLERANCE = 12.0

# probe order N, W, E, S
_GROW_OFFSETS = ((-1, 0), (0, -1), (0, 1), (1, 0))


def segment_top(img: np.ndarray, tolerance: float = DEFAULT_TOLERANCE) -> tuple[np.ndarray, np.ndarray]:
    """Segment an image by seeded region growing; returns (labels, means).

    Region ids are dense in seed discovery order; means are the exact
    per-region pixel averages.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    labels = np.full((h, w), -1, dtype=np.int32)
    means: list[float] = []
    next_id = 0
    for sr in range(h):
        for sc in range(w):
            if labels[sr, sc] >= 0:
                continue
            labels[sr, sc] = next_id
            total = float(img[sr, sc])
            count = 1
            queue = deque(((sr, sc),))
            while queue:
                r, c = queue.popleft()
                for dr, dc in _GROW_OFFSETS:
                    nr, nc = r + dr, c + dc
                    if nr < 0 or nr >= h or nc < 0 or nc >= w:
                        continue
                    if labels[nr, nc] >= 0:
                        continue
                    if abs(float(img[nr, nc]) - total / count) <= tolerance:
                        labels[nr, nc] = next_id
                        total += float(img[nr, nc])
                        count += 1
                        queue.append((nr, nc))
            means.append(total / count)
            next_id += 1
    return labels, np.asarray(means, dtype=np.float64)


def _adjacency_edges(flat: np.ndarray, h: int, w: int, connectivity: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs of neighboring pixels that carry the same label."""
    idx = np.arange(h * w, dtype=np.int64).reshape(h, w)
    src, dst = [], []
    pairs = [(idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])]
    if connectivity == 8:
        pairs += [(idx[:-1, :-1], idx[1:, 1:]), (idx[:-1, 1:], idx[1:, :-1])]
    for a, b in pairs:
        a, b = a.ravel(), b.ravel()
        same = flat[a] == flat[b]
        src.append(a[same])
        dst.append(b[same])
    return np.concatenate(src), np.concatenate(dst)


def connected_components_of(mask_or_labels: np.ndarray, connectivity: int = 4) -> tuple[int, np.ndarray]:
    """Label connected components of a partition, ids by raster-first pixel.

    Two pixels are connected when they are neighbors (4 or 8) and carry equal
    values.  Returns (count, component map) with dense ids ordered by each
    component's first pixel in raster order.
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    arr = np.asarray(mask_or_labels)
    h, w = arr.shape
    n = h * w
    flat = arr.ravel()
    src, dst = _adjacency_edges(flat, h, w, connectivity)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    n_comp, comp = connected_components(graph, directed=False)
    _, first = np.unique(comp, return_index=True)
    renum = np.empty(n_comp, dtype=np.int32)
    renum[np.argsort(first)] = np.arange(n_comp, dtype=np.int32)
    return n_comp, renum[comp].reshape(h, w)


def relabel_connected(labels: np.ndarray, connectivity: int = 4) -> np.ndarray:
    """Split every label into its maximal connected components.

    New ids are dense and assigned by raster order of each component's first
    pixel, so the output is deterministic and idempotent up to renumbering.
    """
    _, comp = connected_components_of(np.asarray(labels), connectivity)
    return comp
