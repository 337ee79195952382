"""Top-down label propagation: expand coarse maps and refine deviating pixels.

Each descent step replicates the coarser level's label and mean maps onto the
finer grid, then runs refinement passes.  A pass flags pixels whose intensity
deviates from their region mean by more than epsilon, reassigns each flagged
pixel to the nearest-mean neighboring region of a frozen pass-start snapshot
(ties to the lower id), and turns the leftovers into newly seeded regions.
Only flagged pixels are ever touched, and no pass merges two region ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import registry as reg
from .pyramid import Pyramid
from .segment import connected_components_of, relabel_connected

DEFAULT_EPSILON = 12.0
DEFAULT_MAX_ITERS = 10
DEFAULT_CONNECTIVITY = 4

_OFFSETS_4 = ((-1, 0), (0, -1), (0, 1), (1, 0))
_OFFSETS_8 = _OFFSETS_4 + ((-1, -1), (-1, 1), (1, -1), (1, 1))


@dataclass(frozen=True)
class DescentParams:
    epsilon: float = DEFAULT_EPSILON
    max_iters: int = DEFAULT_MAX_ITERS
    connectivity: int = DEFAULT_CONNECTIVITY

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")


@dataclass
class PassTrace:
    """Debug snapshot of one refinement pass."""

    labels_before: np.ndarray
    uncertain: np.ndarray
    labels_after: np.ndarray
    created_ids: list[int]


@dataclass
class LevelResult:
    """Finalized per-level segmentation state."""

    level: int
    labels: np.ndarray
    means: np.ndarray
    uncertain_count: int = 0
    iterations_used: int = 0
    emerged_ids: set[int] = field(default_factory=set)
    records: list = field(default_factory=list)
    trace: list[PassTrace] | None = None


def expand_maps(labels: np.ndarray, means: np.ndarray, target_w: int, target_h: int) -> tuple[np.ndarray, np.ndarray]:
    """Replicate coarse maps onto the finer grid: child (i,j) <- parent (i//2, j//2).

    Returns the expanded label map and the per-pixel mean grid.
    """
    labels = np.asarray(labels)
    h, w = labels.shape
    if (target_h + 1) // 2 != h or (target_w + 1) // 2 != w:
        raise ValueError(
            f"target dims {target_w}x{target_h} are not the ceil-halving preimage of {w}x{h}"
        )
    expanded = np.repeat(np.repeat(labels, 2, axis=0), 2, axis=1)[:target_h, :target_w]
    means = np.asarray(means, dtype=np.float64)
    return expanded, means[expanded]


def find_uncertain(img: np.ndarray, mean_grid: np.ndarray, epsilon: float) -> np.ndarray:
    """Mask of pixels deviating from their assigned mean by more than epsilon."""
    img = np.asarray(img, dtype=np.float64)
    mean_grid = np.asarray(mean_grid, dtype=np.float64)
    if img.shape != mean_grid.shape:
        raise ValueError("image and mean grid dims differ")
    return np.abs(img - mean_grid) > epsilon


def _region_means(labels: np.ndarray, img: np.ndarray, n: int) -> np.ndarray:
    flat = labels.ravel().astype(np.int64)
    counts = np.bincount(flat, minlength=n)
    sums = np.bincount(flat, weights=img.ravel(), minlength=n)
    out = np.full(n, np.nan)
    np.divide(sums, counts, out=out, where=counts > 0)
    return out


def _best_neighbor(img, snapshot, means, rows, cols, connectivity):
    """Per uncertain pixel: nearest-mean snapshot-neighbor region and its distance."""
    h, w = snapshot.shape
    values = img[rows, cols]
    best_dist = np.full(len(rows), np.inf)
    best_id = np.full(len(rows), -1, dtype=np.int64)
    offsets = _OFFSETS_4 if connectivity == 4 else _OFFSETS_8
    for dr, dc in offsets:
        nr, nc = rows + dr, cols + dc
        valid = (nr >= 0) & (nr < h) & (nc >= 0) & (nc < w)
        if not valid.any():
            continue
        nid = snapshot[nr[valid], nc[valid]].astype(np.int64)
        nd = np.abs(values[valid] - means[nid])
        bd, bi = best_dist[valid], best_id[valid]
        better = (nd < bd) | ((nd == bd) & (nid < bi))
        bd[better] = nd[better]
        bi[better] = nid[better]
        best_dist[valid] = bd
        best_id[valid] = bi
    return best_dist, best_id


def _orphan_regions(orphan_mask: np.ndarray, img: np.ndarray, first_new_id: int):
    """Group orphans into 4-connected components and give each a fresh id."""
    h, w = orphan_mask.shape
    idx = np.flatnonzero(orphan_mask.ravel())
    # component labeling over the orphan/non-orphan partition; orphan
    # components only ever contain orphan pixels, and component ids are
    # already assigned by raster order of each component's first pixel
    _, comp_all = connected_components_of(orphan_mask.astype(np.int8), connectivity=4)
    comp = comp_all.ravel()[idx]
    comp_ids, comp_dense = np.unique(comp, return_inverse=True)
    k = len(comp_ids)
    counts = np.bincount(comp_dense, minlength=k)
    sums = np.bincount(comp_dense, weights=img.ravel()[idx], minlength=k)
    new_ids = first_new_id + comp_dense
    return idx, new_ids, sums / counts


def refine_level(
    img: np.ndarray,
    labels: np.ndarray,
    means: np.ndarray,
    params: DescentParams,
    level: int = 0,
    collect_trace: bool = False,
) -> LevelResult:
    """Iterate refinement passes on one level and finalize the partition.

    Finalization drops emptied ids, splits disconnected ids (4-connectivity),
    recomputes all means and maps the emerged-region provenance onto the
    final ids.
    """
    img = np.asarray(img, dtype=np.float64)
    labels = np.asarray(labels).astype(np.int32, copy=True)
    means = np.asarray(means, dtype=np.float64).copy()
    if img.shape != labels.shape:
        raise ValueError("image and label map dims differ")

    emerged: set[int] = set()
    uncertain_count = None
    iterations_used = 0
    trace: list[PassTrace] | None = [] if collect_trace else None

    for _ in range(params.max_iters):
        mean_grid = means[labels]
        uncertain = find_uncertain(img, mean_grid, params.epsilon)
        if uncertain_count is None:
            uncertain_count = int(uncertain.sum())
        if not uncertain.any():
            break
        snapshot = labels
        new_labels = labels.copy()
        rows, cols = np.nonzero(uncertain)
        best_dist, best_id = _best_neighbor(img, snapshot, means, rows, cols, params.connectivity)
        qualified = best_dist <= params.epsilon
        new_labels[rows[qualified], cols[qualified]] = best_id[qualified].astype(np.int32)
        created: list[int] = []
        if not qualified.all():
            orphan_mask = np.zeros_like(uncertain)
            orphan_mask[rows[~qualified], cols[~qualified]] = True
            idx, new_ids, new_means = _orphan_regions(orphan_mask, img, len(means))
            new_labels.ravel()[idx] = new_ids.astype(np.int32)
            created = list(range(len(means), len(means) + len(new_means)))
            emerged.update(created)
            means = np.concatenate([means, new_means])
        if trace is not None:
            trace.append(PassTrace(snapshot.copy(), uncertain, new_labels.copy(), created))
        labels = new_labels
        means = _region_means(labels, img, len(means))
        iterations_used += 1

    labels, means, emerged_final = _finalize(labels, img, emerged)
    return LevelResult(
        level=level,
        labels=labels,
        means=means,
        uncertain_count=int(uncertain_count or 0),
        iterations_used=iterations_used,
        emerged_ids=emerged_final,
        trace=trace,
    )


def _finalize(labels: np.ndarray, img: np.ndarray, emerged: set[int]):
    # drop empty ids, keeping the survivors' relative order
    present = np.unique(labels)
    dense_map = np.full(int(labels.max()) + 1, -1, dtype=np.int32)
    dense_map[present] = np.arange(len(present), dtype=np.int32)
    dense = dense_map[labels]
    emerged_dense = {int(dense_map[i]) for i in emerged if i < len(dense_map) and dense_map[i] >= 0}
    # enforce 4-connectivity of every id
    final = relabel_connected(dense, connectivity=4)
    n = int(final.max()) + 1
    _, first = np.unique(final.ravel(), return_index=True)
    origin = dense.ravel()[first]
    emerged_final = {f for f in range(n) if int(origin[f]) in emerged_dense}
    means = _region_means(final, img, n)
    return final, means, emerged_final


def descend(
    pyr: Pyramid,
    top: tuple[np.ndarray, np.ndarray],
    params: DescentParams,
) -> reg.SegmentationResult:
    """Run the full top-down path and register every level's regions."""
    top_labels, top_means = top
    if top_labels.shape != pyr.top.shape:
        raise ValueError("top labels do not match the pyramid top level")
    entries = [
        LevelResult(
            level=pyr.top_level,
            labels=np.asarray(top_labels).astype(np.int32, copy=True),
            means=np.asarray(top_means, dtype=np.float64).copy(),
        )
    ]
    for lvl in range(pyr.top_level - 1, -1, -1):
        img = pyr.levels[lvl]
        above = entries[-1]
        h, w = img.shape
        expanded, _ = expand_maps(above.labels, above.means, w, h)
        entries.append(refine_level(img, expanded, above.means, params, level=lvl))

    for i, entry in enumerate(entries):
        entry.records = reg.register_level(entry.labels, pyr.levels[entry.level], entry.level)
        if i > 0:
            reg.link_parents(entry.records, entry.labels, entries[i - 1].labels)
        reg.compute_relations(entry.records, entry.labels)
        for rec in entry.records:
            rec.emerged = rec.id in entry.emerged_ids

    return reg.SegmentationResult(
        params={
            "epsilon": params.epsilon,
            "max_iters": params.max_iters,
            "connectivity": params.connectivity,
        },
        levels=entries,
    )
