"""Region registry: per-level object descriptions, lineage and relations.

Every level's regions are described by size, centroid, mean intensity,
bounding box, a parent link into the next-coarser level, and topological
relations (adjacency, containment, left-of / above).  The registry is the
executable description of the segmentation: together with the label maps it
suffices to rebuild each level's generalized intensity map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class RegionRecord:
    """One object-list entry for a region at one level."""

    id: int
    level: int
    pixel_count: int
    centroid: tuple[float, float]  # (row, col)
    mean_intensity: float
    bbox: tuple[int, int, int, int]  # (row0, col0, row1, col1) inclusive
    parent_id: int | None = None
    emerged: bool = False
    adjacent: list[int] = field(default_factory=list)
    relations: list[tuple[str, int]] = field(default_factory=list)


@dataclass
class SegmentationResult:
    """Whole-hierarchy output: level entries ordered top to base."""

    params: dict
    levels: list  # of refine.LevelResult, index 0 = top level

    @property
    def base(self):
        return self.levels[-1]

    def level(self, index: int):
        for entry in self.levels:
            if entry.level == index:
                return entry
        raise KeyError(f"no level {index} in result")


def register_level(labels: np.ndarray, img: np.ndarray, level: int) -> list[RegionRecord]:
    """Compute one RegionRecord per id, sorted by id.

    Counts, bounding boxes and centroid sums are integer-exact; means divide
    the exact intensity sum by the count.
    """
    labels = np.asarray(labels)
    img = np.asarray(img, dtype=np.float64)
    if labels.shape != img.shape:
        raise ValueError("label map and image dims differ")
    h, w = labels.shape
    flat = labels.ravel().astype(np.int64)
    n = int(flat.max()) + 1
    counts = np.bincount(flat, minlength=n)
    if counts.min() == 0:
        raise ValueError("label ids must be dense (every id non-empty)")
    sums = np.bincount(flat, weights=img.ravel(), minlength=n)
    rows = np.repeat(np.arange(h, dtype=np.float64), w)
    cols = np.tile(np.arange(w, dtype=np.float64), h)
    row_sums = np.bincount(flat, weights=rows, minlength=n)
    col_sums = np.bincount(flat, weights=cols, minlength=n)

    order = np.argsort(flat, kind="stable")
    starts = np.searchsorted(flat[order], np.arange(n))
    cols_sorted = cols[order].astype(np.int64)
    col0 = np.minimum.reduceat(cols_sorted, starts)
    col1 = np.maximum.reduceat(cols_sorted, starts)
    # raster order makes the first/last occurrence give the row bounds
    row0 = order[starts] // w
    ends = np.append(starts[1:], len(flat)) - 1
    row1 = order[ends] // w

    return [
        RegionRecord(
            id=k,
            level=level,
            pixel_count=int(counts[k]),
            centroid=(row_sums[k] / counts[k], col_sums[k] / counts[k]),
            mean_intensity=sums[k] / counts[k],
            bbox=(int(row0[k]), int(col0[k]), int(row1[k]), int(col1[k])),
        )
        for k in range(n)
    ]


def link_parents(records: list[RegionRecord], labels: np.ndarray, labels_up: np.ndarray) -> list[RegionRecord]:
    """Set each record's parent to the coarser-level id owning most of its pixels.

    The child->parent pixel map is (i, j) -> (i // 2, j // 2); ties go to the
    lower parent id.
    """
    labels = np.asarray(labels)
    labels_up = np.asarray(labels_up)
    h, w = labels.shape
    uh, uw = labels_up.shape
    if (h + 1) // 2 != uh or (w + 1) // 2 != uw:
        raise ValueError("parent level dims must be the ceil-halving of the child dims")
    parent_grid = np.repeat(np.repeat(labels_up, 2, axis=0), 2, axis=1)[:h, :w]
    n_up = int(labels_up.max()) + 1
    combined = labels.ravel().astype(np.int64) * n_up + parent_grid.ravel().astype(np.int64)
    uniq, cnt = np.unique(combined, return_counts=True)
    child_ids = uniq // n_up
    parent_ids = uniq % n_up
    # per child: max count, tie toward the lower parent id
    order = np.lexsort((parent_ids, -cnt, child_ids))
    firsts = np.unique(child_ids[order], return_index=True)[1]
    best = dict(zip(child_ids[order][firsts].tolist(), parent_ids[order][firsts].tolist()))
    for rec in records:
        rec.parent_id = int(best[rec.id])
    return records


def _adjacent_pairs(labels: np.ndarray) -> np.ndarray:
    """Distinct (lo, hi) id pairs sharing a 4-connected border."""
    a = np.concatenate([labels[:, :-1].ravel(), labels[:-1, :].ravel()])
    b = np.concatenate([labels[:, 1:].ravel(), labels[1:, :].ravel()])
    diff = a != b
    lo = np.minimum(a[diff], b[diff]).astype(np.int64)
    hi = np.maximum(a[diff], b[diff]).astype(np.int64)
    n = int(labels.max()) + 1
    return np.unique(lo * n + hi)


def compute_relations(records: list[RegionRecord], labels: np.ndarray) -> list[RegionRecord]:
    """Fill adjacency lists and the contains / left-of / above relations.

    B is contained in A when A is B's only adjacent region, i.e. every border
    pixel of B touches only A or B.  For an adjacent pair, A is left of B when
    centroid_col(A) + 0.5 < centroid_col(B); `above` is the row analog.
    """
    labels = np.asarray(labels)
    n = int(labels.max()) + 1
    pairs = _adjacent_pairs(labels)
    neighbors: dict[int, list[int]] = {rec.id: [] for rec in records}
    for code in pairs.tolist():
        lo, hi = code // n, code % n
        neighbors[lo].append(hi)
        neighbors[hi].append(lo)
    by_id = {rec.id: rec for rec in records}
    relations: dict[int, list[tuple[str, int]]] = {rec.id: [] for rec in records}
    for rec in records:
        rec.adjacent = sorted(neighbors[rec.id])
        if len(rec.adjacent) == 1:
            holder = rec.adjacent[0]
            relations[holder].append(("contains", rec.id))
            relations[rec.id].append(("sub-part-of", holder))
    for code in pairs.tolist():
        lo, hi = code // n, code % n
        for a, b in ((lo, hi), (hi, lo)):
            if by_id[a].centroid[1] + 0.5 < by_id[b].centroid[1]:
                relations[a].append(("left-of", b))
            if by_id[a].centroid[0] + 0.5 < by_id[b].centroid[0]:
                relations[a].append(("above", b))
    for rec in records:
        rec.relations = sorted(relations[rec.id])
    return records


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        out = f"{float(value):.6f}"
        return "0.000000" if out == "-0.000000" else out
    if isinstance(value, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{_fmt(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def dumps_canonical(obj) -> bytes:
    """Serialize to byte-stable JSON: insertion-ordered keys, 6-decimal reals."""
    return (_fmt(obj) + "\n").encode("ascii")


def registry_document(result: SegmentationResult) -> dict:
    """The registry.json document for a segmentation result."""
    base = result.levels[-1].labels
    params = result.params
    doc = {
        "image": {"width": int(base.shape[1]), "height": int(base.shape[0])},
        "params": {
            "top_area": params.get("top_area"),
            "tolerance": params.get("tolerance"),
            "epsilon": params.get("epsilon"),
            "max_iters": params.get("max_iters"),
            "connectivity": params.get("connectivity"),
        },
        "levels": [],
    }
    for entry in result.levels:
        h, w = entry.labels.shape
        doc["levels"].append(
            {
                "level": int(entry.level),
                "width": int(w),
                "height": int(h),
                "region_count": len(entry.records),
                "regions": [
                    {
                        "id": rec.id,
                        "pixel_count": rec.pixel_count,
                        "centroid": [float(rec.centroid[0]), float(rec.centroid[1])],
                        "mean": float(rec.mean_intensity),
                        "bbox": list(rec.bbox),
                        "parent": rec.parent_id,
                        "emerged": rec.emerged,
                        "adjacent": rec.adjacent,
                        "relations": [{"kind": kind, "other": other} for kind, other in rec.relations],
                    }
                    for rec in entry.records
                ],
            }
        )
    return doc


def export_registry(result: SegmentationResult) -> bytes:
    """Canonical registry.json bytes; identical results give identical bytes."""
    return dumps_canonical(registry_document(result))
