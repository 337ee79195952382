"""Synthetic piecewise-constant scenes with exact ground-truth labelings."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .segment import relabel_connected

Rect = tuple[tuple[int, int, int, int], float]  # ((row0, col0, row1, col1), intensity)


@dataclass(frozen=True)
class SceneSpec:
    """Rectangles painted in order over a constant background.

    Distinct intensities anywhere in the scene must differ by at least
    min_gap gray levels; bounding boxes are inclusive and are clipped to the
    image, but must stay non-empty.
    """

    width: int
    height: int
    background: float = 0.0
    rectangles: list[Rect] = field(default_factory=list)
    seed: int = 0
    min_gap: float = 0.0

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("scene dims must be >= 1")
        values = {float(self.background)}
        for (r0, c0, r1, c1), v in self.rectangles:
            if not (0 <= v <= 255):
                raise ValueError(f"intensity {v} outside [0, 255]")
            if min(r1, self.height - 1) < max(r0, 0) or min(c1, self.width - 1) < max(c0, 0):
                raise ValueError(f"rectangle {(r0, c0, r1, c1)} is empty after clipping")
            values.add(float(v))
        if not (0 <= self.background <= 255):
            raise ValueError(f"background {self.background} outside [0, 255]")
        ordered = sorted(values)
        for a, b in zip(ordered, ordered[1:]):
            if b - a < self.min_gap:
                raise ValueError(f"intensities {a} and {b} closer than min_gap {self.min_gap}")


def generate_scene(spec: SceneSpec) -> tuple[np.ndarray, np.ndarray]:
    """Paint the scene and label its maximal 4-connected constant components."""
    spec.validate()
    img = np.full((spec.height, spec.width), float(spec.background))
    for (r0, c0, r1, c1), v in spec.rectangles:
        img[max(r0, 0) : r1 + 1, max(c0, 0) : c1 + 1] = float(v)
    _, classes = np.unique(img, return_inverse=True)
    truth = relabel_connected(classes.reshape(img.shape).astype(np.int32), connectivity=4)
    return img, truth


def _alignment(width: int, height: int, top_area: int = 256) -> int:
    """Averaging-block size of the deepest pyramid level for these dims."""
    g, w, h = 1, width, height
    while w * h > top_area:
        w, h = (w + 1) // 2, (h + 1) // 2
        g *= 2
    return g


def random_scene_spec(
    width: int,
    height: int,
    n_rects: int,
    min_gap: float,
    seed: int,
    align: int | None = None,
) -> SceneSpec:
    """Sample a valid scene: grid-spaced intensities, rects fully inside.

    Placement snaps to the averaging grid of the deepest pyramid level
    (override with align), so plateau borders land on block boundaries at
    every scale and no level contains mixed border pixels.  Averaging a
    border that cuts through a block yields intermediate values that are
    genuinely ambiguous at coarse scales, which the descent cannot undo;
    aligned scenes keep the benchmark's ground truth recoverable (see
    compare_labelings).  Rectangle sides span one to roughly a third of the
    image in grid blocks; intensities come from the coarsest grid honoring
    min_gap, excluding the background value.  Uses the frozen legacy
    RandomState stream so specs are stable across library versions.
    """
    if min_gap < 1 or min_gap > 255:
        raise ValueError("min_gap must be in [1, 255]")
    g = _alignment(width, height) if align is None else int(align)
    bw, bh = width // g, height // g
    if bw < 2 or bh < 2:
        raise ValueError(f"image too small for {g}-aligned placement")
    rng = np.random.RandomState(seed)
    values = list(range(0, 256, int(min_gap)))
    background = float(values[rng.randint(len(values))])
    foreground = [v for v in values if v != background]
    rectangles: list[Rect] = []
    for _ in range(n_rects):
        rh = int(rng.randint(1, max(2, bh // 3) + 1))
        rw = int(rng.randint(1, max(2, bw // 3) + 1))
        r0 = int(rng.randint(0, bh - rh + 1))
        c0 = int(rng.randint(0, bw - rw + 1))
        v = float(foreground[rng.randint(len(foreground))])
        rectangles.append(((r0 * g, c0 * g, (r0 + rh) * g - 1, (c0 + rw) * g - 1), v))
    return SceneSpec(
        width=width,
        height=height,
        background=background,
        rectangles=rectangles,
        seed=seed,
        min_gap=float(min_gap),
    )


def spec_from_json(doc: dict) -> SceneSpec:
    """Build a SceneSpec from its JSON form; randomizes when rects are absent.

    Fields: width, height, background, rectangles ([{bbox, intensity}]),
    seed, min_gap.  When "rectangles" is missing, "n_rects" rectangles are
    placed deterministically from the seed.
    """
    try:
        width = int(doc["width"])
        height = int(doc["height"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"scene spec needs integer width/height: {exc}") from exc
    seed = int(doc.get("seed", 0))
    min_gap = float(doc.get("min_gap", 0.0))
    if "rectangles" not in doc:
        n_rects = int(doc.get("n_rects", 0))
        spec = random_scene_spec(width, height, n_rects, max(min_gap, 1.0), seed)
    else:
        rects: list[Rect] = []
        for item in doc["rectangles"]:
            bbox = tuple(int(x) for x in item["bbox"])
            if len(bbox) != 4:
                raise ValueError(f"bbox must have 4 entries, got {item['bbox']}")
            rects.append((bbox, float(item["intensity"])))
        spec = SceneSpec(
            width=width,
            height=height,
            background=float(doc.get("background", 0.0)),
            rectangles=rects,
            seed=seed,
            min_gap=min_gap,
        )
    spec.validate()
    return spec


def compare_labelings(pred: np.ndarray, truth: np.ndarray) -> tuple[bool, float]:
    """(exact up to renaming, misassigned fraction under greedy majority map).

    Exactness holds iff some id bijection makes the maps equal.  The error
    metric maps every predicted id to the truth id it overlaps most (ties to
    the lower truth id) and counts the pixels that disagree.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("label maps must have equal dims")
    n_truth = int(truth.max()) + 1
    pairs = pred.ravel().astype(np.int64) * n_truth + truth.ravel().astype(np.int64)
    uniq, cnt = np.unique(pairs, return_counts=True)
    pred_ids = uniq // n_truth
    truth_ids = uniq % n_truth
    n_pred = len(np.unique(pred_ids))
    exact = len(uniq) == n_pred and len(uniq) == len(np.unique(truth_ids))
    order = np.lexsort((truth_ids, -cnt, pred_ids))
    firsts = np.unique(pred_ids[order], return_index=True)[1]
    mapping = dict(zip(pred_ids[order][firsts].tolist(), truth_ids[order][firsts].tolist()))
    mapped = np.array([mapping[p] for p in pred_ids.tolist()], dtype=np.int64)
    wrong = int(cnt[mapped != truth_ids].sum())
    return bool(exact), wrong / pred.size
