"""Shared slow-but-obvious reference implementations used as test oracles.

Everything here is written the naive way on purpose: nested loops, no
vectorization, no shared helpers with the package.  When a production
routine and its oracle agree, the agreement is evidence, not tautology.
"""

from __future__ import annotations

import numpy as np
import pytest


def shrink_oracle(img: np.ndarray) -> np.ndarray:
    """Per-parent mean of the up-to-four children, one pixel at a time."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    ph, pw = (h + 1) // 2, (w + 1) // 2
    out = np.zeros((ph, pw), dtype=np.float64)
    for pr in range(ph):
        for pc in range(pw):
            acc, cnt = 0.0, 0
            for dr in (0, 1):
                for dc in (0, 1):
                    r, c = 2 * pr + dr, 2 * pc + dc
                    if r < h and c < w:
                        acc += img[r, c]
                        cnt += 1
            out[pr, pc] = acc / cnt
    return out


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def union_find_components(labels: np.ndarray, connectivity: int = 4) -> np.ndarray:
    """Two-pass union-find relabeling; ids dense by raster-first pixel."""
    labels = np.asarray(labels)
    h, w = labels.shape
    dsu = _DSU(h * w)
    offsets = [(-1, 0), (0, -1)]
    if connectivity == 8:
        offsets += [(-1, -1), (-1, 1)]
    for r in range(h):
        for c in range(w):
            for dr, dc in offsets:
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w and labels[nr, nc] == labels[r, c]:
                    dsu.union(nr * w + nc, r * w + c)
    out = np.empty((h, w), dtype=np.int32)
    remap: dict[int, int] = {}
    for r in range(h):
        for c in range(w):
            root = dsu.find(r * w + c)
            if root not in remap:
                remap[root] = len(remap)
            out[r, c] = remap[root]
    return out


def region_records_oracle(labels: np.ndarray, img: np.ndarray) -> dict[int, dict]:
    """Per-id count/centroid/mean/bbox from raw loops over the pixels."""
    labels = np.asarray(labels)
    img = np.asarray(img, dtype=np.float64)
    h, w = labels.shape
    stats: dict[int, dict] = {}
    for r in range(h):
        for c in range(w):
            k = int(labels[r, c])
            s = stats.setdefault(
                k,
                {"count": 0, "rsum": 0.0, "csum": 0.0, "isum": 0.0,
                 "r0": r, "c0": c, "r1": r, "c1": c},
            )
            s["count"] += 1
            s["rsum"] += r
            s["csum"] += c
            s["isum"] += img[r, c]
            s["r0"] = min(s["r0"], r)
            s["c0"] = min(s["c0"], c)
            s["r1"] = max(s["r1"], r)
            s["c1"] = max(s["c1"], c)
    for k, s in stats.items():
        s["centroid"] = (s["rsum"] / s["count"], s["csum"] / s["count"])
        s["mean"] = s["isum"] / s["count"]
        s["bbox"] = (s["r0"], s["c0"], s["r1"], s["c1"])
    return stats


def splitmix64_ref(x: int) -> int:
    """Plain-integer splitmix64 finalizer (reference constants)."""
    mask = (1 << 64) - 1
    z = (x + 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return z ^ (z >> 31)


def adjacency_oracle(labels: np.ndarray) -> dict[int, set[int]]:
    """4-neighbor adjacency sets by scanning every pixel pair."""
    labels = np.asarray(labels)
    h, w = labels.shape
    out: dict[int, set[int]] = {int(k): set() for k in np.unique(labels)}
    for r in range(h):
        for c in range(w):
            for dr, dc in ((0, 1), (1, 0)):
                nr, nc = r + dr, c + dc
                if nr < h and nc < w and labels[nr, nc] != labels[r, c]:
                    a, b = int(labels[r, c]), int(labels[nr, nc])
                    out[a].add(b)
                    out[b].add(a)
    return out


@pytest.fixture(scope="session")
def corpus():
    """The 50-scene benchmark: seeded 256x256 scenes, 3-8 rectangles, gap 60.

    Returns {"runs": [...], "seconds": wall time for generation + pipeline}.
    """
    import time

    from pyrseg import generate_scene, random_scene_spec
    from pyrseg.pipeline import run_pipeline

    runs = []
    started = time.perf_counter()
    for seed in range(50):
        spec = random_scene_spec(256, 256, 3 + seed % 6, 60, seed=seed)
        img, truth = generate_scene(spec)
        pyr, result, reports = run_pipeline(img)
        runs.append({
            "seed": seed, "spec": spec, "img": img, "truth": truth,
            "pyr": pyr, "result": result, "reports": reports,
        })
    return {"runs": runs, "seconds": time.perf_counter() - started}
