"""Averaging pyramid: repeated 4-children-to-1-parent shrinking.

Every pyramid intensity is a mean of up to four child values whose count is
a power of two, so level values stay exact dyadic rationals in float64 and
all downstream mean arithmetic is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOP_AREA = 256


@dataclass(frozen=True)
class Pyramid:
    """Image hierarchy; levels[0] is the input, levels[-1] the smallest."""

    levels: list[np.ndarray] = field(default_factory=list)
    top_area_max: int = DEFAULT_TOP_AREA

    @property
    def top(self) -> np.ndarray:
        return self.levels[-1]

    @property
    def top_level(self) -> int:
        return len(self.levels) - 1


def shrink_once(img: np.ndarray) -> np.ndarray:
    """Average each 2x2 child block into one parent pixel.

    Output dims are (ceil(H/2), ceil(W/2)).  On odd edges a parent averages
    the 2 or 1 children that exist.  Children are accumulated in fixed
    NW, NE, SW, SE order.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    ph, pw = (h + 1) // 2, (w + 1) // 2
    sums = np.zeros((ph, pw), dtype=np.float64)
    counts = np.zeros((ph, pw), dtype=np.float64)
    for dr, dc in ((0, 0), (0, 1), (1, 0), (1, 1)):
        child = img[dr::2, dc::2]
        sums[: child.shape[0], : child.shape[1]] += child
        counts[: child.shape[0], : child.shape[1]] += 1.0
    return sums / counts


def build_pyramid(img: np.ndarray, top_area_max: int = DEFAULT_TOP_AREA) -> Pyramid:
    """Shrink until the top level has at most top_area_max pixels."""
    if top_area_max < 1:
        raise ValueError("top_area_max must be >= 1")
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("image must be a non-empty 2-D array")
    levels = [img]
    while levels[-1].size > top_area_max:
        levels.append(shrink_once(levels[-1]))
    return Pyramid(levels=levels, top_area_max=top_area_max)
