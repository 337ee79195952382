"""End-to-end run: pyramid, top segmentation, descent, reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pyramid import DEFAULT_TOP_AREA, Pyramid, build_pyramid
from .reconstruct import LevelReport, level_report
from .refine import DEFAULT_CONNECTIVITY, DEFAULT_EPSILON, DEFAULT_MAX_ITERS, DescentParams, descend
from .registry import SegmentationResult
from .segment import DEFAULT_TOLERANCE, segment_top


@dataclass(frozen=True)
class RunParams:
    top_area: int = DEFAULT_TOP_AREA
    tolerance: float = DEFAULT_TOLERANCE
    epsilon: float = DEFAULT_EPSILON
    max_iters: int = DEFAULT_MAX_ITERS
    connectivity: int = DEFAULT_CONNECTIVITY

    def validate(self) -> None:
        if self.top_area < 1:
            raise ValueError("top-area must be >= 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")
        DescentParams(self.epsilon, self.max_iters, self.connectivity)


def run_pipeline(
    img: np.ndarray, params: RunParams = RunParams()
) -> tuple[Pyramid, SegmentationResult, list[LevelReport]]:
    """Segment an image coarse-to-fine; full segmentation runs only on the top."""
    params.validate()
    pyr = build_pyramid(img, params.top_area)
    top_labels, top_means = segment_top(pyr.top, params.tolerance)
    result = descend(pyr, (top_labels, top_means), DescentParams(params.epsilon, params.max_iters, params.connectivity))
    result.params = {"top_area": params.top_area, "tolerance": params.tolerance, **result.params}
    return pyr, result, level_report(result, pyr)
