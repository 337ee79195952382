"""Coarse-to-fine pyramid segmentation with an executable region registry.

Grayscale images are numpy float64 arrays of shape (height, width) with
values in [0, 255]; label maps are int32 arrays of the same shape whose ids
are dense from 0.  The pipeline squeezes the input into an averaging
pyramid, segments only the tiny top level, propagates labels downward with
per-level refinement, and registers every region's description so each
level can be rebuilt from the registry alone.
"""

from .netpbm import load_pgm, save_label_ppm, save_pgm
from .pipeline import RunParams, run_pipeline
from .pyramid import Pyramid, build_pyramid, shrink_once
from .reconstruct import LevelReport, level_report, reconstruct_level, rmse
from .refine import DescentParams, LevelResult, descend, expand_maps, find_uncertain, refine_level
from .registry import (
    RegionRecord,
    SegmentationResult,
    compute_relations,
    export_registry,
    link_parents,
    register_level,
)
from .segment import relabel_connected, segment_top
from .synth import SceneSpec, compare_labelings, generate_scene, random_scene_spec

__all__ = [
    "DescentParams",
    "LevelReport",
    "LevelResult",
    "Pyramid",
    "RegionRecord",
    "RunParams",
    "SceneSpec",
    "SegmentationResult",
    "build_pyramid",
    "compare_labelings",
    "compute_relations",
    "descend",
    "expand_maps",
    "export_registry",
    "find_uncertain",
    "generate_scene",
    "level_report",
    "link_parents",
    "load_pgm",
    "random_scene_spec",
    "reconstruct_level",
    "refine_level",
    "register_level",
    "relabel_connected",
    "rmse",
    "run_pipeline",
    "save_label_ppm",
    "save_pgm",
    "segment_top",
    "shrink_once",
]
