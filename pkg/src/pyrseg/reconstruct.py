"""Rebuild generalized intensity maps from the registry and score fidelity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pyramid import Pyramid
from .registry import RegionRecord, SegmentationResult, dumps_canonical


class RegistryMismatchError(ValueError):
    """Raised when a label map and a registry disagree about the id set."""


@dataclass(frozen=True)
class LevelReport:
    level: int
    region_count: int
    rmse_vs_level_image: float
    uncertain_fraction: float
    iterations_used: int


def reconstruct_level(labels: np.ndarray, records: list[RegionRecord]) -> np.ndarray:
    """Fill every region with its registered mean intensity."""
    labels = np.asarray(labels)
    n = int(labels.max()) + 1
    means = np.full(n, np.nan)
    for rec in records:
        if 0 <= rec.id < n:
            means[rec.id] = rec.mean_intensity
    missing = np.setdiff1d(np.unique(labels), [rec.id for rec in records])
    if len(missing):
        raise RegistryMismatchError(f"no record for present ids {missing.tolist()}")
    return means[labels]


def rmse(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("rmse requires equal dims")
    diff = a - b
    return float(np.sqrt(np.mean(diff * diff)))


def level_report(result: SegmentationResult, pyr: Pyramid) -> list[LevelReport]:
    """One fidelity/effort report per level, ordered top to base."""
    reports = []
    for entry in result.levels:
        img = pyr.levels[entry.level]
        recon = reconstruct_level(entry.labels, entry.records)
        reports.append(
            LevelReport(
                level=entry.level,
                region_count=len(entry.records),
                rmse_vs_level_image=rmse(recon, img),
                uncertain_fraction=entry.uncertain_count / img.size,
                iterations_used=entry.iterations_used,
            )
        )
    return reports


def export_stats(reports: list[LevelReport]) -> bytes:
    """Canonical stats.json bytes for a report list."""
    doc = [
        {
            "level": r.level,
            "region_count": r.region_count,
            "rmse_vs_level_image": float(r.rmse_vs_level_image),
            "uncertain_fraction": float(r.uncertain_fraction),
            "iterations_used": r.iterations_used,
        }
        for r in reports
    ]
    return dumps_canonical(doc)
