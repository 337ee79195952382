"""Report figures for a finished run."""

from __future__ import annotations

import io


def render_report_png(rows: list[dict]) -> bytes:
    """Plot per-level region counts, fidelity and refinement effort.

    `rows` are stats.json entries (top level first); returns PNG bytes.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    levels = [r["level"] for r in rows]
    fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.2))
    panels = [
        ("region_count", "regions", axes[0]),
        ("rmse_vs_level_image", "rmse (gray levels)", axes[1]),
        ("uncertain_fraction", "uncertain fraction", axes[2]),
    ]
    for key, label, ax in panels:
        ax.plot(levels, [r[key] for r in rows], marker="o", color="#1f6fb4")
        ax.set_xlabel("pyramid level")
        ax.set_ylabel(label)
        ax.invert_xaxis()  # read coarse-to-fine, matching the descent
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=110)
    plt.close(fig)
    return buf.getvalue()
