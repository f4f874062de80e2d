"""Figures for sweep curves, difference maps and CSF curves (written to files)."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .color import TristimulusImage, srgb_encode, xyz_to_linear_srgb  # noqa: E402

_MARKERS = {"ICAM02": "o", "IDIFF": "s", "ICAMDIFF": "^"}


def display_rgb(img: TristimulusImage) -> np.ndarray:
    """sRGB-encoded preview; data is taken as relative to the display peak."""
    return srgb_encode(xyz_to_linear_srgb(img.data))


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_sweep(report, path, metric: str = "agg_e") -> Path:
    """Mean pooled score against the swept parameter, baseline and edge-aware side by side.

    Error bars are the standard deviation over scenes.
    """
    variants = [v for v in ("baseline", "edge-aware") if any(r.variant == v for r in report.rows)]
    fig, axes = plt.subplots(1, len(variants), figsize=(5 * len(variants), 3.8), squeeze=False,
                             sharey=True)
    log_x = report.sweep.parameter.value == "BaseContrast"
    for ax, variant in zip(axes[0], variants):
        for model, v in report.configs:
            if v != variant:
                continue
            xs, mean = report.series(model, variant, metric=metric)
            per_scene = np.array([report.series(model, variant, s, metric)[1]
                                  for s in report.scenes])
            ax.errorbar(xs, mean, yerr=per_scene.std(axis=0), marker=_MARKERS.get(model, "o"),
                        capsize=3, label=model)
        if log_x:
            ax.set_xscale("log")
        ax.axvline(report.sweep.reference_value, color="0.7", lw=0.8, ls="--")
        ax.set_title(variant)
        ax.set_xlabel(report.sweep.parameter.value)
        ax.grid(alpha=0.3)
    axes[0][0].set_ylabel(f"pooled {metric}")
    axes[0][-1].legend(frameon=False)
    return _save(fig, path)


def plot_difference_maps(results: Mapping[str, object], path, reference=None, test=None) -> Path:
    """One column per labelled result; rows are total, intensity, chroma and hue maps."""
    rows = [("delta_e", "Total"), ("delta_i", "Intensity"), ("delta_c", "Chroma"), ("delta_h", "Hue")]
    labels = list(results)
    show_inputs = reference is not None and test is not None
    n_rows = len(rows) + (1 if show_inputs else 0)
    fig, axes = plt.subplots(n_rows, len(labels), figsize=(3.2 * len(labels), 3.0 * n_rows),
                             squeeze=False)
    r0 = 0
    if show_inputs:
        for ax, (img, name) in zip(axes[0], ((reference, "Reference"), (test, "Test"))):
            ax.imshow(display_rgb(img))
            ax.set_title(name)
        for ax in axes[0][2:]:
            ax.axis("off")
        r0 = 1
    for i, (key, name) in enumerate(rows):
        # shared colour scale per row so variants are comparable
        maps = [np.abs(getattr(results[lab], key)) for lab in labels]
        vmax = max(float(m.max()) for m in maps) or 1.0
        for j, (lab, m) in enumerate(zip(labels, maps)):
            ax = axes[r0 + i][j]
            im = ax.imshow(m, cmap="magma", vmin=0, vmax=vmax)
            ax.set_title(f"{name} ({lab})", fontsize=9)
        fig.colorbar(im, ax=list(axes[r0 + i]), shrink=0.8)
    for ax in axes.flat:
        ax.set_xticks([])
        ax.set_yticks([])
    return _save(fig, path)


def plot_csf(f: np.ndarray, curves: Mapping[str, np.ndarray], path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name, g in curves.items():
        ax.plot(f, g, label=name)
    ax.set_xlabel("spatial frequency (cycles/degree)")
    ax.set_ylabel("normalised sensitivity")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    return _save(fig, path)
