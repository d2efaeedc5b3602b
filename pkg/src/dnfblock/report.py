"""Report rendering: stage timings as CSV and summary figures as PNGs.

This is the only module that touches matplotlib; everything else stays
plot-free so library users pay for plotting only when they ask for it.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

TIMINGS_HEADER = ("stage", "seconds")


def save_timings_csv(timings: list[tuple[str, float]], path: str | Path) -> None:
    """Per-stage wall times, one row per stage, in run order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TIMINGS_HEADER)
        for stage, seconds in timings:
            writer.writerow([stage, f"{seconds:.6f}"])


def render_metric_figure(metrics: dict, path: str | Path) -> None:
    """Bar chart of the blocking quality metrics."""
    names = ["rr", "pc", "pq", "fscore"]
    values = [float(metrics[name]) for name in names]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    bars = ax.bar(names, values, color="#4878a8")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("value")
    ax.set_title("blocking quality")
    for bar, value in zip(bars, values):
        ax.annotate(
            f"{value:.3f}",
            (bar.get_x() + bar.get_width() / 2, value),
            ha="center",
            va="bottom",
            fontsize=8,
        )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_timing_figure(timings: list[tuple[str, float]], path: str | Path) -> None:
    """Horizontal bar chart of per-stage wall times."""
    stages = [stage for stage, _ in timings]
    seconds = [sec for _, sec in timings]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.barh(stages, seconds, color="#6aa84f")
    ax.invert_yaxis()
    ax.set_xlabel("seconds")
    ax.set_title("stage wall time")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_figures(
    out_dir: str | Path,
    metrics: dict | None,
    timings: list[tuple[str, float]],
) -> list[Path]:
    """Render whatever figures the available data supports; returns the
    written paths."""
    out = Path(out_dir)
    written: list[Path] = []
    if metrics is not None:
        target = out / "fig_metrics.png"
        render_metric_figure(metrics, target)
        written.append(target)
    if timings:
        target = out / "fig_timings.png"
        render_timing_figure(timings, target)
        written.append(target)
    return written
