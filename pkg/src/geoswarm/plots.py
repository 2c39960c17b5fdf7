"""Matplotlib figures rendered next to the delimited report files."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Dict, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .scenario import RunReport


def _surface_contours(ax, surface, xs, ys, pad=4.0):
    x0, x1 = float(np.min(xs)) - pad, float(np.max(xs)) + pad
    y0, y1 = float(np.min(ys)) - pad, float(np.max(ys)) + pad
    gx, gy = np.meshgrid(np.linspace(x0, x1, 120), np.linspace(y0, y1, 120))
    gz = np.vectorize(lambda a, b: surface.height((a, b)))(gx, gy)
    cs = ax.contour(gx, gy, gz, levels=14, colors="gray", linewidths=0.5, alpha=0.6)
    ax.clabel(cs, inline=True, fontsize=6, fmt="%.0f")


def render_run_figure(report: RunReport, path) -> Path:
    """Chart-plane overview plus measurement series for one run."""
    geom = report.geometry
    if geom is None:
        raise ValueError("report carries no geometry")
    period = report.config["extension"]["period"]

    fig = plt.figure(figsize=(11, 5))
    gs = fig.add_gridspec(2, 2, width_ratios=[1.3, 1.0], hspace=0.35, wspace=0.25)
    ax_map = fig.add_subplot(gs[:, 0])
    ax_dist = fig.add_subplot(gs[0, 1])
    ax_ang = fig.add_subplot(gs[1, 1])

    lead = geom.leader.states
    ideal = geom.ideal.positions
    est = np.array([r.estimated for r in report.records if r.estimated is not None])
    all_x = np.concatenate([lead[:, 0], ideal[:, 0]])
    all_y = np.concatenate([lead[:, 1], ideal[:, 1]])
    _surface_contours(ax_map, geom.surface, all_x, all_y)
    ax_map.plot(lead[:, 0], lead[:, 1], "k-", lw=1.0, label="leader")
    ax_map.plot(ideal[:, 0], ideal[:, 1], "ro", ms=3.5, label="ideal")
    if len(est):
        ax_map.plot(est[:, 0], est[:, 1], "bx", ms=4.5, label="estimated")
    ax_map.set_xlabel("x")
    ax_map.set_ylabel("y")
    ax_map.set_title(f"{report.config['surface']['kind']} scenario")
    ax_map.legend(loc="best", fontsize=8)
    ax_map.set_aspect("equal", adjustable="datalim")

    ts = [r.t * period for r in report.records]
    meas_d = [r.meas_rel[0] for r in report.records]
    meas_a = [math.degrees(r.meas_rel[1]) for r in report.records]
    ax_dist.plot(ts, meas_d, "r.-", lw=0.8, ms=3, label="measured")
    ax_ang.plot(ts, meas_a, "r.-", lw=0.8, ms=3, label="measured")
    pred_pts = [
        (r.t * period, r.pred_rel[0], math.degrees(r.pred_rel[1]))
        for r in report.records
        if r.pred_rel is not None
    ]
    if pred_pts:
        pt, pd, pa = zip(*pred_pts)
        ax_dist.plot(pt, pd, "b.--", lw=0.8, ms=3, label="predicted")
        ax_ang.plot(pt, pa, "b.--", lw=0.8, ms=3, label="predicted")
    ax_dist.set_ylabel("distance")
    ax_dist.legend(fontsize=7)
    ax_ang.set_ylabel("angle (deg)")
    ax_ang.set_xlabel("time")

    return _save(fig, path)


def render_bar_figure(
    path,
    group_labels: Sequence[str],
    series: Dict[str, Sequence[float]],
    ylabel: str,
    title: str,
) -> Path:
    """Grouped bar chart for the comparison tables."""
    n_groups = len(group_labels)
    n_series = max(1, len(series))
    width = 0.8 / n_series
    x = np.arange(n_groups)

    fig, ax = plt.subplots(figsize=(7, 4))
    for i, (name, values) in enumerate(series.items()):
        offset = (i - (n_series - 1) / 2.0) * width
        ax.bar(x + offset, values, width=width * 0.92, label=name)
    ax.set_xticks(x)
    ax.set_xticklabels(group_labels)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1 or any(k for k in series):
        ax.legend(fontsize=8)
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
