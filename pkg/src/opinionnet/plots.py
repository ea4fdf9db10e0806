"""Static SVG plots: consensus-rate curves and opinion-trajectory fans.

Output is write-only and deterministic: fixed hash salt, no timestamp
metadata, so identical inputs produce identical files.
"""

from __future__ import annotations

import math
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .engine import RunHistory
from .experiments import SweepRow

_SAVE_OPTS = dict(format="svg", metadata={"Date": None})


def _deterministic_rc():
    return matplotlib.rc_context({"svg.hashsalt": "opinionnet"})


def consensus_rate_figure(rows: list[SweepRow]):
    """Consensus rate vs rigid fraction: one panel per sigma, one line per
    (rigid, flexible) tolerance pair."""
    sigmas = sorted({r.sigma_deg for r in rows})
    pairs = sorted({(r.theta_r_deg, r.theta_f_deg) for r in rows})
    fig, axes = plt.subplots(
        len(sigmas), 1, figsize=(6.0, 2.8 * len(sigmas)), squeeze=False, sharex=True
    )
    for ax, sigma in zip(axes[:, 0], sigmas):
        for theta_r, theta_f in pairs:
            line = sorted(
                (r.rigid_fraction, r.consensus_rate)
                for r in rows
                if r.sigma_deg == sigma and (r.theta_r_deg, r.theta_f_deg) == (theta_r, theta_f)
            )
            if not line:
                continue
            xs, ys = zip(*line)
            ax.plot(xs, ys, marker="o", markersize=3,
                    label=f"tol R={theta_r:g}, F={theta_f:g}")
        ax.set_ylabel("consensus rate")
        ax.set_ylim(-0.05, 1.05)
        ax.set_title(f"spread sigma = {sigma:g} deg", fontsize=10)
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel("rigid fraction")
    axes[0, 0].legend(fontsize=8)
    fig.tight_layout()
    return fig


def trajectory_figure(history: RunHistory):
    """Per-agent opinion angle (degrees) against time."""
    if not history.opinions:
        raise ValueError("history has no opinion snapshots")
    ts = [t for t, _ in history.opinions]
    theta = np.degrees(np.stack([snap for _, snap in history.opinions]))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for agent in range(theta.shape[1]):
        ax.plot(ts, theta[:, agent], color="tab:blue", alpha=0.25, linewidth=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("opinion (deg)")
    ax.set_ylim(0, 180)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def emit_plots(
    table: list[SweepRow] | None,
    histories: dict[str, RunHistory] | None,
    out_dir: str | Path,
    enabled: bool = True,
) -> list[Path]:
    """Render available figures as SVG files under out_dir."""
    if not enabled:
        warnings.warn("plot emission is disabled by configuration; skipping")
        return []
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    with _deterministic_rc():
        if table:
            fig = consensus_rate_figure(table)
            path = out_dir / "consensus_rates.svg"
            fig.savefig(path, **_SAVE_OPTS)
            plt.close(fig)
            written.append(path)
        if histories:
            for run_id in sorted(histories):
                history = histories[run_id]
                if not history.opinions:
                    continue
                fig = trajectory_figure(history)
                path = out_dir / f"trajectories_{run_id}.svg"
                fig.savefig(path, **_SAVE_OPTS)
                plt.close(fig)
                written.append(path)
    return written
