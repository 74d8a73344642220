"""Render run outputs to figures, next to the delimited files they come from."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import success_rate_histogram
from .runio import etr_curve, read_runlog

__all__ = ["render_run_figures", "render_comparison"]

_FIG_KW = {"figsize": (7.0, 4.0), "dpi": 150}


def render_run_figures(run_dir: Path) -> list[Path]:
    """ETR curve, capability trace, and success-count heatmap for one run."""
    run_dir = Path(run_dir)
    log = read_runlog(run_dir / "runlog.jsonl")
    written = []
    if not log.records:
        return written

    curve = etr_curve(log)
    fig, ax = plt.subplots(**_FIG_KW)
    ax.plot(curve.steps, curve.values, lw=1.5)
    ax.set_xlabel("step")
    ax.set_ylabel("effective task ratio")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    out = run_dir / "etr.png"
    fig.savefig(out, bbox_inches="tight")
    plt.close(fig)
    written.append(out)

    mu = [r.mu_momentum for r in log.records]
    if all(m is not None for m in mu):
        fig, ax = plt.subplots(**_FIG_KW)
        ax.plot([r.step for r in log.records], mu, lw=1.5, color="tab:orange")
        ax.set_xlabel("step")
        ax.set_ylabel("capability estimate")
        ax.grid(alpha=0.3)
        out = run_dir / "capability.png"
        fig.savefig(out, bbox_inches="tight")
        plt.close(fig)
        written.append(out)

    grid = success_rate_histogram(log)
    fig, ax = plt.subplots(**_FIG_KW)
    im = ax.imshow(
        grid.T, aspect="auto", origin="lower", interpolation="nearest",
        cmap="viridis",
    )
    ax.set_xlabel("step")
    ax.set_ylabel("successes per task")
    fig.colorbar(im, ax=ax, label="batch proportion")
    out = run_dir / "success_heatmap.png"
    fig.savefig(out, bbox_inches="tight")
    plt.close(fig)
    written.append(out)
    return written


def render_comparison(run_dirs: list[Path], out_dir: Path) -> Path:
    """Overlay the runs' ETR curves, labeled by directory name."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(**_FIG_KW)
    for run_dir in run_dirs:
        log = read_runlog(Path(run_dir) / "runlog.jsonl")
        if not log.records:
            continue
        curve = etr_curve(log)
        ax.plot(curve.steps, curve.values, lw=1.5, label=Path(run_dir).name)
    ax.set_xlabel("step")
    ax.set_ylabel("effective task ratio")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    out = out_dir / "etr_comparison.png"
    fig.savefig(out, bbox_inches="tight")
    plt.close(fig)
    return out
