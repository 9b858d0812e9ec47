"""Figure rendering for suite reports.

Every function takes plain data plus an output path, draws with the
Agg backend, writes a PNG, and returns the path. Figures are a visual
companion to the delimited output, never the data of record.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "fig_predicted_vs_empirical",
    "fig_loglog_scaling",
    "fig_gap_histogram",
    "fig_drift",
    "fig_residuals",
]


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_predicted_vs_empirical(labels, predicted, mean, std, path) -> Path:
    """Scatter of empirical means (with error bars) against predictions."""
    predicted = np.asarray(predicted, dtype=float)
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    ax.errorbar(predicted, mean, yerr=std, fmt="o", capsize=3, color="tab:blue")
    lo = min(predicted.min(), mean.min())
    hi = max(predicted.max(), mean.max())
    pad = 0.05 * (hi - lo + 1e-12)
    line = np.array([lo - pad, hi + pad])
    ax.plot(line, line, "k--", linewidth=1, label="agreement")
    for x, y, lab in zip(predicted, mean, labels):
        ax.annotate(lab, (x, y), textcoords="offset points", xytext=(4, 4), fontsize=7)
    ax.set_xlabel("predicted value")
    ax.set_ylabel("empirical mean")
    ax.set_title("Concentration predictions vs Monte Carlo")
    ax.legend(loc="best")
    return _finish(fig, path)


def fig_loglog_scaling(series, fits, path) -> Path:
    """Deviation-vs-dimension log-log plot with fitted power laws.

    series: dict name -> (dims, deviations); fits: dict name -> (slope,
    intercept) in log-log coordinates.
    """
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    for name, (dims, devs) in series.items():
        dims = np.asarray(dims, dtype=float)
        devs = np.asarray(devs, dtype=float)
        ax.loglog(dims, devs, "o", label=f"{name} measured")
        fit = fits.get(name)
        if fit is not None:
            slope, intercept = fit
            xs = np.geomspace(dims.min(), dims.max(), 64)
            ax.loglog(
                xs,
                np.exp(intercept) * xs**slope,
                "--",
                linewidth=1,
                label=f"{name} slope {slope:.2f}",
            )
    ax.set_xlabel("dimension N")
    ax.set_ylabel("deviation")
    ax.set_title("Deviation scaling with dimension")
    ax.legend(loc="best", fontsize=8)
    return _finish(fig, path)


def fig_gap_histogram(gaps, path, bins: int = 30) -> Path:
    """Distribution of target-value gaps across paired runs."""
    gaps = np.asarray(gaps, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(gaps, bins=bins, color="tab:green", alpha=0.8, edgecolor="black")
    ax.axvline(0.0, color="k", linewidth=1, linestyle="--")
    mean = float(gaps.mean()) if gaps.size else math.nan
    ax.set_xlabel("gap = phi(basic limit) - phi(superiorized limit)")
    ax.set_ylabel("count")
    ax.set_title(f"Paired-run gaps (mean {mean:.4g})")
    return _finish(fig, path)


def fig_drift(ks, rms_angles, slope, intercept, path) -> Path:
    """RMS direction drift against step count, log-log, with fit."""
    ks = np.asarray(ks, dtype=float)
    rms = np.asarray(rms_angles, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(ks, rms, "o", color="tab:red", label="RMS drift")
    xs = np.geomspace(ks.min(), ks.max(), 64)
    ax.loglog(
        xs,
        np.exp(intercept) * xs**slope,
        "--",
        color="tab:red",
        linewidth=1,
        label=f"fit slope {slope:.2f}",
    )
    ax.set_xlabel("steps since perturbation")
    ax.set_ylabel("RMS angle (rad)")
    ax.set_title("Propagated-direction drift")
    ax.legend(loc="best")
    return _finish(fig, path)


def fig_residuals(values, path, title, ylabel) -> Path:
    """Per-instance residual magnitudes on a log scale."""
    values = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    floor = 1e-18
    ax.bar(np.arange(values.size), np.maximum(values, floor), color="tab:purple")
    ax.set_yscale("log")
    ax.set_xlabel("instance")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    return _finish(fig, path)
