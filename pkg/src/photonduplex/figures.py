"""Report figures rendered to files next to the delimited outputs.

All plots go through the Agg backend and write PNGs with fixed metadata so
repeated runs with the same seed produce byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .game import GameResult
from .protocol import (
    ProtocolParams,
    interval_success_probability,
    optimal_mean_detections,
)
from .security import Message
from .timing import TimingDataset, TimingResult, fit_gaussian

_PNG_METADATA = {"Software": "photonduplex"}
_DPI = 130


def _save(fig, path: str | Path) -> None:
    fig.savefig(Path(path), dpi=_DPI, metadata=_PNG_METADATA)
    plt.close(fig)


def sweep_figure(
    sweep: list[tuple[float, GameResult]], path: str | Path
) -> None:
    """Success probability vs visibility with the ideal line 0.5 (V + 1)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    vs = np.array([v for v, _ in sweep])
    succ = np.array([r.success_probability for _, r in sweep])
    errs = np.array([r.std_error for _, r in sweep])
    grid = np.linspace(0.0, 1.0, 101)
    ax.plot(grid, 0.5 * (grid + 1.0), color="0.4", lw=1.2, label="0.5 (V + 1)")
    ax.axhline(0.5, color="0.7", lw=1.0, ls="--", label="classical bound 1/2")
    ax.errorbar(
        vs, succ, yerr=errs, fmt="o", ms=4.5, capsize=2.5, color="C0",
        label="simulated game",
    )
    ax.set_xlabel("interferometric visibility V")
    ax.set_ylabel("success probability")
    ax.set_xlim(-0.03, 1.03)
    ax.set_ylim(0.42, 1.03)
    ax.legend(loc="lower right", frameon=False)
    fig.tight_layout()
    _save(fig, path)


def protocol_figure(
    params: ProtocolParams,
    measured_mean: float | None,
    measured_err: float | None,
    path: str | Path,
) -> None:
    """Interval success vs mean photon number at fixed p_s, with the optimum."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    p_s = params.per_photon_success
    m_grid = np.linspace(0.05, max(10.0, 1.5 * params.mean_detections), 400)
    succ = [interval_success_probability(m, p_s) for m in m_grid]
    ax.plot(m_grid, succ, color="C0", lw=1.4, label=f"analytic, p_s = {p_s:g}")
    if 0.5 < p_s < 1.0:
        m_opt = optimal_mean_detections(p_s)
        ax.axvline(m_opt, color="0.55", lw=1.0, ls=":")
        ax.annotate(
            f"m_opt = {m_opt:.3f}",
            xy=(m_opt, interval_success_probability(m_opt, p_s)),
            xytext=(m_opt + 0.25, interval_success_probability(m_opt, p_s) + 0.03),
            fontsize=9,
        )
    marker = interval_success_probability(params.mean_detections, p_s)
    ax.plot([params.mean_detections], [marker], "s", ms=6, color="C3",
            label=f"operating point m = {params.mean_detections:g}")
    if measured_mean is not None:
        ax.errorbar(
            [params.mean_detections], [measured_mean],
            yerr=None if not measured_err else [measured_err],
            fmt="o", ms=5, color="C2", capsize=3,
            label=f"Monte Carlo, r = {params.repetitions}",
        )
    ax.set_xlabel("mean detected photons per interval m")
    ax.set_ylabel("interval success probability")
    ax.legend(loc="lower right", frameon=False, fontsize=9)
    fig.tight_layout()
    _save(fig, path)


def _bitmap_axes(ax, message: Message, title: str) -> None:
    width, height = message.shape
    pixels = np.array(message.bits, dtype=float).reshape(height, width)
    ax.imshow(pixels, cmap="gray_r", vmin=0.0, vmax=1.0, interpolation="nearest")
    ax.set_title(title, fontsize=10)
    ax.set_xticks([])
    ax.set_yticks([])


def transmit_figure(
    sent: Message, received: Message, eve: Message, path: str | Path
) -> None:
    """Side-by-side bitmaps: what was sent, decoded, and leaked to Eve."""
    fig, axes = plt.subplots(1, 3, figsize=(7.5, 2.9))
    _bitmap_axes(axes[0], sent, "sent")
    _bitmap_axes(axes[1], received, "received")
    _bitmap_axes(axes[2], eve, "observer view (parities)")
    fig.tight_layout()
    _save(fig, path)


def g2_figure(
    g2: float, sigma: float, analytic: float, path: str | Path
) -> None:
    """Measured g2(0) with its Poisson error against the model expectation."""
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    ax.errorbar([0.0], [g2], yerr=[sigma], fmt="o", ms=6, capsize=4, color="C0",
                label="simulated run")
    ax.axhline(analytic, color="C3", lw=1.2, ls="--", label="generation model")
    ax.axhline(0.0, color="0.75", lw=0.8)
    ax.set_xlim(-1.0, 1.0)
    ax.set_xticks([])
    ax.set_ylabel("heralded g2(0)")
    ax.legend(loc="upper right", frameon=False, fontsize=9)
    fig.tight_layout()
    _save(fig, path)


def timing_figure(
    datasets: dict[str, TimingDataset],
    results: dict[str, TimingResult],
    path: str | Path,
) -> None:
    """2x2 panel of arrival-time histograms with their Gaussian fits."""
    fig, axes = plt.subplots(2, 2, figsize=(8.6, 6.4))
    ordered = sorted(datasets.items())
    for ax in axes.flat[len(ordered):]:
        ax.set_axis_off()
    for ax, (label, dataset) in zip(axes.flat, ordered):
        result = results[label]
        for samples, color, name in (
            (dataset.reception_samples, "C0", "reception"),
            (dataset.detection_samples, "C1", "detection"),
        ):
            counts, edges = np.histogram(samples, bins=60)
            centers = 0.5 * (edges[:-1] + edges[1:])
            ax.step(centers, counts, where="mid", color=color, lw=1.0, label=name)
            fit = fit_gaussian(samples)
            if not fit.degenerate:
                grid = np.linspace(edges[0], edges[-1], 200)
                bin_width = edges[1] - edges[0]
                curve = (
                    samples.size
                    * bin_width
                    / (fit.sigma * math.sqrt(2.0 * math.pi))
                    * np.exp(-0.5 * ((grid - fit.mean) / fit.sigma) ** 2)
                )
                ax.plot(grid, curve, color=color, lw=1.0, ls="--")
        ax.set_title(
            f"{label}: delta_t = {result.delta_t:.2f} ns, "
            f"significance = {result.significance:.1f}",
            fontsize=9,
        )
        ax.set_xlabel("time from herald (ns)", fontsize=9)
        ax.set_ylabel("events", fontsize=9)
        if ordered and label == ordered[0][0]:
            ax.legend(frameon=False, fontsize=8)
    if results:
        reference = next(iter(results.values())).reference_time
        fig.suptitle(
            f"round-trip reference 2 d_min / c = {reference:.2f} ns", fontsize=10
        )
    fig.tight_layout()
    _save(fig, path)
