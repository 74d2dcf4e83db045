"""Figure rendering for flow traces, census reports, and homotopy
metrics.  Everything draws through the Agg backend straight to files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .census import ComponentReport
from .kempfness import FlowTrace


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def flow_figure(trace: FlowTrace, path) -> Path:
    """Norm and residual against iteration, with the accepted step sizes
    on a twin panel."""
    iters = [s.iteration for s in trace.steps]
    norms = [s.norm_sq for s in trace.steps]
    resid = [s.kn_residual for s in trace.steps]
    steps = [s.step_size for s in trace.steps]

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(iters, norms, color="#348ABD", lw=1.2, label="norm_sq")
    ax1.set_ylabel("norm_sq")
    ax1.legend(loc="upper right", frameon=False)
    ax1b = ax1.twinx()
    ax1b.semilogy(iters, resid, color="#E24A33", lw=1.0, label="kn_residual")
    ax1b.set_ylabel("kn_residual")
    ax1b.legend(loc="center right", frameon=False)

    ax2.semilogy(iters, np.maximum(steps, 1e-300), color="#777777", lw=1.0)
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("step size")
    fig.suptitle(f"flow trace: {trace.status.value}")
    return _finish(fig, path)


def census_figure(report: ComponentReport, path) -> Path:
    """Polystable fraction per case with sample counts annotated."""
    rows = report.case_rows
    labels = [r.case.value.replace("_", "\n") for r in rows]
    fracs = [r.polystable_fraction for r in rows]

    fig, ax = plt.subplots(figsize=(1.8 * max(4, len(rows)), 4))
    bars = ax.bar(labels, fracs, color="#8EBA42", width=0.55)
    for bar, row in zip(bars, rows):
        ax.annotate(
            f"{row.sample_count} samples",
            (bar.get_x() + bar.get_width() / 2, bar.get_height()),
            ha="center",
            va="bottom",
            fontsize=8,
        )
    ax.set_ylim(0, 1.12)
    ax.set_ylabel("polystable fraction")
    ax.set_title(
        f"{report.group.value} census, {report.samples_per_case}/case, "
        f"component estimate {report.component_estimate}"
    )
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    return _finish(fig, path)


def sdr_figure(reports, path) -> Path:
    """Scatter of the four homotopy metrics across verification runs,
    log scale, one column per metric."""
    metrics = {
        "relation": [r.max_relation_residual for r in reports],
        "unitarity": [r.endpoint_unitarity for r in reports],
        "fixedness": [r.k_fixedness for r in reports],
        "det drift": [r.det_drift for r in reports],
    }
    fig, ax = plt.subplots(figsize=(7, 4))
    floor = 1e-18
    for k, (name, vals) in enumerate(metrics.items()):
        vals = np.maximum(np.asarray(vals, dtype=float), floor)
        x = k + 0.08 * np.random.default_rng(0).standard_normal(len(vals))
        ax.semilogy(x, vals, ".", ms=4, alpha=0.5)
    ax.set_xticks(range(len(metrics)), list(metrics))
    ax.set_ylabel("metric value")
    ax.set_title(f"homotopy verification metrics over {len(reports)} samples")
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    return _finish(fig, path)
