import logging
import os
from typing import List

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

METRIC_LABELS = {
    "e2": "relative coefficient error",
    "tpr": "true positive ratio",
    "traj_err": "relative trajectory error",
}

SVG_RC = {
    'svg.hashsalt': 'weak-sindy',
    'svg.fonttype': 'path',
    'figure.figsize': (8, 5),
}


def _set_noise_axis(ax, levels: np.ndarray):
    positive = levels[levels > 0]
    if len(positive) < len(levels):
        ax.set_xscale("symlog", linthresh=positive.min() if len(positive) else 1e-6)
    else:
        ax.set_xscale("log")
    ax.set_xlabel("noise ratio")


def plot_metric(summary: pd.DataFrame, metric: str, path) -> str:
    """Render one metric as median lines with quartile bands, one per method.

    Each median line carries the SVG id "median-<method>".
    """
    methods = list(dict.fromkeys(summary["method"]))
    if len(methods) == 0:
        raise ValueError("Summary has no methods to plot")
    with plt.rc_context(SVG_RC):
        sns.set_style("darkgrid")
        fig, ax = plt.subplots()
        for method in methods:
            group = summary[summary["method"] == method].sort_values("noise_ratio")
            levels = group["noise_ratio"].to_numpy(dtype=float)
            line, = ax.plot(levels, group[f"{metric}_median"], marker="o", label=method)
            line.set_gid(f"median-{method}")
            q25 = group.get(f"{metric}_q25")
            if q25 is not None:
                ax.fill_between(levels, q25, group[f"{metric}_q75"], alpha=0.2, color=line.get_color())
        _set_noise_axis(ax, summary["noise_ratio"].to_numpy(dtype=float))
        values = summary[f"{metric}_median"].to_numpy(dtype=float)
        values = values[np.isfinite(values)]
        if metric != "tpr" and len(values) and values.min() > 0:
            ax.set_yscale("log")
        if metric == "tpr":
            ax.set_ylim(-0.05, 1.05)
        ax.set_ylabel(METRIC_LABELS.get(metric, metric))
        systems = list(dict.fromkeys(summary["system"])) if "system" in summary else []
        if systems:
            ax.set_title(", ".join(str(s) for s in systems))
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logging.info(f"wrote {path}")
    return str(path)


def plot_summary(summary: pd.DataFrame, plot_dir) -> List[str]:
    """Write one SVG per metric (e2, tpr and traj_err when present)."""
    if summary.empty:
        raise ValueError("Summary has no methods to plot")
    os.makedirs(plot_dir, exist_ok=True)
    metrics = ["e2", "tpr"]
    if "traj_err_median" in summary.columns and summary["traj_err_median"].notna().any():
        metrics.append("traj_err")
    paths = []
    for metric in metrics:
        paths.append(plot_metric(summary, metric, os.path.join(plot_dir, f"{metric}.svg")))
    return paths
