"""SVG figures: error against eps, and compensated values against t."""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .analysis import scan  # noqa: E402

# fixed hash salt and no timestamp keep reruns byte-identical
plt.rcParams["svg.hashsalt"] = "torushom"


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_eps_rates(records, out_dir):
    """One log-log panel per metric with a reference slope-one line."""
    metrics = sorted({r.metric for r in records})
    paths = []
    for metric in metrics:
        rows = scan(records, metric, "eps")
        rows = [r for r in rows if r.value > 0]
        if len(rows) < 2:
            continue
        eps = [r.eps for r in rows]
        val = [r.value for r in rows]
        fig, ax = plt.subplots(figsize=(4.5, 3.5))
        ax.loglog(eps, val, "o-", label=metric)
        ax.loglog(eps, [val[-1] * e / eps[-1] for e in eps], "k--", lw=0.8, label="slope 1")
        ax.set_xlabel("eps")
        ax.set_ylabel("operator norm")
        ax.legend()
        fig.tight_layout()
        paths.append(_save(fig, os.path.join(out_dir, f"rate_{metric}.svg")))
    return paths


def plot_compensated_t(records, out_dir):
    """Compensated semigroup errors along the t scan."""
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    drawn = False
    for metric in sorted({r.metric for r in records if r.metric.startswith("semi")}):
        rows = scan(records, metric, "t")
        if len(rows) < 2:
            continue
        ax.semilogx([r.t for r in rows], [r.compensated for r in rows], "o-", label=metric)
        drawn = True
    if not drawn:
        plt.close(fig)
        return []
    ax.set_xlabel("t")
    ax.set_ylabel("measured / predicted scaling")
    ax.set_ylim(bottom=0)
    ax.legend()
    fig.tight_layout()
    return [_save(fig, os.path.join(out_dir, "compensated_t.svg"))]


def plot_all(records, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    return plot_eps_rates(records, out_dir) + plot_compensated_t(records, out_dir)
