"""Static SVG figures: insertion curves per instance and MEC against m."""
from __future__ import annotations

import logging
import re
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..analysis import loglog_slope  # noqa: E402

log = logging.getLogger(__name__)

STYLE = {
    "figure.figsize": (5.0, 3.4),
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.4,
    "legend.frameon": False,
    "svg.hashsalt": "phasewin",
    "svg.fonttype": "none",
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text)


def plot_insertion_curves(records, path) -> Path:
    """One figure, one series per algorithm: objective value vs. prefix length."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for rec in records:
            ys = rec.step_values
            ax.plot(np.arange(1, len(ys) + 1), ys, marker="o", markersize=2.5,
                    label=f"{rec.row['algorithm']} (MEC {rec.row['mec']})")
        ax.set_xlabel("regions inserted")
        ax.set_ylabel("F(S)")
        ax.set_title(records[0].row["instance_id"])
        ax.legend()
        return _save(fig, Path(path))


def plot_mec_scaling(records, path) -> tuple[Path, dict[str, float]]:
    """Mean MEC per size on log-log axes, with fitted slopes in the legend."""
    by_algo: dict[str, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
    for rec in records:
        by_algo[rec.row["algorithm"]][int(rec.row["m"])].append(int(rec.row["mec"]))
    slopes = {}
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for algo in sorted(by_algo):
            ms = sorted(by_algo[algo])
            means = [float(np.mean(by_algo[algo][m])) for m in ms]
            label = algo
            if len(ms) >= 2 and min(means) > 0:
                slopes[algo] = loglog_slope(ms, means)
                label = f"{algo} (slope {slopes[algo]:.2f})"
            ax.plot(ms, means, marker="s", label=label)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("candidate regions m")
        ax.set_ylabel("mean MEC")
        ax.legend()
        return _save(fig, Path(path)), slopes


def render_curves(records, out_dir, max_instances: int | None = None) -> list[Path]:
    """Write curve plots (one per instance) and, given several sizes, the MEC plot."""
    records = [r for r in records if r.row]
    if not records:
        log.warning("no results to render")
        return []
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    groups: dict[str, list] = {}
    for rec in records:
        groups.setdefault(rec.row["instance_id"], []).append(rec)
    paths = []
    for n, (inst, recs) in enumerate(groups.items()):
        if max_instances is not None and n >= max_instances:
            break
        if any(r.step_values for r in recs):
            paths.append(plot_insertion_curves(recs, out / f"curves_{_slug(inst)}.svg"))
    if len({int(r.row["m"]) for r in records}) >= 2:
        p, _ = plot_mec_scaling(records, out / "mec_vs_m.svg")
        paths.append(p)
    return paths
