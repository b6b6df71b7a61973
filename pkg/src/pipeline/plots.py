"""
Static SVG rendering of mosaic geometry and boxplot summaries.

Only precomputed geometry is drawn here; no statistics are recomputed. SVG
output is reproducible: fixed hash salt, no date or creator metadata.
"""
import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import matplotlib.patches as patches

from src.association import BoxplotSummary, MosaicGeometry

logger = logging.getLogger(__name__)

DEFAULT_PLOT = {"width_in": 7.0, "height_in": 4.5, "svg_hashsalt": "coda-ratios"}


def _save_svg(fig, path, description, plot_config):
    with matplotlib.rc_context({"svg.hashsalt": plot_config["svg_hashsalt"], "svg.fonttype": "path"}):
        fig.savefig(path, format="svg",
                    metadata={"Date": None, "Creator": None, "Description": description})
    plt.close(fig)
    logger.debug(f"Wrote plot {path}")


def mosaic_svg(geometry: MosaicGeometry, path, title: str, description: str, plot_config=None):
    """Cluster columns as wide as their share, split by level proportions."""
    plot_config = {**DEFAULT_PLOT, **(plot_config or {})}
    fig, ax = plt.subplots(figsize=(plot_config["width_in"], plot_config["height_in"]))
    cmap = matplotlib.colormaps["tab20"]
    colors = {level: cmap(i % cmap.N) for i, level in enumerate(geometry.levels)}

    for rect in geometry.rectangles():
        if rect.height == 0:
            continue
        ax.add_patch(
            patches.Rectangle(
                (rect.x, rect.y),
                rect.width,
                rect.height,
                edgecolor="white",
                linewidth=1.0,
                facecolor=colors[rect.level],
            )
        )

    centers = []
    x = 0.0
    for width in geometry.widths:
        centers.append(x + width / 2.0)
        x += width
    ax.set_xticks(centers)
    ax.set_xticklabels([f"Cluster {c}" for c in geometry.clusters])
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_ylabel("Share within cluster")
    ax.set_title(title)
    handles = [patches.Patch(facecolor=colors[level], label=level) for level in geometry.levels]
    ax.legend(handles=handles, loc="center left", bbox_to_anchor=(1.01, 0.5), frameon=False, fontsize="small")
    fig.tight_layout()
    _save_svg(fig, path, description, plot_config)


def boxplot_svg(summaries: list[BoxplotSummary], path, title: str, ylabel: str, description: str,
                plot_config=None):
    """One box per cluster drawn from its five-number summary and whiskers."""
    plot_config = {**DEFAULT_PLOT, **(plot_config or {})}
    fig, ax = plt.subplots(figsize=(plot_config["width_in"], plot_config["height_in"]))
    stats = [
        {
            "label": f"Cluster {s.cluster}",
            "med": s.median,
            "q1": s.q1,
            "q3": s.q3,
            "whislo": s.whisker_low,
            "whishi": s.whisker_high,
            "fliers": list(s.outliers),
        }
        for s in summaries
    ]
    ax.bxp(stats, showfliers=True)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    _save_svg(fig, path, description, plot_config)
