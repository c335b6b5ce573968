# plot_style.py

from __future__ import annotations

from matplotlib.axes import Axes

RATE_CHART_RC: dict[str, object] = {
    "axes.facecolor": "#0D1117",
    "figure.facecolor": "#0D1117",
    "text.color": "#ABB2BF",
    "axes.labelcolor": "#61AFEF",
    "axes.edgecolor": "#3E4451",
    "grid.color": "#3E4451",
    "grid.linestyle": ":",
    "xtick.color": "#ABB2BF",
    "ytick.color": "#ABB2BF",
    "legend.facecolor": "#161B22",
    "legend.edgecolor": "#3E4451",
    "font.family": "monospace",
    "font.size": 10,
    "legend.fontsize": 8,
}

github_palette = [
    "#E06C75",  # Soft Red
    "#61AFEF",  # Light Blue
    "#98C379",  # Green
    "#C678DD",  # Purple
    "#E5C07B",  # Gold
    "#56B6C2",  # Cyan
    "#D19A66",  # Orange
    "#7F848E",  # Gray
]

# One marker per measured term, so a fixture keeps its color across terms
TERM_MARKERS: dict[str, str] = {
    "R1": "o",
    "R2": "s",
    "R3": "^",
    "S_int": "D",
    "residual": "v",
}


def apply_github_dark_theme() -> None:
    """Apply the dark theme used by every log-log rate chart."""
    import matplotlib.pyplot as plt

    plt.rcParams.update(RATE_CHART_RC)


def series_color(index: int) -> str:
    """Palette color of the ``index``-th series, cycling past the end."""
    return github_palette[index % len(github_palette)]


def term_marker(term: str) -> str:
    """Marker of a commutator term or of the defect residual; ``"x"`` otherwise."""
    return TERM_MARKERS.get(term, "x")


def style_log_axes(ax: Axes, xlabel: str = "epsilon", ylabel: str = "|value|") -> None:
    """Label log-log axes and draw major and minor grid lines."""
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both")
