"""Log-log charts of the (epsilon, value) series written by the sweeps."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from loguru import logger  # noqa: E402

from visualization.plot_style import (  # noqa: E402
    apply_github_dark_theme,
    series_color,
    style_log_axes,
    term_marker,
)

COMMUTATOR_COLUMNS = ("R1", "R2", "R3", "S_int")


def _series(frame: pd.DataFrame) -> list[tuple[str, str, str, np.ndarray, np.ndarray]]:
    """``(subject, term, label, eps, |value|)`` series of a commutators or defect_series table."""
    if "epsilon" not in frame.columns:
        raise ValueError("Rate chart needs an 'epsilon' column.")
    series = []
    for (fixture_id, phi), group in frame.groupby(["fixture_id", "phi"], sort=False):
        group = group.sort_values("epsilon")
        eps = group["epsilon"].to_numpy(dtype=float)
        if "residual" in group.columns:
            columns = ["residual"]
        else:
            columns = [c for c in COMMUTATOR_COLUMNS if c in group.columns]
        for column in columns:
            values = np.abs(group[column].to_numpy(dtype=float))
            keep = np.isfinite(values) & (values > 0)
            if keep.sum() >= 2:
                subject = f"{fixture_id}/{phi}"
                series.append((subject, column, f"{subject} {column}", eps[keep], values[keep]))
    return series


def plot_rate_curves(csv_path: str | Path, out_png: str | Path) -> Path | None:
    """Plot every positive series of ``csv_path`` on log-log axes.

    Args:
        csv_path: ``commutators.csv`` or ``defect_series.csv``.
        out_png: Target image path.

    Returns:
        The image path, or ``None`` when no series has two positive values
        (constant states produce exact zeros).
    """
    frame = pd.read_csv(csv_path)
    series = _series(frame)
    if not series:
        logger.warning(f"No positive series in {csv_path}; chart skipped")
        return None

    apply_github_dark_theme()
    fig, ax = plt.subplots(figsize=(7, 5))
    subjects = list(dict.fromkeys(s[0] for s in series))
    for subject, term, label, eps, values in series:
        color = series_color(subjects.index(subject))
        ax.plot(eps, values, marker=term_marker(term), color=color, label=label)
    style_log_axes(ax)
    ax.legend()
    fig.tight_layout()

    target = Path(out_png)
    target.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(target, dpi=120)
    plt.close(fig)
    logger.info(f"Rate chart saved to {target}")
    return target
