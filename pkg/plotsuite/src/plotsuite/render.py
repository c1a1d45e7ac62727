"""Render delay-versus-run-length charts from experiment summary CSVs.

Input files must match the experiment summary schema exactly (column for
column); anything else is rejected with a diff of the columns.  Each
scenario present in the input gets one subplot with the minimum run
length to false alarm on a log x axis and the mean detection delay on a
linear y axis, one error-barred line per detector.  Optional overlays
draw the asymptotic bound curves from a bounds CSV.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.figure import Figure

__all__ = ["SUMMARY_COLUMNS", "BOUNDS_COLUMNS", "PlotSpec", "SchemaError", "build_figure", "render"]

SUMMARY_COLUMNS = [
    "scenario",
    "detector",
    "b",
    "mean_delay",
    "se_delay",
    "mean_rl_pre",
    "se_rl_pre",
    "mean_rl_confusing",
    "se_rl_confusing",
    "min_rl",
    "censored_pre",
    "censored_confusing",
    "trials",
]

BOUNDS_COLUMNS = ["gamma", "universal_lower", "s_upper", "j_upper"]

# Fixed style so identical inputs produce byte-identical output.
_DETECTOR_STYLE = {
    "cusum-w": ("tab:blue", "o"),
    "cusum-lambda": ("tab:orange", "s"),
    "s-cusum": ("tab:green", "^"),
    "j-cusum": ("tab:red", "d"),
}


class SchemaError(ValueError):
    """Input columns do not match the summary schema."""

    def __init__(self, path: str, found: list[str], expected: list[str]) -> None:
        missing = [c for c in expected if c not in found]
        extra = [c for c in found if c not in expected]
        parts = [f"{path}: columns do not match the summary schema"]
        if missing:
            parts.append(f"missing: {', '.join(missing)}")
        if extra:
            parts.append(f"unexpected: {', '.join(extra)}")
        if not missing and not extra:
            parts.append(f"order differs: found {found}")
        super().__init__("; ".join(parts))
        self.missing = missing
        self.extra = extra


@dataclass(frozen=True)
class PlotSpec:
    """What to read, where to draw it, and how."""

    summaries: tuple[str, ...]
    out: str
    overlay_bounds: str | None = None
    x_label: str = "run length to false alarm (min of pre-change and confusing)"
    y_label: str = "mean detection delay"
    image_format: str = "svg"

    def __post_init__(self) -> None:
        if not self.summaries:
            raise ValueError("at least one summary CSV required")
        if self.image_format not in ("svg", "png"):
            raise ValueError(f"unsupported image format {self.image_format!r}")


def _float(value: str) -> float:
    return float(value) if value else math.nan


def load_summary(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(path, [], SUMMARY_COLUMNS) from None
        if header != SUMMARY_COLUMNS:
            raise SchemaError(path, header, SUMMARY_COLUMNS)
        rows = []
        for raw in reader:
            row = dict(zip(SUMMARY_COLUMNS, raw))
            for key in ("b", "mean_delay", "se_delay", "min_rl"):
                row[key] = _float(row[key])
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def load_bounds(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != BOUNDS_COLUMNS:
            raise SchemaError(path, header or [], BOUNDS_COLUMNS)
        return [dict(zip(BOUNDS_COLUMNS, map(float, raw))) for raw in reader]


def build_figure(spec: PlotSpec) -> Figure:
    """Build the figure: one subplot per scenario found in the inputs."""
    rows: list[dict] = []
    for path in spec.summaries:
        rows.extend(load_summary(path))
    scenarios = sorted({row["scenario"] for row in rows})
    bounds_rows = load_bounds(spec.overlay_bounds) if spec.overlay_bounds else []

    fig, axes = plt.subplots(
        1, len(scenarios), figsize=(5.0 * len(scenarios), 4.0), squeeze=False
    )
    for ax, scenario in zip(axes[0], scenarios):
        scenario_rows = [row for row in rows if row["scenario"] == scenario]
        detectors = sorted({row["detector"] for row in scenario_rows})
        for detector in detectors:
            line = sorted(
                (row for row in scenario_rows if row["detector"] == detector),
                key=lambda row: row["b"],
            )
            color, marker = _DETECTOR_STYLE.get(detector, ("tab:gray", "x"))
            ax.errorbar(
                [row["min_rl"] for row in line],
                [row["mean_delay"] for row in line],
                yerr=[row["se_delay"] for row in line],
                label=detector,
                color=color,
                marker=marker,
                markersize=4,
                capsize=2,
                linewidth=1.2,
            )
        for key, style, label in (
            ("universal_lower", ":", "universal lower bound (asymptotic)"),
            ("s_upper", "--", "s-/j-cusum upper bound (asymptotic)"),
        ):
            if bounds_rows:
                ax.plot(
                    [row["gamma"] for row in bounds_rows],
                    [row[key] for row in bounds_rows],
                    style,
                    color="black",
                    linewidth=1.0,
                    label=label,
                )
        ax.set_xscale("log")
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label)
        ax.set_title(f"scenario {scenario}")
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> str:
    """Render the chart to ``spec.out`` and return the path.

    SVG output carries no timestamp metadata, so identical inputs give
    byte-identical files.
    """
    with plt.rc_context({"svg.hashsalt": "plotsuite"}):
        fig = build_figure(spec)
        try:
            metadata = {"Date": None} if spec.image_format == "svg" else None
            fig.savefig(spec.out, format=spec.image_format, metadata=metadata)
        finally:
            plt.close(fig)
    return spec.out
