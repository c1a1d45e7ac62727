"""Publication-style charts for sequential-detection experiment summaries."""

from .render import BOUNDS_COLUMNS, SUMMARY_COLUMNS, PlotSpec, SchemaError, build_figure, render

__version__ = "0.1.0"

__all__ = [
    "BOUNDS_COLUMNS",
    "SUMMARY_COLUMNS",
    "PlotSpec",
    "SchemaError",
    "build_figure",
    "render",
    "__version__",
]
