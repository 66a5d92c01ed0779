"""Static figure rendering for qeopt benchmark CSVs.

Reads only the versioned CSV schemas produced by the qeopt harness; draws
probability, effort (with persisted quadratic-fit overlays), scaling, and
spectral-gap charts to image files. The renderer computes no statistics.
"""

__version__ = "0.1.0"

from .figures import FIGURE_KINDS, FigureSpec, extract_line_series, render, render_figure

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "extract_line_series",
    "render",
    "render_figure",
]
