"""Render experiment CSV outputs into publication-style figure panels.

The package never recomputes dynamics: every pixel is a pure function of the
input CSV files and the fixed styling constants, so re-rendering the same
inputs yields byte-identical images.
"""

from .panels import PanelSpec, PanelSpecError, ReferenceLine, load_panel_spec
from .render import render
from .schemas import (SchemaError, SweepTable, TrajectoryTable, read_sweep,
                      read_trajectory)

__all__ = [
    "PanelSpec",
    "PanelSpecError",
    "ReferenceLine",
    "SchemaError",
    "SweepTable",
    "TrajectoryTable",
    "load_panel_spec",
    "read_sweep",
    "read_trajectory",
    "render",
]
