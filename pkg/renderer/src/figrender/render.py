"""Drawing: one fixed, documented style per panel kind.

Styling contracts (all constants below, no timestamps anywhere):

* trajectories are rainbow-colored by the time within one cycle;
* sweep extrema use circle markers for maxima and cross markers for minima,
  blue where the run stayed inside the unit box and red where it left it;
* sweep averages use an orange star where the time-average converged and a
  red circle where it did not, with the analytic prediction as a gray
  broken line;
* deviation panels mark the reference point with a black cross and the
  final time-average with an orange star.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg", force=True)

import numpy as np
from matplotlib import rc_context
from matplotlib.collections import LineCollection
from matplotlib.figure import Figure
from mpl_toolkits.mplot3d.art3d import Line3DCollection

from .panels import PanelSpec, PanelSpecError
from .schemas import SchemaError, TrajectoryTable, read_sweep, read_trajectory

DPI = 150
FIG_SIZE = (7.0, 4.5)
FIG_SIZE_3D = (6.4, 5.6)
CYCLE_COLORMAP = "hsv"
INTERIOR_COLOR = "tab:blue"
EXTERIOR_COLOR = "tab:red"
CONVERGED_COLOR = "tab:orange"
DIVERGED_COLOR = "tab:red"
CENTER_COLOR = "black"
REFERENCE_COLOR = "0.45"
REFERENCE_STYLE = (0, (4, 3))
CURVE_COLOR = "0.82"
PNG_METADATA = {"Software": "figrender 0.1.0"}
SVG_HASH_SALT = "figrender"


def _save(fig: Figure, out: Path) -> None:
    suffix = out.suffix.lower()
    if suffix == ".png":
        fig.savefig(out, format="png", dpi=DPI, metadata=dict(PNG_METADATA))
    elif suffix == ".svg":
        with rc_context({"svg.hashsalt": SVG_HASH_SALT}):
            fig.savefig(out, format="svg", metadata={"Date": None})
    else:
        raise PanelSpecError(
            f"output must end in .png or .svg, got {out.name!r}")


def _finish(ax, panel: PanelSpec, xlabel: str, ylabel: str) -> None:
    ax.set_xlabel(panel.xlabel or xlabel)
    ax.set_ylabel(panel.ylabel or ylabel)
    if panel.title:
        ax.set_title(panel.title)
    if panel.xlim:
        ax.set_xlim(*panel.xlim)
    if panel.ylim:
        ax.set_ylim(*panel.ylim)
    for ref in panel.reference_lines:
        draw = ax.axvline if ref.axis == "x" else ax.axhline
        draw(ref.value, color=REFERENCE_COLOR, linestyle=REFERENCE_STYLE,
             linewidth=1.0, label=ref.label, zorder=1.2)
    handles, labels = ax.get_legend_handles_labels()
    if labels:
        ax.legend(loc="upper right", fontsize=8, framealpha=0.9)


def _cycle_phase(times: np.ndarray, period: float | None) -> np.ndarray:
    if period is not None and period > 0:
        return np.mod(times, period) / period
    span = times[-1] - times[0]
    return (times - times[0]) / (span if span > 0 else 1.0)


def _default_pair(table: TrajectoryTable) -> tuple[str, str]:
    # first coordinate of each of the first two players
    prefixes: list[str] = []
    for name in table.columns:
        prefix = name.rsplit("_", 1)[0]
        if prefix not in prefixes:
            prefixes.append(prefix)
    if len(prefixes) < 2:
        raise SchemaError(
            f"{table.path}: need columns from two players, has "
            f"{table.columns}")
    return f"{prefixes[0]}_1", f"{prefixes[1]}_1"


def _pair_from_options(panel: PanelSpec,
                       table: TrajectoryTable) -> tuple[str, str]:
    columns = panel.options.get("columns")
    if columns is None:
        return _default_pair(table)
    if not isinstance(columns, (list, tuple)) or len(columns) != 2:
        raise PanelSpecError(
            f"'columns' must name exactly two coordinates, got {columns!r}")
    return str(columns[0]), str(columns[1])


def _center(panel: PanelSpec, table: TrajectoryTable,
            names: tuple[str, str]) -> tuple[float, float]:
    center = panel.options.get("center")
    if center is not None:
        if not isinstance(center, (list, tuple)) or len(center) != 2:
            raise PanelSpecError(f"'center' must be [x, y], got {center!r}")
        return float(center[0]), float(center[1])
    avg = table.running_average()[-1]
    return (float(avg[table.columns.index(names[0])]),
            float(avg[table.columns.index(names[1])]))


def _period(panel: PanelSpec) -> float | None:
    period = panel.options.get("period")
    if period is None:
        return None
    period = float(period)
    if period <= 0:
        raise PanelSpecError(f"'period' must be positive, got {period}")
    return period


def _draw_trajectory3d(panel: PanelSpec, fig: Figure) -> None:
    table = read_trajectory(panel.inputs[0])
    names = _pair_from_options(panel, table)
    xs, ys = table.column(names[0]), table.column(names[1])
    ts = table.times
    phase = _cycle_phase(ts, _period(panel))
    cmap = matplotlib.colormaps[CYCLE_COLORMAP]
    points = np.stack([xs, ys, ts], axis=1)
    segments = np.stack([points[:-1], points[1:]], axis=1)
    ax = fig.add_subplot(projection="3d")
    ax.add_collection3d(
        Line3DCollection(segments, colors=cmap(phase[:-1]), linewidths=0.9))
    cx, cy = _center(panel, table, names)
    ax.plot([cx, cx], [cy, cy], [ts[0], ts[-1]], color=REFERENCE_COLOR,
            linestyle=REFERENCE_STYLE, linewidth=1.2, label="equilibrium")
    ax.set_xlim(min(xs.min(), cx), max(xs.max(), cx))
    ax.set_ylim(min(ys.min(), cy), max(ys.max(), cy))
    ax.set_zlim(ts[0], ts[-1])
    ax.set_zlabel("t")
    ax.view_init(elev=22.0, azim=-58.0)
    _finish(ax, panel, names[0], names[1])


def _draw_deviation2d(panel: PanelSpec, fig: Figure) -> None:
    table = read_trajectory(panel.inputs[0])
    names = _pair_from_options(panel, table)
    cx, cy = _center(panel, table, names)
    dx = table.column(names[0]) - cx
    dy = table.column(names[1]) - cy
    phase = _cycle_phase(table.times, _period(panel))
    cmap = matplotlib.colormaps[CYCLE_COLORMAP]
    points = np.stack([dx, dy], axis=1)
    segments = np.stack([points[:-1], points[1:]], axis=1)
    ax = fig.add_subplot()
    ax.add_collection(
        LineCollection(segments, colors=cmap(phase[:-1]), linewidths=0.9))
    ax.plot([0.0], [0.0], marker="x", markersize=9.0, color=CENTER_COLOR,
            linestyle="none", label="reference point", zorder=3)
    avg = table.running_average()[-1]
    ax.plot([avg[table.columns.index(names[0])] - cx],
            [avg[table.columns.index(names[1])] - cy],
            marker="*", markersize=11.0, color=CONVERGED_COLOR,
            linestyle="none", label="time-average", zorder=3)
    pad = 1.08 * max(float(np.abs(dx).max()), float(np.abs(dy).max()), 1e-12)
    ax.set_xlim(-pad, pad)
    ax.set_ylim(-pad, pad)
    ax.set_aspect("equal")
    _finish(ax, panel, f"{names[0]} deviation", f"{names[1]} deviation")


def _draw_sweep_extrema(panel: PanelSpec, fig: Figure) -> None:
    table = read_sweep(panel.inputs[0])
    order = np.argsort(table.ratio, kind="stable")
    ratio = table.ratio[order]
    ax = fig.add_subplot()
    ax.grid(True, color="0.9", linewidth=0.6)
    for values in (table.x_max[order], table.x_min[order]):
        ax.plot(ratio, values, color=CURVE_COLOR, linewidth=0.8, zorder=1)
    colors = np.where(table.boundary_touched[order], EXTERIOR_COLOR,
                      INTERIOR_COLOR)
    ax.scatter(ratio, table.x_max[order], marker="o", s=22,
               facecolors="none", edgecolors=colors, linewidths=1.0,
               zorder=2, label="max")
    ax.scatter(ratio, table.x_min[order], marker="x", s=24, c=colors,
               linewidths=1.0, zorder=2, label="min")
    _finish(ax, panel, "alpha / omega", "strategy extrema")


def _draw_sweep_average(panel: PanelSpec, fig: Figure) -> None:
    table = read_sweep(panel.inputs[0])
    column = str(panel.options.get("column", "avg_x"))
    if column not in ("avg_x", "avg_y"):
        raise PanelSpecError(
            f"'column' must be 'avg_x' or 'avg_y', got {column!r}")
    values = table.avg_x if column == "avg_x" else table.avg_y
    limits = table.limit_x if column == "avg_x" else table.limit_y
    order = np.argsort(table.ratio, kind="stable")
    ratio = table.ratio[order]
    ax = fig.add_subplot()
    ax.grid(True, color="0.9", linewidth=0.6)
    if np.isfinite(limits).any():
        ax.plot(ratio, limits[order], color=REFERENCE_COLOR,
                linestyle=REFERENCE_STYLE, linewidth=1.2, zorder=1.5,
                label="analytic limit")
    conv = table.converged[order]
    vals = values[order]
    ax.scatter(ratio[conv], vals[conv], marker="*", s=58,
               c=CONVERGED_COLOR, zorder=2, label="converged")
    ax.scatter(ratio[~conv], vals[~conv], marker="o", s=30,
               c=DIVERGED_COLOR, zorder=2.5, label="not converged")
    _finish(ax, panel, "alpha / omega", f"time-average {column[-1]}")


def _draw_timeseries(panel: PanelSpec, fig: Figure) -> None:
    ax = fig.add_subplot()
    ax.grid(True, color="0.9", linewidth=0.6)
    many = len(panel.inputs) > 1
    wanted = panel.options.get("columns")
    for path in panel.inputs:
        table = read_trajectory(path)
        names = ([str(c) for c in wanted] if wanted is not None
                 else list(table.columns))
        for name in names:
            label = f"{Path(path).stem}:{name}" if many else name
            ax.plot(table.times, table.column(name), linewidth=0.9,
                    label=label)
    _finish(ax, panel, "t", "strategy coordinate")


_DRAWERS = {
    "trajectory3d": (_draw_trajectory3d, FIG_SIZE_3D),
    "deviation2d": (_draw_deviation2d, FIG_SIZE_3D),
    "sweep_extrema": (_draw_sweep_extrema, FIG_SIZE),
    "sweep_average": (_draw_sweep_average, FIG_SIZE),
    "timeseries": (_draw_timeseries, FIG_SIZE),
}


def render(panel: PanelSpec, out: str | Path) -> Path:
    """Draw one panel into a .png or .svg image file.

    Pure function of the input files and the style constants: identical
    inputs produce byte-identical images.
    """
    out = Path(out)
    if out.suffix.lower() not in (".png", ".svg"):
        raise PanelSpecError(
            f"output must end in .png or .svg, got {out.name!r}")
    draw, size = _DRAWERS[panel.kind]
    fig = Figure(figsize=size, dpi=DPI)
    draw(panel, fig)
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    _save(fig, out)
    return out
