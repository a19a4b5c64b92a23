"""Panel descriptions: what to draw, from which files, with which overlays."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

PANEL_KINDS = ("trajectory3d", "deviation2d", "sweep_extrema",
               "sweep_average", "timeseries")


class PanelSpecError(ValueError):
    """A panel description is malformed."""


@dataclass(frozen=True)
class ReferenceLine:
    """A gray broken guide line at a constant x or y value."""

    axis: str
    value: float
    label: str | None = None

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise PanelSpecError(
                f"reference line axis must be 'x' or 'y', got {self.axis!r}")
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class PanelSpec:
    """One figure panel: a kind, its input files, and styling extras.

    ``options`` carries kind-specific knobs: ``columns`` (coordinate column
    names), ``period`` (cycle length for rainbow time coloring), ``center``
    (equilibrium overlay point), ``column`` (sweep value column).
    """

    kind: str
    inputs: tuple[str, ...]
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    reference_lines: tuple[ReferenceLine, ...] = ()
    options: Mapping[str, object] = field(
        default_factory=lambda: MappingProxyType({}))

    def __post_init__(self):
        if self.kind not in PANEL_KINDS:
            raise PanelSpecError(
                f"unknown panel kind {self.kind!r}; choose from {PANEL_KINDS}")
        inputs = tuple(str(p) for p in self.inputs)
        if not inputs:
            raise PanelSpecError("a panel needs at least one input file")
        for p in inputs:
            if not Path(p).is_file():
                raise PanelSpecError(f"input file not found: {p}")
        object.__setattr__(self, "inputs", inputs)
        for name in ("xlim", "ylim"):
            lim = getattr(self, name)
            if lim is not None:
                lim = (float(lim[0]), float(lim[1]))
                if not lim[0] < lim[1]:
                    raise PanelSpecError(f"{name} must be increasing: {lim}")
                object.__setattr__(self, name, lim)
        object.__setattr__(self, "reference_lines",
                           tuple(self.reference_lines))
        object.__setattr__(self, "options",
                           MappingProxyType(dict(self.options)))


def _reference_line_from_dict(entry) -> ReferenceLine:
    if not isinstance(entry, dict):
        raise PanelSpecError(f"reference line must be an object: {entry!r}")
    axes = [a for a in ("x", "y") if a in entry]
    if len(axes) != 1:
        raise PanelSpecError(
            f"reference line needs exactly one of 'x'/'y': {entry!r}")
    return ReferenceLine(axis=axes[0], value=entry[axes[0]],
                         label=entry.get("label"))


def load_panel_spec(path: str | Path) -> PanelSpec:
    """Parse a panel JSON file; input paths resolve against its directory."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise PanelSpecError(f"panel file not found: {path}")
    except json.JSONDecodeError as exc:
        raise PanelSpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    if not isinstance(raw, dict):
        raise PanelSpecError(f"{path}: panel root must be a JSON object")
    known = {"kind", "inputs", "title", "xlabel", "ylabel", "xlim", "ylim",
             "reference_lines", "options"}
    unknown = set(raw) - known
    if unknown:
        raise PanelSpecError(f"{path}: unknown panel keys {sorted(unknown)}")
    inputs = raw.get("inputs")
    if not isinstance(inputs, list) or not inputs:
        raise PanelSpecError(f"{path}: 'inputs' must be a non-empty list")
    base = path.parent
    resolved = tuple(str(p) if Path(p).is_absolute() else str(base / p)
                     for p in inputs)
    refs = tuple(_reference_line_from_dict(e)
                 for e in raw.get("reference_lines", []))
    return PanelSpec(
        kind=raw.get("kind", ""),
        inputs=resolved,
        title=raw.get("title"),
        xlabel=raw.get("xlabel"),
        ylabel=raw.get("ylabel"),
        xlim=tuple(raw["xlim"]) if raw.get("xlim") is not None else None,
        ylim=tuple(raw["ylim"]) if raw.get("ylim") is not None else None,
        reference_lines=refs,
        options=raw.get("options", {}),
    )
