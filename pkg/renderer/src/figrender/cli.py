"""Command-line wrapper: ``render --panel spec.json --out figure.png``."""

from __future__ import annotations

import argparse
import sys

from .panels import PanelSpecError, load_panel_spec
from .render import render
from .schemas import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render an experiment CSV panel to an image file")
    parser.add_argument("--panel", required=True,
                        help="panel description JSON path")
    parser.add_argument("--out", required=True,
                        help="output image path (.png or .svg)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        render(load_panel_spec(args.panel), args.out)
    except (PanelSpecError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
