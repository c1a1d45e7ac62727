"""Command-line entry point: plot --summary <csv> [--out <path>] [--overlay-bounds <csv>].

Exit codes: 0 success, 2 usage or schema error (the column diff is
printed), 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .render import PlotSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Chart mean detection delay against run length to false alarm "
        "from experiment summary CSVs (log x, linear y, one line per detector).",
    )
    parser.add_argument(
        "--summary",
        action="append",
        required=True,
        metavar="CSV",
        help="summary CSV path; repeat the flag to combine scenarios into one figure",
    )
    parser.add_argument("--out", help="output image path (default: first summary path with the image extension)")
    parser.add_argument("--overlay-bounds", dest="overlay_bounds", help="bounds CSV to draw as dashed asymptotic curves (default: none)")
    parser.add_argument("--png", action="store_true", help="write PNG instead of the default SVG")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    image_format = "png" if args.png else "svg"
    out = args.out
    if out is None:
        stem = args.summary[0]
        stem = stem[:-4] if stem.endswith(".csv") else stem
        out = f"{stem}.{image_format}"
    try:
        spec = PlotSpec(
            summaries=tuple(args.summary),
            out=out,
            overlay_bounds=args.overlay_bounds,
            image_format=image_format,
        )
        path = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
