"""Command-line entry point: ``qeclie-plot --in sweep.csv --out fig1.png``."""

from __future__ import annotations

import argparse
import sys

from .render import MissingColumnError, PlotSpec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qeclie-plot",
        description="Render sweep CSVs as per-family infidelity figures "
                    "(PNG and SVG)")
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="sweep CSV path (repeatable)")
    parser.add_argument("--out", required=True, help="output image path (.png)")
    parser.add_argument("--linear", action="store_true",
                        help="linear axes instead of log-log")
    parser.add_argument("--title")
    args = parser.parse_args(sys.argv[1:] if argv is None else argv)
    spec = PlotSpec(inputs=tuple(args.inputs), output=args.out,
                    log_log=not args.linear, title=args.title)
    try:
        png, svg = render(spec)
    except MissingColumnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {png} and {svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
