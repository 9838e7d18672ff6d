"""Command-line front end mirroring FigureSpec.

Exit codes: 0 success, 1 bad usage or unreadable/mismatched input.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plotgen", description=__doc__)
    p.add_argument("--csv", action="append", required=True,
                   help="input sweep CSV (repeat for the tangent cost CSV)")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--out", required=True, help="output raster image path")
    p.add_argument("--value", default="ratio",
                   choices=("ratio", "lower", "upper"), help="heatmap field")
    p.add_argument("--at-axis2", type=float, default=None,
                   help="axis2 value selecting the curve column")
    p.add_argument("--tangent-k", type=float, default=None,
                   help="cost weight k for the slope -k^2 tangent overlay")
    p.add_argument("--xscale", choices=("log", "linear"), default=None)
    p.add_argument("--yscale", choices=("log", "linear"), default=None)
    p.add_argument("--title", default=None)
    return p


def run(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    try:
        spec = FigureSpec(
            csv_paths=args.csv,
            kind=args.kind,
            out_path=args.out,
            value=args.value,
            at_axis2=args.at_axis2,
            tangent_k=args.tangent_k,
            xscale=args.xscale,
            yscale=args.yscale,
            title=args.title,
        )
        info = render(spec)
    except (SchemaError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {info['out_path']}")
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
