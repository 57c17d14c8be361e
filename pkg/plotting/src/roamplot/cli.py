"""The `plot` command: aggregate CSVs in, a figure out.

    plot --inputs a.csv b.csv --labels A B --panel regret|error|ratio|all \
         --out fig.png --window 10

Exit codes: 0 success, 2 bad arguments or schema mismatch, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .model import DEFAULT_WINDOW, FigureSpec, SchemaError
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--inputs", nargs="+", required=True,
                        help="one aggregate CSV per curve")
    parser.add_argument("--labels", nargs="+", required=True,
                        help="one legend label per input")
    parser.add_argument("--panel", choices=("regret", "error", "ratio", "all"),
                        default="all")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--window", type=int, default=DEFAULT_WINDOW,
                        help="smoothing window for the critical-ratio panel")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(inputs=[Path(p) for p in args.inputs], labels=args.labels,
                      out=Path(args.out), panel=args.panel, window=args.window)
    try:
        out = render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
