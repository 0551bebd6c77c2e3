"""Figure command line.

    plot convergence --dump <dir> [--dump <dir2>] --out fig.png
    plot control-profile --dump <dir> [--dump <dir2>] [--slice -1] --out fig.svg
    plot j-vs-k --csv bench.csv [--case case2] [--n-h 129] --out fig.png
    plot cpu-vs-k --csv bench.csv [--case case2] [--method space-time] --out fig.png
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, make_figure, save_figure
from .io import EmptySelectionError, MissingColumnError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render benchmark figures from CSV and dumps.")
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--csv", default=None, help="benchmark CSV file")
    parser.add_argument("--dump", action="append", default=[],
                        help="field dump directory (repeatable)")
    parser.add_argument("--case", default=None, help="filter: case name")
    parser.add_argument("--method", default=None,
                        help="filter: space-time or semi-discrete")
    parser.add_argument("--n-h", default=None, type=int,
                        help="filter: spatial dof count")
    parser.add_argument("--slice", default=-1, type=int,
                        help="time slice for control-profile (default: last)")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        fig = make_figure(args.kind, csv_path=args.csv, dump_dirs=args.dump,
                          case=args.case, method=args.method, n_h=args.n_h,
                          slice_index=args.slice)
        save_figure(fig, args.out)
    except (MissingColumnError, EmptySelectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
