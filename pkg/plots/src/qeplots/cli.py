"""``qeplots render``: draw one figure from harness CSVs.

Exit codes: 0 success, 2 bad arguments / schema mismatch / missing columns
or empty series, 1 unexpected i/o failure.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .figures import FIGURE_KINDS, FigureSpec, render

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BAD_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qeplots", description="Render qeopt benchmark figures"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure")
    p.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    p.add_argument(
        "--in", dest="inputs", nargs="+", required=True, help="input CSV paths"
    )
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument(
        "--method", action="append", default=None,
        help="keep only this method/kernel (repeatable)",
    )
    p.add_argument(
        "--n", action="append", type=int, default=None,
        help="keep only this spin count (repeatable)",
    )
    p.add_argument(
        "--m-q", dest="m_q", action="append", type=int, default=None,
        help="keep only this quantum-replica count (repeatable)",
    )
    p.add_argument("--logx", dest="logx", action="store_true", default=None)
    p.add_argument("--no-logx", dest="logx", action="store_false")
    p.add_argument("--logy", dest="logy", action="store_true", default=None)
    p.add_argument("--no-logy", dest="logy", action="store_false")
    p.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            out=args.out,
            methods=tuple(args.method) if args.method else None,
            n_filter=tuple(args.n) if args.n else None,
            mq_filter=tuple(args.m_q) if args.m_q else None,
            logx=args.logx,
            logy=args.logy,
            dpi=args.dpi,
        )
        out = render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"qeplots: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"qeplots: i/o error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
