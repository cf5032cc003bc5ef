"""Command line for rendering embedding panels.

    hqcw-viz render --labels graph.edgelist --out figure.png \
        --perplexity 30 --seed 0 embeddings_a.csv:"CRW 1st" embeddings_b.csv:"HQCW 0.8"

Each positional argument is an embedding CSV, optionally suffixed with
``:title`` for the panel caption.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .render import FigureSpec, render_panels


def _parse_panel(token: str) -> tuple[str, str]:
    path, sep, title = token.partition(":")
    if not sep or not title:
        return token, Path(token).stem
    return path, title


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hqcw-viz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render t-SNE scatter panels")
    p.add_argument("panels", nargs="+", metavar="CSV[:title]", help="embedding CSV files")
    p.add_argument("--labels", required=True, help="edge-list file with #label lines")
    p.add_argument("--out", required=True, help="output image path (PNG)")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        panels=[_parse_panel(token) for token in args.panels],
        labels_path=args.labels,
        output_path=args.out,
        perplexity=args.perplexity,
        iterations=args.iterations,
        seed=args.seed,
    )
    try:
        path = render_panels(spec)
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
