"""Command line: render one figure from a telemetry CSV."""

from __future__ import annotations

import argparse
import sys

from .reader import SchemaError
from .render import PLOT_KINDS, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ringswarm-plot",
        description="Render a figure from a ringswarm telemetry CSV",
    )
    p.add_argument("--kind", required=True, choices=PLOT_KINDS)
    p.add_argument("--in", dest="in_path", required=True, help="telemetry CSV path")
    p.add_argument("--out", required=True, help="output image path (.png, .pdf, ...)")
    p.add_argument("--agent", type=int, default=None,
                   help="agent id for per-agent kinds (default: lowest id)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.kind, args.in_path, args.out, agent=args.agent)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
