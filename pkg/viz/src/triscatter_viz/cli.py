"""viz --in DIR --out DIR --which {q-map,xi-map,norms,profile,all}"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .loader import MissingDumpError, load_dumps
from .render import FIGURES, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="viz", description="Render figures from triscatter CSV artifacts.")
    parser.add_argument("--in", dest="in_dir", type=Path, required=True,
                        help="directory holding the CSV dumps and run summary")
    parser.add_argument("--out", dest="out_dir", type=Path, required=True,
                        help="directory for the rendered images")
    parser.add_argument("--which", default="all", choices=FIGURES + ("all",))
    args = parser.parse_args(argv)
    try:
        dumps = load_dumps(args.in_dir)
        paths = render(dumps, args.which, args.out_dir)
    except MissingDumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
