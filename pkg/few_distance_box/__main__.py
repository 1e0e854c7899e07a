"""Entry point for `python -m few_distance_box`.

Run with:
    python -m few_distance_box --help
    python -m few_distance_box probe --n 3 --q 2 --s 1
"""

from __future__ import annotations

import sys

from dotenv import load_dotenv

from few_distance_box.cli import parse_args
from few_distance_box.orchestrator import run


def main() -> None:
    load_dotenv()
    args = parse_args()
    sys.exit(run(args))


if __name__ == "__main__":
    main()
