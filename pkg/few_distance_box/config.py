"""Application-level constants and configuration for few_distance_box."""

from __future__ import annotations

import os
from dataclasses import dataclass

# --- J constant minimisation ---
DEFAULT_TOL = 1e-6
COARSE_GRID_POINTS = 1024      # interior points of the first bracketing scan
MAX_GRID_POINTS = 1 << 18      # sign-sweep refinement stops here
GOLDEN_MAX_ITER = 200
ZOOM_MAX_DEPTH = 60            # rescans toward x -> 0 when the minimiser sits in the first cell
ULP_SLACK = 4                  # directed rounding slack folded into every enclosure

# The J(q) range quoted for d = 3 and q >= 3.
J3_RANGE = (0.8414, 0.9184)
J_LIMIT_START_ZMAX = 4.0
J_LIMIT_MAX_DOUBLINGS = 40

# --- Extremal search ---
DEFAULT_NODE_BUDGET = 5_000_000
DEFAULT_TIME_BUDGET_S = 600.0
EXACT_MODE_MAX_POINTS = 4096   # guideline q^n for exact mode
SUBTREE_WAVE_SIZE = 8          # subtrees per deterministic wave, independent of worker count
# dynamic mode searches palette by palette when C(|palette|, s) is at most this
PALETTE_ENUMERATION_LIMIT = 5000
BUDGET_CHECK_EVERY = 1024      # nodes between time-budget checks
DEFAULT_WORKERS = 1

# --- Exit codes ---
EXIT_OK = 0
EXIT_USAGE = 1          # bad arguments, unreadable or malformed input
EXIT_INCONSISTENT = 2   # a result contradicts a theorem

# --- Output ---
CSV_MANIFEST_PREFIX = "# manifest: "
BOUND_COLUMNS: list[str] = [
    "n",
    "q",
    "s",
    "bbs",
    "dgs",
    "deza_frankl",
    "main_theorem",
    "dfrank_box",
    "corollary_lo",
    "corollary_hi",
    "clp_threshold",
]


@dataclass
class AppConfig:
    no_color: bool = False


def load_config() -> AppConfig:
    """Build AppConfig from environment variables and defaults.

    NO_COLOR is the only variable read; any non-empty value disables colour.
    """
    return AppConfig(no_color=bool(os.getenv("NO_COLOR")))
