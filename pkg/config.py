"""
Configuration module for the cyclotomic lattice toolkit.
"""
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Project Paths
PROJECT_ROOT = Path(__file__).parent
OUTPUT_DIR = PROJECT_ROOT / "output"
REPORT_DIR = OUTPUT_DIR / "reports"
FIXTURES_FILE = PROJECT_ROOT / "fixtures.json"

BUDGET_ENV_VAR = "CYCLOLAT_BUDGET"

# Default budgets
DEFAULT_BFS_POINTS = 20_000_000
DEFAULT_FACES = 10_000_000
DEFAULT_TU_MAX_ROWS = 8         # min(rows, cols) of a block, after reduction
DEFAULT_TU_MAX_COLS = 30
DEFAULT_SPLIT_MAX_COLS = 25
DEFAULT_HULL_MAX_DIM = 12
DEFAULT_HULL_MAX_VERTICES = 35
DEFAULT_SCAN_SUBSETS = 20_000   # above this the hull engine seeds from Qhull
DEFAULT_LATTICE_MAX_DIM = 10    # 3^10 candidate points
DEFAULT_DILATE_POINTS = 10_000_000
DEFAULT_SPANNING_TREES = 1_000_000

# CLI exit codes
EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_BUDGET_EXCEEDED = 3


class BudgetExceededError(RuntimeError):
    """Raised when a computation would exceed one of the configured budgets."""

    def __init__(
        self,
        budget_name: str,
        limit: int,
        requested: int,
        partial: Optional[Any] = None,
    ):
        self.budget_name = budget_name
        self.limit = limit
        self.requested = requested
        self.partial = partial
        super().__init__(
            f"Budget '{budget_name}' exceeded: requested {requested:,}, limit {limit:,}"
        )


@dataclass(frozen=True)
class Budgets:
    """Resource guards for the exponential parts of the toolkit."""

    bfs_points: int = DEFAULT_BFS_POINTS
    faces: int = DEFAULT_FACES
    tu_max_rows: int = DEFAULT_TU_MAX_ROWS
    tu_max_cols: int = DEFAULT_TU_MAX_COLS
    split_max_cols: int = DEFAULT_SPLIT_MAX_COLS
    hull_max_dim: int = DEFAULT_HULL_MAX_DIM
    hull_max_vertices: int = DEFAULT_HULL_MAX_VERTICES
    scan_subsets: int = DEFAULT_SCAN_SUBSETS
    lattice_max_dim: int = DEFAULT_LATTICE_MAX_DIM
    dilate_points: int = DEFAULT_DILATE_POINTS
    spanning_trees: int = DEFAULT_SPANNING_TREES

    @classmethod
    def parse(cls, text: str) -> "Budgets":
        """
        Parse a budget override string.

        Args:
            text: Either a bare integer (applied to bfs_points) or
                comma-separated ``name=value`` pairs, e.g. ``faces=1e6,bfs_points=5e7``

        Returns:
            Budgets with the overrides applied on top of the defaults
        """
        text = text.strip()
        if not text:
            return cls()
        if "=" not in text:
            return cls(bfs_points=_parse_count(text, "bfs_points"))

        known = {f.name for f in fields(cls)}
        overrides = {}
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            name, sep, value = token.partition("=")
            name = name.strip()
            if not sep or name not in known:
                raise ValueError(
                    f"Invalid {BUDGET_ENV_VAR} entry '{token}'. "
                    f"Known budgets: {', '.join(sorted(known))}"
                )
            overrides[name] = _parse_count(value, name)
        return cls(**overrides)

    @classmethod
    def from_env(cls) -> "Budgets":
        """Budgets from CYCLOLAT_BUDGET, or defaults when unset."""
        return cls.parse(os.getenv(BUDGET_ENV_VAR, ""))

    def with_overrides(self, **overrides: Optional[int]) -> "Budgets":
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def _parse_count(value: str, name: str) -> int:
    text = value.strip()
    try:
        count = int(text)
    except ValueError:
        try:
            as_float = float(text)
        except ValueError:
            raise ValueError(f"Budget '{name}' must be an integer, got '{value}'")
        if not as_float.is_integer():
            raise ValueError(f"Budget '{name}' must be an integer, got '{value}'")
        count = int(as_float)
    if count <= 0:
        raise ValueError(f"Budget '{name}' must be positive, got {count}")
    return count


def resolve_budgets(budgets: Optional[Budgets] = None) -> Budgets:
    """Budgets to use when a caller passes None."""
    return budgets if budgets is not None else Budgets.from_env()
