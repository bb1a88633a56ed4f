"""
CSV output for shells, transportation vertices and facets.
"""
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

from growth_oracle import ShellCounts
from hull_engine import Facet
from transport_dual import TransportVertex


class CSVWriter:
    """Turn result objects into DataFrames and write them as CSV."""

    def __init__(self, output_path: Optional[Path] = None):
        """
        Initialize CSV writer.

        Args:
            output_path: Target file; None means the caller wants text for stdout
        """
        self.output_path = output_path

    @staticmethod
    def shells_frame(shells: ShellCounts) -> pd.DataFrame:
        return pd.DataFrame({"n": range(shells.max_n + 1), "count": list(shells.counts)})

    @staticmethod
    def vertices_frame(vertices: Sequence[TransportVertex]) -> pd.DataFrame:
        """One flattened table per row, columns x_i_j."""
        if not vertices:
            raise ValueError("No vertices to write")
        p, q = vertices[0].p, vertices[0].q
        headers = [f"x_{i}_{j}" for i in range(p) for j in range(q)]
        return pd.DataFrame([v.flattened() for v in vertices], columns=headers)

    @staticmethod
    def facets_frame(facets: Sequence[Facet]) -> pd.DataFrame:
        """Denominator, numerators and incident indices; list columns are space-joined."""
        rows = [
            {
                "denominator": f.normal.denominator,
                "numerators": " ".join(str(x) for x in f.normal.numerators),
                "incident": " ".join(str(i) for i in f.incident),
            }
            for f in facets
        ]
        return pd.DataFrame(rows, columns=["denominator", "numerators", "incident"])

    @staticmethod
    def to_text(df: pd.DataFrame) -> str:
        return df.to_csv(index=False, lineterminator="\n")

    def write(self, df: pd.DataFrame) -> Path:
        """
        Write a DataFrame to the configured path.

        A locked target is retried with backoff, then written to a
        timestamped sibling file.

        Returns:
            Path actually written
        """
        if self.output_path is None:
            raise ValueError("CSVWriter has no output path")
        self.output_path.parent.mkdir(parents=True, exist_ok=True)

        max_retries = 3
        retry_delay = 1
        for attempt in range(max_retries):
            try:
                if attempt > 0 and self.output_path.exists():
                    os.remove(self.output_path)
                df.to_csv(self.output_path, index=False, encoding="utf-8", lineterminator="\n")
                return self.output_path
            except PermissionError:
                if attempt < max_retries - 1:
                    print(
                        f"   ⚠️  Permission denied on {self.output_path.name}. "
                        f"Retrying in {retry_delay} second(s)...",
                        file=sys.stderr,
                    )
                    time.sleep(retry_delay)
                    retry_delay *= 2

        backup_path = self.output_path.with_name(f"{self.output_path.stem}_{int(time.time())}.csv")
        print(f"   💾 Writing to backup file: {backup_path.name}", file=sys.stderr)
        df.to_csv(backup_path, index=False, encoding="utf-8", lineterminator="\n")
        return backup_path
