"""
Utility functions for file handling, text formats and validation.
"""
import json
from pathlib import Path
from typing import Any, Dict, Sequence, Union

from config import FIXTURES_FILE
from exact_core import IntMatrix

REQUIRED_FIXTURE_SECTIONS = ("coordinator_table",)


def validate_path(path: Union[str, Path]) -> Path:
    """Validate that path exists."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Path does not exist: {path}")
    return path


def validate_m(m: int) -> int:
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    return m


def format_matrix_text(matrix: IntMatrix) -> str:
    """Header "d n", then d lines of n space-separated integers."""
    lines = [f"{matrix.rows} {matrix.cols}"]
    lines.extend(" ".join(str(x) for x in row) for row in matrix.to_rows())
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> IntMatrix:
    """Inverse of format_matrix_text; blank lines are ignored."""
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError("Matrix text must start with a 'd n' header")
    try:
        rows, cols = int(lines[0][0]), int(lines[0][1])
        body = [[int(x) for x in line] for line in lines[1:]]
    except ValueError as e:
        raise ValueError(f"Matrix text contains a non-integer token: {e}")
    if len(body) != rows:
        raise ValueError(f"Header announces {rows} rows, found {len(body)}")
    for i, row in enumerate(body):
        if len(row) != cols:
            raise ValueError(f"Row {i} has {len(row)} entries, expected {cols}")
    if rows == 0:
        return IntMatrix(0, cols, ())
    return IntMatrix.from_rows(body)


def read_matrix_file(path: Union[str, Path]) -> IntMatrix:
    path = validate_path(path)
    with open(path, "r", encoding="utf-8") as f:
        return parse_matrix_text(f.read())


def format_facets_text(facets: Sequence[Any]) -> str:
    """One facet per line: "denominator ; numerators... ; incident indices..."."""
    lines = []
    for facet in facets:
        numerators = " ".join(str(x) for x in facet.normal.numerators)
        incident = " ".join(str(i) for i in facet.incident)
        lines.append(f"{facet.normal.denominator} ; {numerators} ; {incident}")
    return "\n".join(lines) + ("\n" if lines else "")


def load_fixtures(path: Union[str, Path, None] = None) -> Dict[str, Any]:
    """Load the golden-value fixture file."""
    fixtures_path = validate_path(path or FIXTURES_FILE)
    if not fixtures_path.is_file():
        raise ValueError(f"Path is not a file: {fixtures_path}")
    if fixtures_path.suffix.lower() != ".json":
        raise ValueError(f"Fixture file is not JSON: {fixtures_path}")
    with open(fixtures_path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Fixture file {fixtures_path} is not valid JSON: {e}")
    missing = [s for s in REQUIRED_FIXTURE_SECTIONS if s not in data]
    if missing:
        raise ValueError(f"Fixture file {fixtures_path} lacks sections: {', '.join(missing)}")
    return data


def format_duration(seconds: float) -> str:
    """Format elapsed time in human-readable form."""
    if seconds < 1.0:
        return f"{seconds * 1000:.0f} ms"
    if seconds < 60.0:
        return f"{seconds:.2f} s"
    return f"{seconds / 60.0:.1f} min"
