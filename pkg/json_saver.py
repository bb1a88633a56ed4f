"""
JSON output for result objects and verification reports.
"""
import json
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

from config import REPORT_DIR


class JSONSaver:
    """Serialize results with fixed key order and indentation."""

    def __init__(self, output_dir: Optional[Path] = None):
        """Initialize JSON saver; the report directory is created on first save."""
        self.output_dir = output_dir or REPORT_DIR
        self.session_id = datetime.now().strftime('%Y%m%d_%H%M%S')

    @staticmethod
    def dumps(data: Any) -> str:
        return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def save(self, data: Any, filepath: Path) -> Path:
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(self.dumps(data))
        return filepath

    def save_report(self, report: Any) -> Path:
        """Save a verification report with timings under the report directory."""
        filename = f"verify_{report.scope}_{self.session_id}.json"
        data = {
            "timestamp": datetime.now().isoformat(),
            "session_id": self.session_id,
            "report": report.to_dict(include_timing=True),
        }
        return self.save(data, self.output_dir / filename)
