"""Plain-text point-cloud reader"""

from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from src.errors import CloudParseError
from src.models.cloud import PointCloud


class PointCloudParser:
    """Parse `x y z [r g b]` lines into a PointCloud

    Blank lines and lines starting with `#` are skipped. Every data line
    must have the same width as the first one (3 or 6 values).
    """

    comment_prefix = "#"

    def parse_file(self, file_path: Union[str, Path]) -> PointCloud:
        """Parse a point-cloud file

        Args:
            file_path: Path to the text file

        Returns:
            Parsed cloud

        Raises:
            FileNotFoundError: If the file doesn't exist
            CloudParseError: On a malformed line, with its line number
        """
        file_path = Path(file_path)
        if not file_path.exists():
            raise FileNotFoundError(f"File not found: {file_path}")

        with open(file_path, "r", encoding="utf-8") as f:
            content = f.read()
        return self.parse_content(content, source=str(file_path))

    def parse_content(self, content: str, source: Optional[str] = None) -> PointCloud:
        rows: List[List[float]] = []
        width: Optional[int] = None

        for line_number, raw in enumerate(content.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith(self.comment_prefix):
                continue
            fields = line.split()
            if len(fields) not in (3, 6):
                raise CloudParseError(f"expected 3 or 6 values, got {len(fields)}", line_number, source)
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise CloudParseError(
                    f"expected {width} values like the first point, got {len(fields)}", line_number, source
                )
            try:
                values = [float(v) for v in fields]
            except ValueError:
                raise CloudParseError(f"non-numeric value in {line!r}", line_number, source)
            if not all(np.isfinite(values)):
                raise CloudParseError("non-finite value", line_number, source)
            if width == 6 and any(c < 0.0 or c > 1.0 for c in values[3:]):
                raise CloudParseError("color channels must lie in [0, 1]", line_number, source)
            rows.append(values)

        if not rows:
            return PointCloud(np.zeros((0, 3)))
        return PointCloud.from_features(np.array(rows, dtype=np.float64))


def read_point_cloud(file_path: Union[str, Path]) -> PointCloud:
    return PointCloudParser().parse_file(file_path)
