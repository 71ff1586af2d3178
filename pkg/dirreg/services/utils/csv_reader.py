import csv
from pathlib import Path

import numpy as np

from dirreg.exceptions import InstanceError


def read_points(file_path: str | Path, columns: int) -> np.ndarray:
    """Rows of floats after a header line."""
    points = []

    with open(file_path, mode="r", newline="") as file:
        csv_reader = csv.reader(file)
        next(csv_reader, None)

        for line, row in enumerate(csv_reader, start=2):
            if not row:
                continue
            if len(row) != columns:
                raise InstanceError(f"{file_path}: line {line}: expected {columns} columns, got {len(row)}")
            try:
                points.append([float(cell) for cell in row])
            except ValueError:
                raise InstanceError(f"{file_path}: line {line}: non-numeric entry")

    return np.array(points, dtype=float).reshape(-1, columns)
