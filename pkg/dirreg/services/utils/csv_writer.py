import csv
import io
import math
from typing import Any, Iterable, Sequence

from pydantic import BaseModel


def format_cell(value: Any) -> str:
    """Floats as %.12g, vectors space-separated, None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.12g" % (value + 0.0)
    if isinstance(value, (list, tuple)):
        return " ".join(format_cell(v) for v in value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def rows_to_csv(fieldnames: Sequence[str], rows: Iterable[BaseModel]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: format_cell(v) for k, v in row.model_dump().items()})
    return buffer.getvalue()
