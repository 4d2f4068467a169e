"""Deterministic report and CSV emission.

Numbers serialize as the shortest round-trip decimal of their binary64 value
(Python's repr, which json uses), keys are sorted, line endings are LF, and
non-finite floats become the strings "inf", "-inf", "nan" so the documents
stay valid JSON and byte-identical across runs and platforms.
"""

from __future__ import annotations

import json
import math
from typing import Any, Iterable

FORMAT_VERSION = 1


def jsonable(value: Any) -> Any:
    """Recursively convert a report structure to JSON-safe values."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        # numpy scalars
        try:
            return jsonable(value.item())
        except Exception:
            return value
    return value


def dumps_report(doc: dict) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_report(doc))


def format_number(x: Any) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def write_csv(rows: Iterable[dict], header: list[str], path) -> None:
    """Plain comma-separated output, LF endings, shortest round-trip floats."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(row[h]) for h in header))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
