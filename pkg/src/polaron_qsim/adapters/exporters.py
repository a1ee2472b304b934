"""Table and summary writers (CSV via the csv module, JSON via orjson)."""
import csv
import io
from pathlib import Path
from typing import Any, Dict

import numpy as np
import orjson

from ..state import Table

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_SORT_KEYS


def _cell(value: Any, float_format: str) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return float_format.format(float(value))
    return str(value)


def table_to_csv(table: Table) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v, table.float_format) for v in row])
    return buf.getvalue().encode("utf-8")


def table_to_json(table: Table) -> bytes:
    return orjson.dumps({"columns": table.columns, "rows": table.rows}, option=JSON_OPTIONS)


def summary_to_json(summary: Dict[str, Any]) -> bytes:
    return orjson.dumps(summary, option=JSON_OPTIONS, default=str)


def write_bytes(path: Path, payload: bytes) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)
    return str(path)
