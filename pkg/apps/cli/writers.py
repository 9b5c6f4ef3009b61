"""CSV and JSON renderings of command results.

CSV: header row, one record per line, LF endings, then ``key,value``
records for the summary. JSON: one object with ``rows`` and ``meta``.
CSV floats are written with 12 significant digits so golden files stay
stable across platforms; JSON keeps the full double.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field


def format_number(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, str)):
        return str(value)
    return format(value, ".12g")


def _json_number(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass
class Table:
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)


def render_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_number(value) for value in row])
    for key, value in table.summary.items():
        writer.writerow([key, format_number(value)])
    return buffer.getvalue()


def render_json(table: Table, meta: dict) -> str:
    payload = {
        "rows": [
            {column: _json_number(value) for column, value in zip(table.columns, row)}
            for row in table.rows
        ],
        "meta": {**meta, "summary": {k: _json_number(v) for k, v in table.summary.items()}},
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render(table: Table, fmt, meta) -> str:
    if fmt == "json":
        return render_json(table, meta)
    return render_csv(table)
