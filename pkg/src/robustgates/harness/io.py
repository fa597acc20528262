"""Deterministic CSV/JSON emission of sweep records."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return repr(v)
        # 17 significant digits round-trips every double
        return format(v, ".17g")
    return str(v)


def parse_value(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def records_to_csv(records: list[dict]) -> str:
    if not records:
        return ""
    columns = list(records[0])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        if list(rec) != columns:
            raise ValueError("all records must share the same columns in the same order")
        writer.writerow(format_value(rec[c]) for c in columns)
    return buf.getvalue()


def csv_to_records(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        return []
    header, *body = rows
    return [dict(zip(header, (parse_value(x) for x in row))) for row in body]


def records_to_json(records: list[dict]) -> str:
    return json.dumps(records, indent=1, allow_nan=False) + "\n"


def write_records(records: list[dict], path: Path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    text = records_to_json(records) if fmt == "json" else records_to_csv(records)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" on every platform so output bytes are identical
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def read_records(path: Path) -> list[dict]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return json.loads(text)
    return csv_to_records(text)
