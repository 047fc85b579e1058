"""Deterministic CSV/JSON emission of numeric tables.

Numbers are written with 17 significant digits so every double survives a
text round trip; the same table always produces the same bytes.
"""
from __future__ import annotations

import json
import math
from typing import IO, Iterable, List, Sequence, Tuple


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    v = float(value)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {v!r} cannot be serialized")
    return format(v, ".17g")


def _rows(columns: Sequence[str], rows: Iterable[Sequence]) -> List[List[str]]:
    out = []
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row length does not match columns")
        out.append([fmt(v) for v in row])
    return out


def render_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(columns)]
    lines += [",".join(r) for r in _rows(columns, rows)]
    return "\n".join(lines) + "\n"


def render_json(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    body = ",\n".join("    [" + ", ".join(r) + "]" for r in _rows(columns, rows))
    cols = ", ".join(json.dumps(c) for c in columns)
    return '{\n  "columns": [' + cols + '],\n  "rows": [\n' + body + "\n  ]\n}\n"


def render_table(columns: Sequence[str], rows: Iterable[Sequence], format: str = "csv") -> str:
    if format == "csv":
        return render_csv(columns, rows)
    if format == "json":
        return render_json(columns, rows)
    raise ValueError(f"unknown format {format!r}")


def parse_json_table(text: str) -> Tuple[List[str], List[list]]:
    # every number back to float so that -0 and integral values re-emit unchanged
    doc = json.loads(text, parse_int=float)
    return list(doc["columns"]), [list(r) for r in doc["rows"]]


def parse_csv_table(text: str) -> Tuple[List[str], List[list]]:
    lines = text.strip("\n").split("\n")
    return lines[0].split(","), [[float(v) for v in ln.split(",")] for ln in lines[1:]]


def render_report(items: Sequence[Tuple[str, object]], format: str = "csv") -> str:
    """Key/value report: ``key: value`` lines, or a flat JSON object."""
    if format == "json":
        body = ",\n".join(f"  {json.dumps(k)}: {_json_scalar(v)}" for k, v in items)
        return "{\n" + body + "\n}\n"
    return "".join(f"{k}: {fmt(v)}\n" for k, v in items)


def _json_scalar(v) -> str:
    if isinstance(v, str):
        return json.dumps(v)
    return fmt(v)


def write_text(text: str, stream: IO[str]) -> None:
    stream.write(text)
    stream.flush()
