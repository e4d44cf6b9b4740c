"""Table container and the csv / json / svg-polyline writers."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

__all__ = ["SCHEMA_VERSION", "Table", "render", "FORMATS"]

SCHEMA_VERSION = 1
FORMATS = ("csv", "json", "svg")


@dataclass
class Table:
    """Rows of one command.

    ``plot`` names the x column, the y columns and an optional grouping
    column; the svg writer and the figure renderer both use it.
    """

    command: str
    columns: list
    rows: list = field(default_factory=list)
    meta: list = field(default_factory=list)
    plot: Optional[dict] = None

    @property
    def schema(self) -> str:
        return f"spingp.{self.command}/v{SCHEMA_VERSION}"

    def add(self, **values):
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown columns {sorted(unknown)}")
        self.rows.append({c: values.get(c, "") for c in self.columns})

    def column(self, name):
        return [row[name] for row in self.rows]

    @property
    def error_rows(self):
        return [row for row in self.rows if row.get("status", "ok") != "ok"]

    def groups(self):
        """``(label, rows)`` pairs in first-appearance order."""
        key = (self.plot or {}).get("group")
        if not key:
            return [("", self.rows)]
        out = {}
        for row in self.rows:
            out.setdefault(f"{key}={_cell(row[key])}", []).append(row)
        return list(out.items())


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def to_csv(table: Table) -> str:
    lines = [f"# schema: {table.schema}"]
    lines.extend(f"# {m}" for m in table.meta)
    lines.append(",".join(table.columns))
    for row in table.rows:
        cells = []
        for c in table.columns:
            text = _cell(row[c])
            if "," in text or '"' in text:
                text = '"' + text.replace('"', '""') + '"'
            cells.append(text)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def to_json(table: Table) -> str:
    doc = {
        "schema": table.schema,
        "meta": list(table.meta),
        "columns": list(table.columns),
        "records": [{c: _json_value(row[c]) for c in table.columns} for row in table.rows],
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def to_svg(table: Table, width=640, height=400, pad=40) -> str:
    """Pre-scaled polylines, one per (group, y column), for quick visual diffs."""
    if not table.plot:
        raise ValueError(f"{table.command} has no plottable columns")
    xcol, ycols = table.plot["x"], table.plot["y"]
    series = []
    for label, rows in table.groups():
        for ycol in ycols:
            pts = [
                (float(r[xcol]), float(r[ycol]))
                for r in rows
                if isinstance(r[ycol], (int, float)) and math.isfinite(r[ycol])
            ]
            series.append((f"{label} {ycol}".strip(), pts))
    xs = [p[0] for _, pts in series for p in pts] or [0.0, 1.0]
    ys = [p[1] for _, pts in series for p in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- schema: {table.schema} -->",
        f"<!-- x: {xcol} [{x0!r}, {x1!r}]  y: [{y0!r}, {y1!r}] -->",
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#888"/>',
    ]
    for i, (label, pts) in enumerate(series):
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        color = _PALETTE[i % len(_PALETTE)]
        out.append(
            f'<polyline data-series="{label}" fill="none" stroke="{color}" '
            f'stroke-width="1.5" points="{coords}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    if fmt == "svg":
        return to_svg(table)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
