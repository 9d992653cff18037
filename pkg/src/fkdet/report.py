"""Report records and their JSON / CSV / SVG renderings.

Floats are written with 17 significant digits and -inf as the string
``"-inf"``, so identical runs give byte-identical files and JSON reloads
to the same records.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

FORMATS = ("json", "csv", "svg")


@dataclass
class ReportRecord:
    series: str  # chart line; usually the scheme plus a variant
    scheme: str
    size: float
    value: float  # log-estimate (or distance for marked-group runs); -inf allowed
    certificate: str = "none"
    excluded: int | None = None
    wall_time: float | None = None
    note: str = ""


FIELDS = [f.name for f in fields(ReportRecord)]


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        text = format_float(v)
        return json.dumps(text) if text in ("nan", "inf", "-inf") else text
    return json.dumps(str(v))


def to_json(records: Sequence[ReportRecord]) -> str:
    lines = []
    for rec in records:
        body = ", ".join(f'"{k}": {_json_value(v)}' for k, v in asdict(rec).items())
        lines.append("  {" + body + "}")
    if not lines:
        return "[]\n"
    return "[\n" + ",\n".join(lines) + "\n]\n"


def _float_in(v):
    if v is None:
        return None
    return float(v)


def from_json(text: str) -> list[ReportRecord]:
    out = []
    for obj in json.loads(text):
        obj["value"] = _float_in(obj["value"])
        obj["wall_time"] = _float_in(obj.get("wall_time"))
        out.append(ReportRecord(**{k: obj.get(k) for k in FIELDS}))
    return out


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def to_csv(records: Sequence[ReportRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(FIELDS)
    for rec in records:
        writer.writerow([_csv_cell(getattr(rec, k)) for k in FIELDS])
    return buf.getvalue()


_COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def to_svg(records: Sequence[ReportRecord], title: str = "log-estimate vs size") -> str:
    """One polyline per series; points with non-finite values are skipped."""
    width, height, pad = 640, 400, 60
    series: dict[str, list] = {}
    for rec in records:
        if math.isfinite(rec.value):
            series.setdefault(rec.series, []).append((float(rec.size), rec.value))
    pts = [p for s in series.values() for p in s]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    if pts:
        xs, ys = zip(*pts)
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        if x1 == x0:
            x0, x1 = x0 - 1, x1 + 1
        if y1 == y0:
            y0, y1 = y0 - 1, y1 + 1

        def sx(x):
            return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

        def sy(y):
            return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

        parts.append(
            f'<polyline points="{pad},{pad} {pad},{height - pad} {width - pad},{height - pad}" '
            'fill="none" stroke="black"/>'
        )
        for x, anchor in ((x0, "start"), (x1, "end")):
            parts.append(
                f'<text x="{sx(x):.2f}" y="{height - pad + 16}" text-anchor="{anchor}" '
                f'font-size="11">{x:.6g}</text>'
            )
        for y in (y0, y1):
            parts.append(
                f'<text x="{pad - 4}" y="{sy(y):.2f}" text-anchor="end" font-size="11">{y:.6g}</text>'
            )
        for i, (name, line) in enumerate(series.items()):
            colour = _COLOURS[i % len(_COLOURS)]
            line = sorted(line)
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in line)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
            ly = pad + 16 * i
            parts.append(f'<line x1="{width - pad - 120}" y1="{ly}" x2="{width - pad - 100}" '
                         f'y2="{ly}" stroke="{colour}" stroke-width="2"/>')
            parts.append(f'<text x="{width - pad - 95}" y="{ly + 4}" font-size="11">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(records: Sequence[ReportRecord], fmt: str) -> str:
    if fmt == "json":
        return to_json(records)
    if fmt == "csv":
        return to_csv(records)
    if fmt == "svg":
        return to_svg(records)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


def ordered(records: Iterable[ReportRecord]) -> list[ReportRecord]:
    """Stable sort by (scheme, size), the emission order."""
    return sorted(records, key=lambda r: (r.scheme, float(r.size)))


def emit(records: Iterable[ReportRecord], fmt: str, path=None) -> str:
    """Render and, when ``path`` is given, write the file (OSError propagates)."""
    text = render(ordered(records), fmt)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="")
    return text


def grid_to_csv(values) -> str:
    """Row-major CSV of a grid of complex values: one line per index of the
    leading axes, cells ``re+imj`` with 17 significant digits."""
    import numpy as np

    arr = np.atleast_2d(np.asarray(values, dtype=complex))
    arr = arr.reshape(-1, arr.shape[-1])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    for row in arr:
        writer.writerow([f"{format_float(z.real)}{'+' if z.imag >= 0 else '-'}{format_float(abs(z.imag))}j" for z in row])
    return buf.getvalue()


def table(records: Sequence[ReportRecord]) -> str:
    """Fixed-width text table for terminals."""
    rows = [("series", "size", "value", "certificate", "note")]
    for r in records:
        rows.append((r.series, f"{r.size:g}", format_float(r.value) if isinstance(r.value, float)
                     else str(r.value), r.certificate, r.note))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = []
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row[:4], widths)) + ("  " + row[4] if row[4] else ""))
    return "\n".join(lines) + "\n"
