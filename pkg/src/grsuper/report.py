"""Render feasibility reports as markdown, CSV or JSON.

Machine formats (csv, json) carry raw SI floats written with ``repr`` so the
output is byte-stable; unbounded values are spelled ``inf``. Markdown uses SI
prefixes with two significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Callable

from .constants import si_format

__all__ = ["Column", "RenderSpec", "REPORT_COLUMNS", "DEFAULT_COLUMNS", "SWEEP_COLUMNS", "parse_columns", "render", "FORMATS"]

FORMATS = ("md", "csv", "json")


@dataclass(frozen=True)
class Column:
    name: str
    unit: str
    get: Callable
    kind: str = "float"  # float | int | text

    @property
    def header(self) -> str:
        return f"{self.name} [{self.unit}]" if self.unit else self.name


def _col(name, unit, kind="float", attr=None, get=None):
    return Column(name, unit, get or (lambda r, a=attr or name: getattr(r, a)), kind)


REPORT_COLUMNS = {
    c.name: c
    for c in [
        _col("id", "", "text"),
        _col("label", "", "text"),
        _col("f_m", "Hz"),
        _col("mass", "kg"),
        _col("Q", "1"),
        _col("T_bath", "K"),
        _col("r_model", "", "text"),
        _col("x_zpf", "m"),
        _col("R", "m"),
        _col("n", "phonons", "int"),
        _col("n_display", "phonons", "text"),
        _col("n_th", "1"),
        _col("dx", "m"),
        _col("required_dx", "m"),
        _col("t_coh", "s"),
        _col("t_GR", "s"),
        _col("ratio", "1"),
        _col("verdict", "", "text"),
        _col("lower_margin", "1", get=lambda r: r.margins.lower_margin),
        _col("upper_margin", "1", get=lambda r: r.margins.upper_margin),
        _col("window_open", "", "text", get=lambda r: "yes" if r.margins.window_open else "no"),
    ]
}

DEFAULT_COLUMNS = ("id", "f_m", "mass", "Q", "x_zpf", "R", "n_display", "n_th", "t_coh", "t_GR", "ratio", "verdict")
SWEEP_COLUMNS = ("f_m", "mass", "Q", "T_bath", "x_zpf", "n", "n_th", "t_coh", "t_GR", "ratio", "verdict", "lower_margin", "upper_margin")

_HUMAN_UNITS = {"f_m": "Hz", "mass": "kg", "x_zpf": "m", "R": "m", "dx": "m", "required_dx": "m", "t_coh": "s", "t_GR": "s"}


@dataclass(frozen=True)
class RenderSpec:
    format: str = "md"
    columns: tuple = DEFAULT_COLUMNS

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}; expected one of {FORMATS}")
        parse_columns(",".join(self.columns))


def parse_columns(text: str, registry=None) -> tuple:
    registry = registry or REPORT_COLUMNS
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    unknown = [n for n in names if n not in registry]
    if unknown:
        raise ValueError(f"unknown column(s): {', '.join(unknown)}; known: {', '.join(registry)}")
    if not names:
        raise ValueError("no columns selected")
    return names


def _machine(value, kind: str):
    if kind == "text":
        return str(value)
    if kind == "int":
        return int(value)
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


def _human(name: str, value, kind: str) -> str:
    if kind != "float":
        return str(value)
    if name in _HUMAN_UNITS:
        return si_format(float(value), _HUMAN_UNITS[name])
    v = float(value)
    if math.isinf(v):
        return "inf"
    if v == 0:
        return "0"
    if 1e-2 <= abs(v) < 1e4:
        return f"{v:.2g}"
    return f"{v:.1e}"


def render(rows, spec: RenderSpec, registry=None) -> str:
    registry = registry or REPORT_COLUMNS
    cols = [registry[n] for n in spec.columns]
    if spec.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([c.header for c in cols])
        for r in rows:
            w.writerow([_fmt_csv(_machine(c.get(r), c.kind)) for c in cols])
        return buf.getvalue()
    if spec.format == "json":
        doc = {
            "columns": [{"name": c.name, "unit": c.unit} for c in cols],
            "rows": [{c.name: _machine(c.get(r), c.kind) for c in cols} for r in rows],
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    lines = ["| " + " | ".join(c.header for c in cols) + " |", "|" + "|".join("---" for _ in cols) + "|"]
    for r in rows:
        cells = [_human(c.name, c.get(r), c.kind) for c in cols]
        if getattr(r, "verdict", None) == "favorable":
            # highlighted rows
            cells = [f"**{x}**" for x in cells]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _fmt_csv(v):
    return repr(v) if isinstance(v, float) else v
