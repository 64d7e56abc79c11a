"""Result tables: canonical ordering, fixed number formatting and atomic writes."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .svg import Curve, plot_svg

BASE_COLUMNS = ("method", "n", "L", "L_A", "x", "S", "S_per_L", "prediction", "abs_err")
SIG_DIGITS = 12


def format_value(v) -> str:
    """Render one cell: floats with 12 significant digits, blanks for missing."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (float, Fraction)):
        f = float(v)
        if not math.isfinite(f):
            raise ValueError(f"non-finite value {f!r} in output table")
        text = f"{f:.{SIG_DIGITS}g}"
        return "0" if text == "-0" else text
    return str(v)


def _json_value(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, (float, Fraction)):
        return float(format_value(v))
    return str(v)


def _sort_key(row: list, order: list[int]):
    key = []
    for i in order:
        v = row[i]
        if v is None:
            key.append((0, 0.0, ""))
        elif isinstance(v, bool) or isinstance(v, str):
            key.append((2, 0.0, format_value(v)))
        else:
            key.append((1, float(v), ""))
    return tuple(key)


@dataclass
class Table:
    """Rows of a job's output plus the curves drawn for its SVG view."""

    columns: list[str]
    rows: list[list] = field(default_factory=list)
    key_columns: list[str] = field(default_factory=list)
    curves: list[Curve] = field(default_factory=list)
    title: str = ""
    xlabel: str = "x"
    ylabel: str = "S / L"
    error_column: str = "abs_err"

    def add(self, **values) -> None:
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown columns {sorted(unknown)}")
        self.rows.append([values.get(c) for c in self.columns])

    def sort(self) -> None:
        keys = [c for c in self.key_columns if c in self.columns]
        keys += [c for c in self.columns if c not in keys]
        order = [self.columns.index(c) for c in keys]
        self.rows.sort(key=lambda r: _sort_key(r, order))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def max_error(self) -> float | None:
        if self.error_column not in self.columns:
            return None
        errs = [float(v) for v in self.column(self.error_column) if v is not None]
        return max(errs) if errs else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "columns": self.columns,
            "rows": [[_json_value(v) for v in row] for row in self.rows],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    def to_svg(self) -> str:
        if not self.curves:
            raise ValueError("this table has no curves to plot")
        return plot_svg(self.curves, title=self.title, xlabel=self.xlabel, ylabel=self.ylabel)

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        if fmt == "svg":
            return self.to_svg()
        raise ValueError(f"unknown format {fmt!r}")


def _current_umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def write_atomic(path: str | os.PathLike, text: str) -> Path:
    """Write ``text`` to a temporary sibling and rename it over ``path``.

    Readers see either the previous file or the complete new one, never a
    partial write.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            # mkstemp creates 0600; give the result the usual umask permissions
            os.fchmod(fh.fileno(), 0o666 & ~_current_umask())
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target
