"""Minimal deterministic SVG line plots.

Output depends only on the input data: fixed palette, fixed number formatting,
no timestamps or random ids, so identical input gives byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 70, "right": 170, "top": 30, "bottom": 50}
PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass(frozen=True)
class Curve:
    x: tuple[float, ...]
    y: tuple[float, ...]
    label: str = ""
    dashed: bool = False


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".") if v != 0 else "0"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _as_curve(item, label: str, index: int) -> Curve:
    if isinstance(item, Curve):
        curve = item
    else:
        xs, ys = item
        curve = Curve(tuple(float(v) for v in xs), tuple(float(v) for v in ys))
    if len(curve.x) != len(curve.y):
        raise ValueError(f"curve {index}: {len(curve.x)} x values but {len(curve.y)} y values")
    if not curve.x:
        raise ValueError(f"curve {index} is empty")
    if not all(math.isfinite(v) for v in curve.x + curve.y):
        raise ValueError(f"curve {index} contains NaN or infinite values")
    name = label or curve.label or f"series {index + 1}"
    return Curve(curve.x, curve.y, name, curve.dashed)


def plot_svg(series, labels=None, title: str = "", xlabel: str = "x", ylabel: str = "y") -> str:
    """Render curves as a self-contained SVG document.

    Parameters
    ----------
    series : sequence of Curve or (xs, ys) pairs
    labels : sequence of str, optional
        Legend entries; missing or empty entries are numbered automatically.
    """
    series = list(series)
    if not series:
        raise ValueError("nothing to plot")
    labels = list(labels or [])
    labels += [""] * (len(series) - len(labels))
    curves = [_as_curve(item, lab, i) for i, (item, lab) in enumerate(zip(series, labels))]

    xs = [v for c in curves for v in c.x]
    ys = [v for c in curves for v in c.y]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(min(ys), 0.0), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y1 = y0 + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v: float) -> float:
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v: float) -> float:
        return MARGIN["top"] + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="18" text-anchor="middle">{escape(title)}</text>')
    left, bottom = MARGIN["left"], HEIGHT - MARGIN["bottom"]
    right = MARGIN["left"] + pw
    out.append(
        f'<path d="M{left} {MARGIN["top"]} L{left} {bottom} L{right} {bottom}" '
        'stroke="black" fill="none"/>'
    )
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{bottom}" x2="{px(t):.2f}" y2="{bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{bottom + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{MARGIN["top"] + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.2f})">{escape(ylabel)}</text>'
    )
    for i, c in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if c.dashed else ""
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(c.x, c.y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        ly = MARGIN["top"] + 14 + 18 * i
        lx = right + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(c.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
