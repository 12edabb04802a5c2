"""Minimal deterministic SVG charts (line plot and heat map)."""
from __future__ import annotations

from typing import Mapping, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=60, right=140, top=40, bottom=50)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _scale(lo, hi, a, b):
    span = (hi - lo) or 1.0
    return lambda v: a + (v - lo) * (b - a) / span


def line_chart(series: Mapping[str, Sequence[tuple]], title: str, xlabel: str, ylabel: str,
               y_range=None) -> str:
    """``series`` maps a legend label to ``(x, y)`` points."""
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    if not xs:
        xs, ys = [0, 1], [0, 1]
    y_lo, y_hi = y_range if y_range else (min(ys), max(ys))
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    sx = _scale(min(xs), max(xs), x0, x1)
    sy = _scale(y_lo, y_hi, y0, y1)
    out = _header(title)
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="#000"/>')
    for xv in sorted(set(xs)):
        out.append(f'<text x="{_fmt(sx(xv))}" y="{y0 + 16}" font-size="11" text-anchor="middle">{xv:g}</text>')
    for i in range(5):
        yv = y_lo + (y_hi - y_lo) * i / 4
        out.append(f'<text x="{x0 - 6}" y="{_fmt(sy(yv) + 4)}" font-size="11" text-anchor="end">{yv:.3g}</text>')
    for i, (label, pts) in enumerate(series.items()):
        colour = PALETTE[i % len(PALETTE)]
        path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="2"/>')
        for x, y in pts:
            out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3" fill="{colour}"/>')
        ly = MARGIN["top"] + 18 * i + 10
        out.append(f'<line x1="{x1 + 10}" y1="{ly}" x2="{x1 + 30}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{x1 + 36}" y="{ly + 4}" font-size="12">{escape(label)}</text>')
    out.extend(_axis_labels(xlabel, ylabel))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heat_map(cells: Mapping[tuple, float], title: str, xlabel: str, ylabel: str) -> str:
    """``cells`` maps ``(x, y)`` grid keys to values in ``[0, 1]``."""
    x_keys = sorted({k[0] for k in cells})
    y_keys = sorted({k[1] for k in cells})
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    cw = (x1 - x0) / max(len(x_keys), 1)
    ch = (y0 - y1) / max(len(y_keys), 1)
    out = _header(title)
    for i, xv in enumerate(x_keys):
        out.append(f'<text x="{_fmt(x0 + (i + 0.5) * cw)}" y="{y0 + 16}" font-size="11" '
                   f'text-anchor="middle">{xv:g}</text>')
        for j, yv in enumerate(y_keys):
            v = cells.get((xv, yv))
            if v is None:
                continue
            shade = int(round(255 * (1.0 - min(max(v, 0.0), 1.0))))
            out.append(f'<rect x="{_fmt(x0 + i * cw)}" y="{_fmt(y0 - (j + 1) * ch)}" width="{_fmt(cw)}" '
                       f'height="{_fmt(ch)}" fill="rgb({shade},{shade},255)" stroke="#fff"/>')
    for j, yv in enumerate(y_keys):
        out.append(f'<text x="{x0 - 6}" y="{_fmt(y0 - (j + 0.5) * ch + 4)}" font-size="11" '
                   f'text-anchor="end">{yv:g}</text>')
    out.extend(_axis_labels(xlabel, ylabel))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _header(title: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="#fff"/>',
        f'<text x="{WIDTH / 2}" y="22" font-size="15" text-anchor="middle">{escape(title)}</text>',
    ]


def _axis_labels(xlabel: str, ylabel: str) -> list:
    return [
        f'<text x="{(MARGIN["left"] + WIDTH - MARGIN["right"]) / 2}" y="{HEIGHT - 12}" font-size="13" '
        f'text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{HEIGHT / 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {HEIGHT / 2})">{escape(ylabel)}</text>',
    ]
