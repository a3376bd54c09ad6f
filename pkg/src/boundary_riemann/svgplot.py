"""Minimal SVG 1.1 line plots, written by hand so no plotting library is needed."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str
    dashed: bool = False


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    width: int = 640
    height: int = 420

    def add(self, x, y, label: str, dashed: bool = False) -> None:
        self.series.append(Series(np.asarray(x, dtype=float), np.asarray(y, dtype=float), label, dashed))


def _range(values: list[np.ndarray]) -> tuple[float, float]:
    finite = [v[np.isfinite(v)] for v in values]
    finite = [v for v in finite if v.size]
    if not finite:
        return 0.0, 1.0
    lo = min(float(v.min()) for v in finite)
    hi = max(float(v.max()) for v in finite)
    if hi - lo < 1e-300:
        pad = max(abs(lo), 1.0) * 1e-3
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    return np.linspace(lo, hi, count)


def render(fig: Figure) -> str:
    left, right, top, bottom = 70, 150, 36, 50
    pw = fig.width - left - right
    ph = fig.height - top - bottom
    x0, x1 = _range([s.x for s in fig.series])
    y0, y1 = _range([s.y for s in fig.series])

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fig.width}" height="{fig.height}" '
        f'viewBox="0 0 {fig.width} {fig.height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{fig.width}" height="{fig.height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(fig.title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 16}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{left - 4}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{Y + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{fig.height - 10}" text-anchor="middle">{escape(fig.xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(fig.ylabel)}</text>'
    )
    for j, s in enumerate(fig.series):
        color = PALETTE[j % len(PALETTE)]
        ok = np.isfinite(s.x) & np.isfinite(s.y)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(s.x[ok], s.y[ok]))
        dash = ' stroke-dasharray="5,3"' if s.dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        ly = top + 12 + 16 * j
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly + 4}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_csv(path, fig: Figure) -> None:
    """Plotted data in long form: series, x, y."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"series,{_csv_name(fig.xlabel)},{_csv_name(fig.ylabel)}\n")
        for s in fig.series:
            for a, b in zip(s.x, s.y):
                fh.write(f"{_csv_name(s.label)},{a:.17g},{b:.17g}\n")


def _csv_name(text: str) -> str:
    return text.replace(",", ";").replace("\n", " ")


def save(fig: Figure, svg_path, csv_path) -> None:
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(render(fig))
    write_csv(csv_path, fig)
