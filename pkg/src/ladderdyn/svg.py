"""Minimal SVG line plots (one polyline per series, no plotting dependency)."""

from __future__ import annotations

from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

DASHES = {"x1": None, "x2": "8,4", "x3": "8,3,2,3", "n1": None, "n3": "8,3,2,3"}
COLORS = ["#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#af601a"]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(start, hi + 0.5 * step, step)]


def render_svg(times: Sequence[float], series: Mapping[str, Sequence[float]], title: str = "",
               width: int = 640, height: int = 400) -> str:
    t = np.asarray(times, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    ymin = min(float(v.min()) for v in ys.values())
    ymax = max(float(v.max()) for v in ys.values())
    pad = 0.05 * (ymax - ymin or 1.0)
    ymin, ymax = ymin - pad, ymax + pad
    left, right, top, bottom = 56, 16, 32, 40
    pw, ph = width - left - right, height - top - bottom
    tmin, tmax = float(t[0]), float(t[-1]) if t[-1] > t[0] else float(t[0]) + 1.0

    def sx(v):
        return left + (v - tmin) / (tmax - tmin) * pw

    def sy(v):
        return top + (ymax - v) / (ymax - ymin) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">{escape(title)}</text>')
    for v in _ticks(tmin, tmax):
        out.append(f'<text x="{sx(v):.1f}" y="{top + ph + 16}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(ymin, ymax):
        out.append(f'<text x="{left - 6}" y="{sy(v) + 4:.1f}" text-anchor="end">{v:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 6}" text-anchor="middle">t</text>')
    for i, (name, v) in enumerate(ys.items()):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, v))
        dash = DASHES.get(name)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        color = COLORS[i % len(COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{pts}"/>')
        out.append(f'<text x="{left + 8 + 48 * i}" y="{top + 14}" fill="{color}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
