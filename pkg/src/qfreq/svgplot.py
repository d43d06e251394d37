"""Minimal static SVG line plots, written without a plotting backend."""

from __future__ import annotations

import numpy as np

WIDTH, HEIGHT = 480, 360
MARGIN = 56


def _ticks(lo, hi, count=5):
    return np.linspace(lo, hi, count)


def line_plot_svg(x, y, title="", xlabel="", ylabel="", fit=None) -> str:
    """SVG with a data polyline, markers, optional fitted line ``(slope, intercept)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y)
    x, y = x[ok], y[ok]
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def px(v):
        return MARGIN + (v - x0) / (x1 - x0) * pw

    def py(v):
        return HEIGHT - MARGIN - (v - y0) / (y1 - y0) * ph

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
             f'viewBox="0 0 {WIDTH} {HEIGHT}">',
             '<rect width="100%" height="100%" fill="white"/>',
             f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
             f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
             f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>']
    for t in _ticks(x0, x1):
        parts.append(f'<text x="{px(t):.2f}" y="{HEIGHT - MARGIN + 16}" font-size="10" '
                     f'text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        parts.append(f'<text x="{MARGIN - 6}" y="{py(t) + 3:.2f}" font-size="10" '
                     f'text-anchor="end">{t:.3g}</text>')
    if fit is not None:
        slope, icpt = fit
        parts.append(f'<line x1="{px(x0):.2f}" y1="{py(slope * x0 + icpt):.2f}" '
                     f'x2="{px(x1):.2f}" y2="{py(slope * x1 + icpt):.2f}" '
                     'stroke="#c03030" stroke-dasharray="4 3"/>')
    pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#2050a0" stroke-width="1.5"/>')
    for a, b in zip(x, y):
        parts.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.5" fill="#2050a0"/>')
    parts.append(f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" font-size="13" '
                 f'text-anchor="middle">{title}</text>')
    parts.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" font-size="11" '
                 f'text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="14" y="{HEIGHT / 2}" font-size="11" text-anchor="middle" '
                 f'transform="rotate(-90 14 {HEIGHT / 2})">{ylabel}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
