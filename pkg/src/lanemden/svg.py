"""Minimal static SVG charts: line plots for sweeps, heatmaps for landscapes."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=40, bottom=50)
MAX_CELLS = 160
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return list(np.linspace(lo, hi, n))


def _scale(lo, hi, a, b, log=False):
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
    span = hi - lo or 1.0

    def f(x):
        x = math.log10(x) if log else x
        return a + (x - lo) / span * (b - a)

    return f


def line_chart(series: dict, path, title: str = "", xlabel: str = "", ylabel: str = "", logy: bool = False,
               hlines: dict | None = None) -> None:
    """``series`` maps a label to ``(xs, ys)``; ``hlines`` maps a label to a y value."""
    hlines = hlines or {}
    xs = np.concatenate([np.asarray(v[0], float) for v in series.values()])
    ys = np.concatenate([np.asarray(v[1], float) for v in series.values()] + [np.asarray(list(hlines.values()), float)])
    ys = ys[np.isfinite(ys)]
    if logy:
        ys = ys[ys > 0]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if not logy:
        pad = 0.05 * (y1 - y0 or abs(y1) or 1.0)
        y0, y1 = y0 - pad, y1 + pad
    L, R, T, B = MARGIN["left"], WIDTH - MARGIN["right"], MARGIN["top"], HEIGHT - MARGIN["bottom"]
    sx = _scale(x0, x1, L, R)
    sy = _scale(y0, y1, B, T, log=logy)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{L}" y1="{B}" x2="{R}" y2="{B}" stroke="black"/>',
        f'<line x1="{L}" y1="{B}" x2="{L}" y2="{T}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<text x="{sx(t):.1f}" y="{B + 16}" text-anchor="middle">{_fmt(t)}</text>')
    yt = [10**e for e in np.linspace(math.log10(y0), math.log10(y1), 5)] if logy else _ticks(y0, y1)
    for t in yt:
        out.append(f'<text x="{L - 6}" y="{sy(t) + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{(L + R) / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{(T + B) / 2}" text-anchor="middle" transform="rotate(-90 16 {(T + B) / 2})">{escape(ylabel)}</text>'
    )
    for k, (label, yv) in enumerate(hlines.items()):
        y = sy(yv)
        out.append(f'<line x1="{L}" y1="{y:.1f}" x2="{R}" y2="{y:.1f}" stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{R - 4}" y="{y - 4:.1f}" text-anchor="end" fill="gray">{escape(label)}</text>')
    for k, (label, (xv, yv)) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        pts = [(sx(x), sy(y)) for x, y in zip(xv, yv) if np.isfinite(y) and (y > 0 or not logy)]
        poly = " ".join(f"{a:.1f},{b:.1f}" for a, b in pts)
        out.append(f'<polyline points="{poly}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if len(pts) <= 40:
            out.extend(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="3" fill="{color}"/>' for a, b in pts)
        out.append(f'<text x="{L + 10}" y="{T + 14 + 16 * k}" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def _color(t: float) -> str:
    # white -> dark blue
    t = min(max(t, 0.0), 1.0)
    r = int(255 * (1 - t) + 8 * t)
    g = int(255 * (1 - t) + 48 * t)
    b = int(255 * (1 - t) + 107 * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(values2d: np.ndarray, path, title: str = "", mark: tuple | None = None) -> None:
    """Heatmap of a 2-D array indexed ``[i, j]`` (i along x); NaN cells are left blank."""
    a = np.asarray(values2d, float)
    step = max(1, math.ceil(max(a.shape) / MAX_CELLS))
    if step > 1:
        if mark is not None:
            mark = (mark[0] // step, mark[1] // step)
        a = a[::step, ::step]
    nx, ny = a.shape
    finite = a[np.isfinite(a)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo or 1.0
    size = min((WIDTH - 100) / nx, (HEIGHT - 80) / ny)
    x0, y0 = 50, 40
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for i in range(nx):
        for j in range(ny):
            v = a[i, j]
            if not np.isfinite(v):
                continue
            x = x0 + i * size
            y = y0 + (ny - 1 - j) * size
            out.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{size + 0.05:.2f}" height="{size + 0.05:.2f}" fill="{_color((v - lo) / span)}"/>'
            )
    if mark is not None:
        i, j = mark
        out.append(
            f'<circle cx="{x0 + (i + 0.5) * size:.1f}" cy="{y0 + (ny - j - 0.5) * size:.1f}" r="4" fill="none" stroke="red" stroke-width="2"/>'
        )
    out.append(f'<text x="{x0}" y="{HEIGHT - 10}">min {_fmt(lo)}  max {_fmt(hi)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
