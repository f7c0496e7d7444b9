"""Self-contained SVG line charts and heat maps, no plotting dependency."""

from __future__ import annotations

from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]
LOW_RGB = (255, 255, 255)
HIGH_RGB = (8, 48, 107)

WIDTH, HEIGHT = 720, 480
LEFT, RIGHT, TOP, BOTTOM = 80, 150, 50, 60


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def _header(title: str, width=WIDTH, height=HEIGHT) -> List[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="28" text-anchor="middle" font-size="18">{escape(title)}</text>',
    ]


def line_chart(
    series: Sequence[Tuple[str, Sequence[float], Sequence[float]]],
    title: str,
    x_label: str,
    y_label: str,
    log_y: bool = False,
) -> str:
    """Overlay of ``(label, xs, ys)`` polylines. ``log_y`` plots log10 of positive ys."""
    if not series:
        raise ValueError("line_chart needs at least one series")
    prepared = []
    for label, xs, ys in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if log_y:
            keep = ys > 0
            xs, ys = xs[keep], np.log10(ys[keep])
        prepared.append((label, xs, ys))
    all_x = np.concatenate([p[1] for p in prepared])
    all_y = np.concatenate([p[2] for p in prepared])
    if all_x.size == 0:
        raise ValueError("line_chart has no plottable points")
    x0, x1 = float(all_x.min()), float(all_x.max())
    y0, y1 = float(all_y.min()), float(all_y.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = _header(title)
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444444"/>')
    for xt in _ticks(x0, x1):
        out.append(f'<line x1="{_fmt(px(xt))}" y1="{TOP + ph}" x2="{_fmt(px(xt))}" y2="{TOP + ph + 5}" stroke="#444444"/>')
        out.append(f'<text x="{_fmt(px(xt))}" y="{TOP + ph + 20}" text-anchor="middle" font-size="11">{xt:.3g}</text>')
    for yt in _ticks(y0, y1):
        label = f"1e{yt:.1f}" if log_y else f"{yt:.3g}"
        out.append(f'<line x1="{LEFT - 5}" y1="{_fmt(py(yt))}" x2="{LEFT}" y2="{_fmt(py(yt))}" stroke="#444444"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_fmt(py(yt) + 4)}" text-anchor="end" font-size="11">{label}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{escape(x_label)}</text>')
    out.append(
        f'<text x="20" y="{TOP + ph / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 20 {TOP + ph / 2:.1f})">{escape(y_label + (" (log10)" if log_y else ""))}</text>'
    )
    for k, (label, xs, ys) in enumerate(prepared):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = TOP + 10 + 20 * k
        out.append(f'<line x1="{WIDTH - RIGHT + 15}" y1="{ly}" x2="{WIDTH - RIGHT + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 46}" y="{ly + 4}" font-size="12">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def intensity_color(v: float, lo: float, hi: float) -> str:
    frac = 0.0 if hi <= lo else min(1.0, max(0.0, (v - lo) / (hi - lo)))
    rgb = [round(a + (b - a) * frac) for a, b in zip(LOW_RGB, HIGH_RGB)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def heat_map(matrix, title: str, row_label: str, col_label: str) -> str:
    """Cells shaded from white (lowest) to dark blue (highest value).

    The scale spans ``[min(0, min), max(1, max)]`` so an identity matrix
    puts its diagonal at full intensity.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"heat_map needs a non-empty 2-D matrix, got shape {m.shape}")
    lo, hi = min(0.0, float(m.min())), max(1.0, float(m.max()))
    rows, cols = m.shape
    cell = min((WIDTH - LEFT - RIGHT) / cols, (HEIGHT - TOP - BOTTOM) / rows)
    out = _header(title)
    for i in range(rows):
        for j in range(cols):
            out.append(
                f'<rect x="{_fmt(LEFT + j * cell)}" y="{_fmt(TOP + i * cell)}" width="{_fmt(cell)}" '
                f'height="{_fmt(cell)}" fill="{intensity_color(m[i, j], lo, hi)}" '
                f'data-row="{i}" data-col="{j}" data-value="{m[i, j]:.6g}"/>'
            )
    for i in range(rows):
        out.append(f'<text x="{LEFT - 6}" y="{_fmt(TOP + (i + 0.5) * cell + 4)}" text-anchor="end" font-size="10">{i}</text>')
    for j in range(cols):
        out.append(f'<text x="{_fmt(LEFT + (j + 0.5) * cell)}" y="{_fmt(TOP + rows * cell + 14)}" text-anchor="middle" font-size="10">{j}</text>')
    out.append(f'<text x="{LEFT + cols * cell / 2:.1f}" y="{_fmt(TOP + rows * cell + 34)}" text-anchor="middle" font-size="13">{escape(col_label)}</text>')
    out.append(
        f'<text x="25" y="{TOP + rows * cell / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 25 {TOP + rows * cell / 2:.1f})">{escape(row_label)}</text>'
    )
    bar_x = LEFT + cols * cell + 30
    steps = 10
    for k in range(steps):
        v = hi - (hi - lo) * k / (steps - 1)
        y = TOP + k * (rows * cell / steps)
        out.append(f'<rect x="{_fmt(bar_x)}" y="{_fmt(y)}" width="18" height="{_fmt(rows * cell / steps)}" fill="{intensity_color(v, lo, hi)}"/>')
    out.append(f'<text x="{_fmt(bar_x + 24)}" y="{TOP + 10}" font-size="11">{hi:.3g}</text>')
    out.append(f'<text x="{_fmt(bar_x + 24)}" y="{_fmt(TOP + rows * cell)}" font-size="11">{lo:.3g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

