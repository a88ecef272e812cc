"""Minimal standalone SVG line plots."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
DASHES = ("", "6,4", "2,3", "8,3,2,3", "")


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def line_plot(series, title="", xlabel="", ylabel="", equal_aspect=False, width=480, height=400):
    """Render ``[(label, x, y), ...]`` as an SVG document string."""
    margin = dict(left=60, right=20, top=36, bottom=46)
    xs = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    xlo, xhi = float(np.min(xs)), float(np.max(xs))
    ylo, yhi = float(np.min(ys)), float(np.max(ys))
    if xhi == xlo:
        xhi, xlo = xhi + 0.5, xlo - 0.5
    if yhi == ylo:
        yhi, ylo = yhi + 0.5, ylo - 0.5
    pad_x, pad_y = 0.05 * (xhi - xlo), 0.05 * (yhi - ylo)
    xlo, xhi, ylo, yhi = xlo - pad_x, xhi + pad_x, ylo - pad_y, yhi + pad_y
    pw = width - margin["left"] - margin["right"]
    ph = height - margin["top"] - margin["bottom"]
    if equal_aspect:
        span = max(xhi - xlo, (yhi - ylo) * pw / ph)
        cx = 0.5 * (xlo + xhi)
        xlo, xhi = cx - span / 2, cx + span / 2
        span_y = span * ph / pw
        cy = 0.5 * (ylo + yhi)
        ylo, yhi = cy - span_y / 2, cy + span_y / 2

    def px(x):
        return margin["left"] + (np.asarray(x) - xlo) / (xhi - xlo) * pw

    def py(y):
        return margin["top"] + (yhi - np.asarray(y)) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="{margin["left"]}" y="{margin["top"]}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {height / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for t in _ticks(xlo, xhi):
        x = px(t)
        out.append(f'<line x1="{x:.2f}" y1="{margin["top"] + ph}" x2="{x:.2f}" y2="{margin["top"] + ph + 4}" stroke="#333"/>')
        out.append(f'<text x="{x:.2f}" y="{margin["top"] + ph + 16}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(ylo, yhi):
        y = py(t)
        out.append(f'<line x1="{margin["left"] - 4}" y1="{y:.2f}" x2="{margin["left"]}" y2="{y:.2f}" stroke="#333"/>')
        out.append(f'<text x="{margin["left"] - 6}" y="{y + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    for i, (label, x, y) in enumerate(series):
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px(x), py(y)))
        dash = DASHES[i % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        color = COLORS[i % len(COLORS)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"{dash_attr}/>')
        ly = margin["top"] + 14 + 14 * i
        lx = margin["left"] + pw - 110
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="1.6"{dash_attr}/>')
        out.append(f'<text x="{lx + 24}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
