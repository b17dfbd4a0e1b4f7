"""Tiny deterministic SVG line charts (axes, polylines, legend); no dependencies.

The emitted markup is a plain-text artifact: identical inputs give identical
bytes, which the CLI's determinism contract relies on.
"""

import math

import numpy as np

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 72, 20, 40, 50
_MAX_POINTS = 2000


def _finite_range(arrays):
    lo, hi = math.inf, -math.inf
    for a in arrays:
        a = np.asarray(a, dtype=float)
        a = a[np.isfinite(a)]
        if a.size:
            lo = min(lo, float(np.min(a)))
            hi = max(hi, float(np.max(a)))
    if not math.isfinite(lo):
        lo, hi = 0.0, 1.0
    if hi - lo < 1e-300:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.1
        lo, hi = lo - pad, hi + pad
    return lo, hi


def _fmt_tick(v):
    out = f"{v:.4g}"
    return "0" if out == "-0" else out


def line_chart(series, title="", xlabel="", ylabel=""):
    """Render [(name, x, y), ...] as one SVG chart string."""
    xs = [s[1] for s in series]
    ys = [s[2] for s in series]
    x_lo, x_hi = _finite_range(xs)
    y_lo, y_hi = _finite_range(ys)
    plot_w = _W - _ML - _MR
    plot_h = _H - _MT - _MB

    def sx(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return _H - _MB - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<text x="{_W / 2:.1f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15" fill="#111111">{title}</text>',
    ]
    # axes box and ticks
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#444444" stroke-width="1"/>'
    )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        px = sx(xv)
        py = sy(yv)
        parts.append(
            f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" y2="{_H - _MB + 5}" '
            f'stroke="#444444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{_H - _MB + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11" fill="#111111">{_fmt_tick(xv)}</text>'
        )
        parts.append(
            f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" y2="{py:.2f}" '
            f'stroke="#444444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="#111111">{_fmt_tick(yv)}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{_ML + plot_w / 2:.1f}" y="{_H - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" fill="#111111">{xlabel}</text>'
        )
    if ylabel:
        parts.append(
            f'<text x="16" y="{_MT + plot_h / 2:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" fill="#111111" '
            f'transform="rotate(-90 16 {_MT + plot_h / 2:.1f})">{ylabel}</text>'
        )
    # polylines
    for i, (name, x, y) in enumerate(series):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        x, y = x[keep], y[keep]
        if x.size > _MAX_POINTS:
            stride = int(math.ceil(x.size / _MAX_POINTS))
            x, y = x[::stride], y[::stride]
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
    # legend
    for i, (name, _, _) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        ly = _MT + 14 + 16 * i
        parts.append(
            f'<line x1="{_W - _MR - 120}" y1="{ly}" x2="{_W - _MR - 96}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_W - _MR - 90}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="11" fill="#111111">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
