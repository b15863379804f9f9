"""Deterministic CSV writing and minimal self-contained SVG line plots."""
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np


def format_value(v):
    """17-significant-digit, locale-independent text for one CSV cell."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    x = float(v)
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".17g")


def write_csv(path, header, rows):
    """Write a header line and rows with LF line endings."""
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


_W, _H, _PAD = 640, 420, 60
_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _transform(values, log):
    v = np.asarray(values, dtype=float)
    if log:
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(v > 0.0, np.log10(np.where(v > 0.0, v, 1.0)), np.nan)
    return v


def write_svg(path, series, *, title="", xlabel="", ylabel="", logx=False, logy=False):
    """Line plot of ``series``, a list of (label, x, y); non-finite points are skipped."""
    prepared = [(label, _transform(x, logx), _transform(y, logy)) for label, x, y in series]
    xs = np.concatenate([x[np.isfinite(x) & np.isfinite(y)] for _, x, y in prepared] or [np.zeros(0)])
    ys = np.concatenate([y[np.isfinite(x) & np.isfinite(y)] for _, x, y in prepared] or [np.zeros(0)])
    if xs.size == 0:
        xs = ys = np.array([0.0, 1.0])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(x):
        return _PAD + (x - x0) / (x1 - x0) * (_W - 2 * _PAD)

    def py(y):
        return _H - _PAD - (y - y0) / (y1 - y0) * (_H - 2 * _PAD)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
           'fill="none" stroke="black"/>',
           f'<text x="{_W / 2}" y="{_PAD / 2}" text-anchor="middle" font-size="14">'
           f'{escape(title)}</text>',
           f'<text x="{_W / 2}" y="{_H - 15}" text-anchor="middle" font-size="12">'
           f'{escape(xlabel + (" (log10)" if logx else ""))}</text>',
           f'<text x="15" y="{_H / 2}" text-anchor="middle" font-size="12" '
           f'transform="rotate(-90 15 {_H / 2})">{escape(ylabel + (" (log10)" if logy else ""))}</text>']
    for value, anchor, xpos, ypos in ((x0, "start", _PAD, _H - _PAD + 15),
                                      (x1, "end", _W - _PAD, _H - _PAD + 15)):
        out.append(f'<text x="{xpos}" y="{ypos}" text-anchor="{anchor}" font-size="10">{value:.4g}</text>')
    for value, ypos in ((y0, _H - _PAD), (y1, _PAD + 10)):
        out.append(f'<text x="{_PAD - 4}" y="{ypos}" text-anchor="end" font-size="10">{value:.4g}</text>')
    for i, (label, x, y) in enumerate(prepared):
        colour = _COLOURS[i % len(_COLOURS)]
        ok = np.isfinite(x) & np.isfinite(y)
        # break the polyline wherever a point is missing
        segments, current = [], []
        for xi, yi, good in zip(x, y, ok):
            if good:
                current.append(f"{px(xi):.2f},{py(yi):.2f}")
            elif current:
                segments.append(current)
                current = []
        if current:
            segments.append(current)
        for seg in segments:
            if len(seg) == 1:
                cx, cy = seg[0].split(",")
                out.append(f'<circle cx="{cx}" cy="{cy}" r="1.5" fill="{colour}"/>')
            else:
                out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" '
                           f'points="{" ".join(seg)}"/>')
        out.append(f'<text x="{_W - _PAD - 4}" y="{_PAD + 16 + 14 * i}" text-anchor="end" '
                   f'font-size="11" fill="{colour}">{escape(label)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")

