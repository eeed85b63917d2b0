"""Standalone SVG figures: ROC overlay, importance bars and correlation heatmap.

Output is plain text built from fixed-precision numbers, so identical input
gives byte-identical files.
"""
from xml.sax.saxutils import escape

import numpy as np

from .exceptions import PlotDataError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
FONT = 'font-family="Helvetica, Arial, sans-serif"'


def _f(x):
    return f"{x:.2f}"


def _svg(width, height, body):
    head = ('<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n')
    return head + "\n".join(body) + "\n</svg>\n"


def _text(x, y, s, size=12, anchor="start", extra=""):
    return (f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}" {FONT}{extra}>'
            f"{escape(str(s))}</text>")


def roc_svg(curves, title="ROC curves"):
    """One polyline per ``(label, fpr, tpr, auc)`` curve plus the chance diagonal."""
    if not curves:
        raise PlotDataError("no ROC curves to plot")
    W, H, L, T, S = 640, 520, 70, 50, 400
    X = lambda v: L + S * v
    Y = lambda v: T + S * (1 - v)
    body = [_text(W / 2, 28, title, 16, "middle"),
            f'<rect x="{L}" y="{T}" width="{S}" height="{S}" fill="none" stroke="black"/>']
    for v in np.linspace(0, 1, 6):
        body.append(_text(X(v), T + S + 18, f"{v:.1f}", 11, "middle"))
        body.append(_text(L - 8, Y(v) + 4, f"{v:.1f}", 11, "end"))
    body.append(_text(X(0.5), T + S + 40, "False positive rate", 13, "middle"))
    body.append(_text(20, Y(0.5), "True positive rate", 13, "middle",
                      f' transform="rotate(-90 20 {_f(Y(0.5))})"'))
    body.append(f'<line class="diagonal" x1="{_f(X(0))}" y1="{_f(Y(0))}" x2="{_f(X(1))}" y2="{_f(Y(1))}" '
                'stroke="gray" stroke-dasharray="6,4"/>')
    for i, (label, fpr, tpr, area) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(X(a))},{_f(Y(b))}" for a, b in zip(fpr, tpr))
        body.append(f'<polyline class="roc" points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = T + 10 + 20 * i
        body.append(f'<line x1="{L + S + 12}" y1="{ly}" x2="{L + S + 32}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        body.append(_text(L + S + 36, ly + 4, f"{label} (AUC = {area:.3f})", 11))
    return _svg(W + 120, H, body)


def importance_svg(ranked, title="Feature importance"):
    """Horizontal bars for ``(feature, score)`` pairs, sorted by descending score."""
    if not ranked:
        raise PlotDataError("no importance scores to plot")
    ranked = sorted(ranked, key=lambda p: -p[1])
    n = len(ranked)
    L, T, BW, BH = 260, 50, 360, 18
    W, H = L + BW + 90, T + n * (BH + 6) + 30
    top = max(max(abs(s) for _, s in ranked), 1e-12)
    body = [_text(W / 2, 28, title, 16, "middle"),
            f'<line x1="{L}" y1="{T - 4}" x2="{L}" y2="{T + n * (BH + 6)}" stroke="black"/>']
    for i, (name, score) in enumerate(ranked):
        y = T + i * (BH + 6)
        w = BW * max(score, 0.0) / top
        body.append(f'<rect class="bar" x="{L}" y="{y}" width="{_f(w)}" height="{BH}" fill="{PALETTE[0]}"/>')
        body.append(_text(L - 6, y + BH - 4, name, 11, "end"))
        body.append(_text(L + w + 4, y + BH - 4, f"{score:.4f}", 10))
    return _svg(W, H, body)


def _blend(r):
    # blue (-1) through white (0) to red (+1)
    a = min(1.0, abs(r))
    base = (214, 39, 40) if r >= 0 else (31, 119, 180)
    c = [round(255 + (b - 255) * a) for b in base]
    return "#%02x%02x%02x" % tuple(c)


def correlation_svg(names, matrix, title="Pairwise correlation"):
    """Heatmap of a labelled correlation matrix with column names on both axes."""
    R = np.asarray(matrix, dtype=float)
    if not names or R.shape != (len(names), len(names)):
        raise PlotDataError("correlation matrix missing or mislabelled")
    n = len(names)
    C = max(12, min(28, 560 // n))
    L = T = 230
    W, H = L + n * C + 30, T + n * C + 30
    body = [_text(W / 2, 24, title, 16, "middle")]
    for i in range(n):
        for j in range(n):
            body.append(f'<rect class="cell" x="{L + j * C}" y="{T + i * C}" width="{C}" height="{C}" '
                        f'fill="{_blend(R[i, j])}"><title>{escape(names[i])} / {escape(names[j])}: '
                        f"{R[i, j]:.3f}</title></rect>")
    for k, name in enumerate(names):
        body.append(_text(L - 4, T + k * C + C * 0.7, name, 10, "end", ' class="row-label"'))
        x = L + k * C + C * 0.65
        body.append(_text(x, T - 4, name, 10, "start",
                          f' class="col-label" transform="rotate(-60 {_f(x)} {T - 4})"'))
    return _svg(W, H, body)


def write_svg(text, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
