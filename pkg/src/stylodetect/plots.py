"""Static SVG plots written directly, no plotting backend.

Two artifact shapes: class-conditional feature histograms and ROC curves.
Output is plain text SVG, byte-identical across runs for identical input.
"""

from __future__ import annotations

import math
from pathlib import Path

_WIDTH, _HEIGHT = 640, 420
_MARGIN = 54
_COLORS = ("#3b6fb6", "#c25b4e", "#4e9a57", "#8a62a8", "#b08f3a")


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" font-family="sans-serif" '
        f'font-size="15" text-anchor="middle">{_escape(title)}</text>',
    ]


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def _axes(x_label: str, y_label: str) -> list[str]:
    x0, y0 = _MARGIN, _HEIGHT - _MARGIN
    x1, y1 = _WIDTH - _MARGIN, _MARGIN
    return [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2:.1f}" y="{_HEIGHT - 14}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">{_escape(x_label)}</text>',
        f'<text x="16" y="{(y0 + y1) / 2:.1f}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})">{_escape(y_label)}</text>',
    ]


def _scale(v: float, lo: float, hi: float, out_lo: float, out_hi: float) -> float:
    if hi == lo:
        return (out_lo + out_hi) / 2.0
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)


def svg_histogram(values_by_class: dict[str, list[float]], title: str,
                  path: str | Path, bins: int = 20) -> None:
    """Overlaid per-class histograms of one feature."""
    everything = [v for vs in values_by_class.values() for v in vs]
    if not everything:
        raise ValueError("histogram needs at least one value")
    lo, hi = min(everything), max(everything)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    counts = {}
    for name, vs in values_by_class.items():
        c = [0] * bins
        for v in vs:
            i = min(int((v - lo) / (hi - lo) * bins), bins - 1)
            c[i] += 1
        counts[name] = c
    peak = max(max(c) for c in counts.values()) or 1

    parts = _header(title) + _axes("value", "count")
    x0, y0 = _MARGIN, _HEIGHT - _MARGIN
    x1, y1 = _WIDTH - _MARGIN, _MARGIN
    bar_w = (x1 - x0) / bins
    for ci, (name, c) in enumerate(sorted(counts.items())):
        color = _COLORS[ci % len(_COLORS)]
        for b, count in enumerate(c):
            if count == 0:
                continue
            h = _scale(count, 0, peak, 0, y0 - y1)
            parts.append(
                f'<rect x="{x0 + b * bar_w:.2f}" y="{y0 - h:.2f}" '
                f'width="{bar_w:.2f}" height="{h:.2f}" fill="{color}" '
                f'fill-opacity="0.45"/>')
        parts.append(
            f'<rect x="{x1 - 130}" y="{y1 + 8 + 18 * ci}" width="12" height="12" '
            f'fill="{color}" fill-opacity="0.45"/>')
        parts.append(
            f'<text x="{x1 - 112}" y="{y1 + 18 + 18 * ci}" font-family="sans-serif" '
            f'font-size="12">{_escape(name)}</text>')
    for tick, value in ((x0, lo), (x1, hi)):
        parts.append(
            f'<text x="{tick}" y="{y0 + 16}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{value:.3g}</text>')
    parts.append(f'<text x="{x0 - 6}" y="{y1 + 4}" font-family="sans-serif" '
                 f'font-size="11" text-anchor="end">{peak}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def svg_roc(curves: list[tuple[str, list[tuple[float, float]]]],
            title: str, path: str | Path) -> None:
    """ROC curves (one per labeled series) with the chance diagonal."""
    parts = _header(title) + _axes("false positive rate", "true positive rate")
    x0, y0 = _MARGIN, _HEIGHT - _MARGIN
    x1, y1 = _WIDTH - _MARGIN, _MARGIN
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" '
                 f'stroke="#999999" stroke-dasharray="4 4"/>')
    for ci, (label, points) in enumerate(curves):
        color = _COLORS[ci % len(_COLORS)]
        coords = " ".join(
            f"{_scale(fpr, 0, 1, x0, x1):.2f},{_scale(tpr, 0, 1, y0, y1):.2f}"
            for fpr, tpr in points)
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<rect x="{x1 - 150}" y="{y0 - 20 - 18 * ci}" width="12" height="12" '
            f'fill="{color}"/>')
        parts.append(
            f'<text x="{x1 - 132}" y="{y0 - 10 - 18 * ci}" font-family="sans-serif" '
            f'font-size="12">{_escape(label)}</text>')
    for tick, value in ((x0, "0"), (x1, "1")):
        parts.append(f'<text x="{tick}" y="{y0 + 16}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="middle">{value}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
