"""Minimal deterministic SVG line-chart emitter.

No plotting dependency: output is a standalone SVG 1.1 text document whose
bytes depend only on the input data, which makes emitted figures directly
diffable in regression tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class Curve:
    label: str
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 1:
            raise DimensionError(
                f"curve '{self.label}' needs matching 1-D x and y arrays"
            )
        for name, arr in (("x", x), ("y", y)):
            bad = ~np.isfinite(arr)
            if np.any(bad):
                idx = int(np.argmax(bad))
                raise DimensionError(
                    f"curve '{self.label}' has non-finite {name} at index {idx}"
                )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class AxesSpec:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    width: int = 640
    height: int = 420
    legend: bool = True


_MARGIN_LEFT = 62
_MARGIN_RIGHT = 16
_MARGIN_TOP = 34
_MARGIN_BOTTOM = 46


def _nice_ticks(lo: float, hi: float, target: int = 5):
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(v: float) -> str:
    return format(v, ".6g")


def emit_svg(curves, axes: AxesSpec = AxesSpec()) -> str:
    """Render labeled curves as one chart; returns the SVG document text."""
    if not curves:
        raise DimensionError("need at least one curve")
    curves = list(curves)
    body = ['<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{axes.width}" height="{axes.height}" '
            f'viewBox="0 0 {axes.width} {axes.height}">']
    body.append(f'<rect width="{axes.width}" height="{axes.height}" fill="white"/>')
    body.extend(_panel_elements(curves, axes, x_offset=0, y_offset=0))
    body.append("</svg>")
    return "\n".join(body) + "\n"


def emit_svg_panels(panels, width: int = 640, panel_height: int = 300) -> str:
    """Stack (curves, AxesSpec) panels vertically in one SVG document."""
    if not panels:
        raise DimensionError("need at least one panel")
    total_height = panel_height * len(panels)
    body = ['<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width}" height="{total_height}" '
            f'viewBox="0 0 {width} {total_height}">']
    body.append(f'<rect width="{width}" height="{total_height}" fill="white"/>')
    for i, (curves, axes) in enumerate(panels):
        sized = AxesSpec(
            title=axes.title, xlabel=axes.xlabel, ylabel=axes.ylabel,
            width=width, height=panel_height, legend=axes.legend,
        )
        body.extend(_panel_elements(list(curves), sized, 0, i * panel_height))
    body.append("</svg>")
    return "\n".join(body) + "\n"


def _panel_elements(curves, axes: AxesSpec, x_offset: int, y_offset: int):
    x_lo = min(float(c.x.min()) for c in curves)
    x_hi = max(float(c.x.max()) for c in curves)
    y_lo = min(float(c.y.min()) for c in curves)
    y_hi = max(float(c.y.max()) for c in curves)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = axes.width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = axes.height - _MARGIN_TOP - _MARGIN_BOTTOM
    px0 = x_offset + _MARGIN_LEFT
    py0 = y_offset + _MARGIN_TOP

    def sx(v):
        return px0 + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return py0 + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts = []
    parts.append(
        f'<rect x="{px0}" y="{py0}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        x = sx(t)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(py0 + plot_h)}" '
            f'x2="{_fmt(x)}" y2="{_fmt(py0 + plot_h + 5)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(py0 + plot_h + 18)}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        y = sy(t)
        parts.append(
            f'<line x1="{_fmt(px0 - 5)}" y1="{_fmt(y)}" '
            f'x2="{_fmt(px0)}" y2="{_fmt(y)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px0 - 8)}" y="{_fmt(y + 4)}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{_fmt(t)}</text>'
        )
    if axes.title:
        parts.append(
            f'<text x="{_fmt(px0 + plot_w / 2)}" y="{_fmt(py0 - 12)}" '
            'font-size="14" text-anchor="middle" font-family="sans-serif">'
            f"{axes.title}</text>"
        )
    if axes.xlabel:
        parts.append(
            f'<text x="{_fmt(px0 + plot_w / 2)}" y="{_fmt(py0 + plot_h + 36)}" '
            'font-size="12" text-anchor="middle" font-family="sans-serif">'
            f"{axes.xlabel}</text>"
        )
    if axes.ylabel:
        cx = x_offset + 16
        cy = py0 + plot_h / 2
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{axes.ylabel}</text>'
        )
    for i, curve in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(
            f"{_fmt(sx(xv))},{_fmt(sy(yv))}" for xv, yv in zip(curve.x, curve.y)
        )
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}"/>'
        )
    if axes.legend:
        lx = px0 + plot_w - 130
        ly = py0 + 10
        for i, curve in enumerate(curves):
            color = PALETTE[i % len(PALETTE)]
            y = ly + 16 * i
            parts.append(
                f'<line x1="{_fmt(lx)}" y1="{_fmt(y)}" x2="{_fmt(lx + 22)}" '
                f'y2="{_fmt(y)}" stroke="{color}" stroke-width="2"/>'
            )
            parts.append(
                f'<text x="{_fmt(lx + 28)}" y="{_fmt(y + 4)}" font-size="11" '
                f'font-family="sans-serif">{curve.label}</text>'
            )
    return parts
