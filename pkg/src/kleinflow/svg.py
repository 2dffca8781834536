"""Minimal SVG 1.1 line plots: axes, ticks and polylines, nothing else."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#117a65")


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    n = int(math.floor((hi - first) / step + 1e-9)) + 1
    return [first + i * step for i in range(n)]


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _tick_label(v: float) -> str:
    return f"{v:g}" if abs(v) >= 1e-9 else "0"


class Plot:
    """Plot with data coordinates ``(x, y)``; ``y`` grows upwards."""

    def __init__(self, xlim, ylim, width: int = 560, height: int = 560,
                 xlabel: str = "", ylabel: str = "", title: str = ""):
        self.xlim = tuple(map(float, xlim))
        self.ylim = tuple(map(float, ylim))
        self.width, self.height = width, height
        self.margin = (70, 20, 40, 55)  # left, right, top, bottom
        self.xlabel, self.ylabel, self.title = xlabel, ylabel, title
        self._items: list[str] = []

    def _px(self, x, y):
        l, r, t, b = self.margin
        x0, x1 = self.xlim
        y0, y1 = self.ylim
        px = l + (np.asarray(x) - x0) / (x1 - x0) * (self.width - l - r)
        py = self.height - b - (np.asarray(y) - y0) / (y1 - y0) * (self.height - t - b)
        return px, py

    def polyline(self, x, y, color: str = PALETTE[0], width: float = 1.0,
                 dash: str | None = None):
        """Add a curve; points outside the axes are split off, not drawn."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = ((x >= self.xlim[0]) & (x <= self.xlim[1])
                  & (y >= self.ylim[0]) & (y <= self.ylim[1]) & np.isfinite(x) & np.isfinite(y))
        px, py = self._px(x, y)
        style = f'fill="none" stroke="{color}" stroke-width="{_num(width)}"'
        if dash:
            style += f' stroke-dasharray="{dash}"'
        start = None
        for i in range(len(x) + 1):
            ok = i < len(x) and inside[i]
            if ok and start is None:
                start = i
            elif not ok and start is not None:
                if i - start >= 2:
                    pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(px[start:i], py[start:i]))
                    self._items.append(f'<polyline points="{pts}" {style}/>')
                start = None

    def vline(self, x: float, **kw):
        self.polyline([x, x], list(self.ylim), **kw)

    def hline(self, y: float, **kw):
        self.polyline(list(self.xlim), [y, y], **kw)

    def _axes(self) -> list[str]:
        l, r, t, b = self.margin
        w, h = self.width - l - r, self.height - t - b
        out = [f'<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="black"/>']
        for v in nice_ticks(*self.xlim):
            px, _ = self._px(v, self.ylim[0])
            out.append(f'<line x1="{_num(px)}" y1="{t + h}" x2="{_num(px)}" y2="{t + h + 5}" stroke="black"/>')
            out.append(f'<text x="{_num(px)}" y="{t + h + 18}" text-anchor="middle">{_tick_label(v)}</text>')
        for v in nice_ticks(*self.ylim):
            _, py = self._px(self.xlim[0], v)
            out.append(f'<line x1="{l - 5}" y1="{_num(py)}" x2="{l}" y2="{_num(py)}" stroke="black"/>')
            out.append(f'<text x="{l - 8}" y="{_num(py + 4)}" text-anchor="end">{_tick_label(v)}</text>')
        if self.xlabel:
            out.append(f'<text x="{l + w / 2:g}" y="{self.height - 10}" text-anchor="middle">'
                       f'{escape(self.xlabel)}</text>')
        if self.ylabel:
            cy = t + h / 2
            out.append(f'<text x="16" y="{cy:g}" text-anchor="middle" '
                       f'transform="rotate(-90 16 {cy:g})">{escape(self.ylabel)}</text>')
        if self.title:
            out.append(f'<text x="{l + w / 2:g}" y="{t - 14}" text-anchor="middle">'
                       f'{escape(self.title)}</text>')
        return out

    def render(self) -> str:
        head = ('<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
                '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
                '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}" '
                'font-family="sans-serif" font-size="12">\n')
        body = self._items + self._axes()
        return head + "\n".join(body) + "\n</svg>\n"

    def save(self, path, comment: str = "") -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = self.render()
        if comment:
            safe = comment.replace("--", "- -")
            text = text.replace("<svg ", f"<!-- {safe} -->\n<svg ", 1)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        return path
