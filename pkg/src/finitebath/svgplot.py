"""Minimal log-log line plots written as standalone SVG."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#7f7f7f", "#17becf")


@dataclass
class Series:
    label: str
    xs: Sequence[float]
    ys: Sequence[float]
    dashed: bool = False


@dataclass
class LogLogPlot:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    width: int = 640
    height: int = 440

    def add(self, label: str, xs, ys, dashed: bool = False) -> None:
        pts = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y)]
        self.series.append(Series(label, [p[0] for p in pts], [p[1] for p in pts], dashed))

    def _bounds(self):
        xs = [x for s in self.series for x in s.xs]
        ys = [y for s in self.series for y in s.ys]
        if not xs:
            raise ValueError("nothing to plot")
        lx = (math.floor(math.log10(min(xs))), math.ceil(math.log10(max(xs))))
        ly = (math.floor(math.log10(min(ys))), math.ceil(math.log10(max(ys))))
        # A single decade still needs a nonzero span.
        return (lx[0], max(lx[1], lx[0] + 1)), (ly[0], max(ly[1], ly[0] + 1))

    def render(self) -> str:
        (x0, x1), (y0, y1) = self._bounds()
        left, right, top, bottom = 70, 170, 40, 50
        pw = self.width - left - right
        ph = self.height - top - bottom

        def px(x):
            return left + (math.log10(x) - x0) / (x1 - x0) * pw

        def py(y):
            return top + (y1 - math.log10(y)) / (y1 - y0) * ph

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'font-family="sans-serif" font-size="12">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>',
            f'<text x="{left + pw / 2}" y="22" text-anchor="middle" font-size="14">{escape(self.title)}</text>',
            f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        ]
        for k in range(x0, x1 + 1):
            x = left + (k - x0) / (x1 - x0) * pw
            out.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph}" stroke="#ddd"/>')
            out.append(f'<text x="{x:.2f}" y="{top + ph + 16}" text-anchor="middle">1e{k}</text>')
        for k in range(y0, y1 + 1):
            y = top + (y1 - k) / (y1 - y0) * ph
            out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#ddd"/>')
            out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">1e{k}</text>')
        out.append(f'<text x="{left + pw / 2}" y="{self.height - 10}" text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {top + ph / 2})">{escape(self.ylabel)}</text>')

        for k, s in enumerate(self.series):
            color = PALETTE[k % len(PALETTE)]
            dash = ' stroke-dasharray="6 4"' if s.dashed else ""
            if s.xs:
                pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.xs, s.ys))
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>')
            ly = top + 14 + 18 * k
            lx = left + pw + 12
            out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="1.8"{dash}/>')
            out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(s.label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"
