"""Static SVG line charts: error curves and ROC curves.

Charts are plain SVG with data as polyline coordinates; no scripts, fonts
or external assets.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

WIDTH, HEIGHT = 760, 480
MARGIN = {"top": 40, "right": 170, "bottom": 50, "left": 60}
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

Point = tuple[float, float]


def _segments(points: Iterable[Point]) -> list[list[Point]]:
    """Split a series at non-finite values."""
    out: list[list[Point]] = [[]]
    for x, y in points:
        if math.isfinite(x) and math.isfinite(y):
            out[-1].append((x, y))
        elif out[-1]:
            out.append([])
    return [seg for seg in out if seg]


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / count for i in range(count + 1)]


class _Frame:
    def __init__(self, x_range: tuple[float, float], y_range: tuple[float, float]) -> None:
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def x(self, value: float) -> float:
        return self.left + (value - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def y(self, value: float) -> float:
        return self.bottom - (value - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def line_chart(
    series: Mapping[str, Sequence[Point]],
    title: str,
    x_label: str,
    y_label: str,
    highlight: Sequence[str] = (),
    reference: tuple[float, str] | None = None,
    x_range: tuple[float, float] | None = None,
    y_range: tuple[float, float] | None = None,
    diagonal: bool = False,
) -> str:
    """One polyline per series; ``highlight`` keys are drawn bold and black."""
    finite = [(x, y) for pts in series.values() for seg in _segments(pts) for x, y in seg]
    if x_range is None:
        xs = [x for x, _ in finite] or [0.0, 1.0]
        x_range = (min(xs), max(xs))
    if y_range is None:
        ys = [y for _, y in finite] or [0.0, 1.0]
        if reference is not None:
            ys.append(reference[0])
        y_range = (min(0.0, min(ys)), max(ys) * 1.05 if max(ys) > 0 else 1.0)
    f = _Frame(x_range, y_range)

    svg = f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n'
    svg += f'  <rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
    svg += f'  <text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="16" font-weight="bold">{escape(title)}</text>\n'

    for v in _ticks(f.y0, f.y1):
        y = f.y(v)
        svg += f'  <line x1="{f.left}" y1="{y:.2f}" x2="{f.right}" y2="{y:.2f}" stroke="#e0e0e0"/>\n'
        svg += f'  <text x="{f.left - 6}" y="{y + 4:.2f}" text-anchor="end" font-size="11" fill="#555">{v:.3g}</text>\n'
    for v in _ticks(f.x0, f.x1):
        x = f.x(v)
        svg += f'  <text x="{x:.2f}" y="{f.bottom + 18}" text-anchor="middle" font-size="11" fill="#555">{v:.3g}</text>\n'
    svg += f'  <line x1="{f.left}" y1="{f.bottom}" x2="{f.right}" y2="{f.bottom}" stroke="#333"/>\n'
    svg += f'  <line x1="{f.left}" y1="{f.top}" x2="{f.left}" y2="{f.bottom}" stroke="#333"/>\n'
    svg += f'  <text x="{(f.left + f.right) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" font-size="13">{escape(x_label)}</text>\n'
    svg += (
        f'  <text x="16" y="{(f.top + f.bottom) / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {(f.top + f.bottom) / 2:.1f})">{escape(y_label)}</text>\n'
    )

    if diagonal:
        svg += (
            f'  <line x1="{f.x(f.x0):.2f}" y1="{f.y(f.y0):.2f}" x2="{f.x(f.x1):.2f}" y2="{f.y(f.y1):.2f}" '
            'stroke="#999" stroke-dasharray="4 4"/>\n'
        )
    if reference is not None:
        value, label = reference
        y = f.y(value)
        svg += f'  <line x1="{f.left}" y1="{y:.2f}" x2="{f.right}" y2="{y:.2f}" stroke="red" stroke-width="1.5"/>\n'
        svg += f'  <text x="{f.right - 4}" y="{y - 5:.2f}" text-anchor="end" font-size="12" fill="red">{escape(label)}</text>\n'

    plain = [k for k in series if k not in highlight]
    bold = [k for k in series if k in highlight]
    for i, name in enumerate(plain + bold):
        is_bold = name in highlight
        colour = "black" if is_bold else PALETTE[i % len(PALETTE)]
        width = 3 if is_bold else 1.2
        svg += f'  <g stroke={quoteattr(colour)} stroke-width="{width}" fill="none">\n'
        svg += f'    <title>{escape(name)}</title>\n'
        for seg in _segments(series[name]):
            coords = " ".join(f"{f.x(x):.2f},{f.y(y):.2f}" for x, y in seg)
            svg += f'    <polyline points="{coords}"/>\n'
        svg += '  </g>\n'
        legend_y = f.top + 14 * i
        svg += f'  <line x1="{f.right + 10}" y1="{legend_y}" x2="{f.right + 28}" y2="{legend_y}" stroke={quoteattr(colour)} stroke-width="{width}"/>\n'
        svg += f'  <text x="{f.right + 32}" y="{legend_y + 4}" font-size="10">{escape(name)}</text>\n'

    svg += '</svg>\n'
    return svg


def error_curve_svg(series: Mapping[str, Sequence[Point]], aggregate_key: str = "AGG") -> str:
    return line_chart(
        series,
        title="L2 error against sample size",
        x_label="N",
        y_label="error",
        highlight=(aggregate_key,),
        reference=(math.pi, "3.14"),
    )


def roc_svg(curves: Mapping[str, Sequence[Point]], title: str, aggregate_key: str = "AGG") -> str:
    return line_chart(
        curves,
        title=title,
        x_label="1 - specificity",
        y_label="sensitivity",
        highlight=(aggregate_key,),
        x_range=(0.0, 1.0),
        y_range=(0.0, 1.0),
        diagonal=True,
    )


def write_svg(svg: str, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(svg, encoding="utf-8")
    return path
