"""Two-panel SVG output for experiment results.

The kappa panel shows every successful trial as a triangle and each bound as a
line broken wherever the bound does not apply. The failure panel shows the
percentage of rank-deficient trials per grid point. Each SVG carries the
plotted data as JSON in a ``<metadata>`` element so plots can be checked
against the CSV they were drawn from.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .experiment import ExperimentResult
from .io import PlotStyle

MAX_TICKS = 8
MARGIN = {"left": 70, "right": 150, "top": 30, "bottom": 50}


class Axis:
    def __init__(self, lo: float, hi: float, r0: float, r1: float, scale: str = "linear"):
        if scale == "log" and lo <= 0:
            raise ValueError("log axis needs a positive domain")
        if hi <= lo:
            # degenerate domain: pad symmetrically so the point sits mid-axis
            if scale == "log":
                lo, hi = lo / 2.0, hi * 2.0
            else:
                pad = abs(lo) * 0.1 or 1.0
                lo, hi = lo - pad, hi + pad
        self.lo, self.hi, self.r0, self.r1, self.scale = lo, hi, r0, r1, scale

    def _t(self, v: float) -> float:
        return math.log10(v) if self.scale == "log" else v

    def __call__(self, v: float) -> float:
        a, b = self._t(self.lo), self._t(self.hi)
        return self.r0 + (self._t(v) - a) / (b - a) * (self.r1 - self.r0)

    def ticks(self) -> list[float]:
        return log_ticks(self.lo, self.hi) if self.scale == "log" else linear_ticks(self.lo, self.hi)


def linear_ticks(lo: float, hi: float, max_ticks: int = MAX_TICKS) -> list[float]:
    """Multiples of the smallest 1-2-5 step that gives at most ``max_ticks`` ticks."""
    span = hi - lo
    k = math.floor(math.log10(span / max_ticks)) if span > 0 else 0
    while True:
        for mant in (1, 2, 5):
            step = mant * 10.0**k
            first = math.ceil(lo / step - 1e-9)
            last = math.floor(hi / step + 1e-9)
            if last - first + 1 <= max_ticks:
                return [round(i * step, 12) for i in range(first, last + 1)]
        k += 1


def log_ticks(lo: float, hi: float, max_ticks: int = MAX_TICKS) -> list[float]:
    """Ticks at 1-2-5 mantissas per decade, thinned until at most ``max_ticks`` remain."""
    d0 = math.floor(math.log10(lo) + 1e-12)
    d1 = math.ceil(math.log10(hi) - 1e-12)

    def within(v):
        return lo * (1 - 1e-9) <= v <= hi * (1 + 1e-9)

    for mants in ((1, 2, 5), (1, 3), (1,)):
        ticks = [m * 10.0**d for d in range(d0, d1 + 1) for m in mants if within(m * 10.0**d)]
        if 2 <= len(ticks) <= max_ticks:
            return ticks
        if len(ticks) < 2 and mants == (1, 2, 5):
            return ticks
    stride = 2
    while True:
        ticks = [10.0**d for d in range(d0, d1 + 1, stride) if within(10.0**d)]
        if len(ticks) <= max_ticks:
            return ticks
        stride += 1


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:g}"


def _triangle(x: float, y: float, r: float) -> str:
    pts = [(x, y - r), (x - r * 0.866, y + r * 0.5), (x + r * 0.866, y + r * 0.5)]
    return " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)


def _frame(style: PlotStyle, xa: Axis, ya: Axis, xlabel: str, ylabel: str, title: str) -> list[str]:
    W, H = style.width, style.height
    left, top = MARGIN["left"], MARGIN["top"]
    right, bottom = W - MARGIN["right"], H - MARGIN["bottom"]
    out = [
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{_fmt((left + right) / 2)}" y="18" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
        f'fill="none" stroke="black"/>',
    ]
    for t in xa.ticks():
        x = xa(t)
        out.append(f'<line x1="{_fmt(x)}" y1="{bottom}" x2="{_fmt(x)}" y2="{bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{bottom + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{_label(t)}</text>')
    for t in ya.ticks():
        y = ya(t)
        out.append(f'<line x1="{left - 5}" y1="{_fmt(y)}" x2="{left}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{_label(t)}</text>')
    out.append(f'<text x="{_fmt((left + right) / 2)}" y="{H - 10}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{_fmt((top + bottom) / 2)}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 16 {_fmt((top + bottom) / 2)})">{escape(ylabel)}</text>')
    out.append(f'<clipPath id="plot-area"><rect x="{left}" y="{top}" '
               f'width="{right - left}" height="{bottom - top}"/></clipPath>')
    return out


def _document(style: PlotStyle, body: list[str], data: dict) -> str:
    meta = json.dumps(data, sort_keys=True, separators=(",", ":"))
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}">\n'
        f'<metadata id="plot-data"><![CDATA[{meta}]]></metadata>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def _legend(style: PlotStyle, items: list[tuple[str, str, str]]) -> list[str]:
    x = style.width - MARGIN["right"] + 12
    y = MARGIN["top"] + 10
    out = []
    for kind, color, label in items:
        if kind == "marker":
            out.append(f'<polygon points="{_triangle(x + 10, y - 4, style.marker_size)}" fill="{color}"/>')
        else:
            out.append(f'<line x1="{x}" y1="{y - 4}" x2="{x + 20}" y2="{y - 4}" stroke="{color}" '
                       f'stroke-width="{style.line_width}"{_dash_attr(kind)}/>')
        out.append(f'<text x="{x + 26}" y="{y}" font-family="sans-serif" font-size="11">{escape(label)}</text>')
        y += 18
    return out


def _dash_attr(dash: str) -> str:
    return f' stroke-dasharray="{dash}"' if dash not in ("", "line") else ""


def _x_axis(result: ExperimentResult, style: PlotStyle) -> Axis:
    xs = [float(v) for v in result.grid] or [1.0]
    scale = style.x_scale
    if scale == "log" and min(xs) <= 0:
        scale = "linear"
    return Axis(min(xs), max(xs), MARGIN["left"], style.width - MARGIN["right"], scale)


def _sweep_label(result: ExperimentResult) -> str:
    return "c (rows sampled)" if result.sweep == "c" else "coherence mu"


def kappa_svg(result: ExperimentResult, style: PlotStyle) -> str:
    """SVG text of the condition-number panel."""
    xa = _x_axis(result, style)
    cap = style.y_cap
    ya = Axis(1.0, cap, style.height - MARGIN["bottom"], MARGIN["top"], style.y_scale)
    body = _frame(style, xa, ya, _sweep_label(result), "kappa(SQ)", "Condition number of the sampled matrix")
    data = {"panel": "kappa", "sweep": result.sweep, "y_cap": cap, "markers": [], "bounds": {}}
    legend = []

    for s in result.samplers():
        color = style.sampler_colors.get(s.value, "black")
        legend.append(("marker", color, s.value.replace("_", " ")))
        body.append(f'<g class="trials" data-sampler="{s.value}" fill="{color}">')
        for t in result.trials_for(s):
            if t.failed:
                continue
            xv = float(result.grid[t.grid_index])
            clipped = t.kappa > cap
            yv = min(max(t.kappa, 1.0), cap)
            data["markers"].append([s.value, t.grid_index, t.trial_index, t.kappa, clipped])
            x, y = xa(xv), ya(yv)
            if clipped:
                # overflow glyph: arrow pointing off the top of the axis
                body.append(f'<path class="overflow" d="M{_fmt(x)},{_fmt(y + 8)} L{_fmt(x)},{_fmt(y)} '
                            f'M{_fmt(x - 3)},{_fmt(y + 4)} L{_fmt(x)},{_fmt(y)} L{_fmt(x + 3)},{_fmt(y + 4)}" '
                            f'stroke="{color}" fill="none"/>')
            else:
                body.append(f'<polygon points="{_triangle(x, y, style.marker_size)}"/>')
        body.append("</g>")

    for bid, curve in result.bound_curves.items():
        dash = style.bound_dashes.get(bid.value, "")
        legend.append((dash or "line", "black", f"bound {bid.value}"))
        segments, seg = [], []
        for gi, pt in enumerate(curve):
            if pt.applicable:
                seg.append((gi, pt.kappa_bound))
            elif seg:
                segments.append(seg)
                seg = []
        if seg:
            segments.append(seg)
        data["bounds"][bid.value] = [[[gi, k] for gi, k in sg] for sg in segments]
        body.append(f'<g class="bound" data-bound="{bid.value}" clip-path="url(#plot-area)">')
        for sg in segments:
            pts = [(xa(float(result.grid[gi])), ya(min(k, cap * 10))) for gi, k in sg]
            if len(pts) == 1:
                x, y = pts[0]
                body.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2" fill="black"/>')
            else:
                body.append('<polyline fill="none" stroke="black" stroke-width="'
                            f'{style.line_width}"{_dash_attr(dash)} points="'
                            + " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts) + '"/>')
        body.append("</g>")

    body += _legend(style, legend)
    return _document(style, body, data)


def failure_svg(result: ExperimentResult, style: PlotStyle) -> str:
    """SVG text of the failure-rate panel (percent of rank-deficient samples)."""
    xa = _x_axis(result, style)
    ya = Axis(0.0, 100.0, style.height - MARGIN["bottom"], MARGIN["top"], "linear")
    body = _frame(style, xa, ya, _sweep_label(result), "failure rate (%)",
                  "Numerically rank-deficient samples")
    data = {"panel": "failure", "sweep": result.sweep, "series": {}}
    legend = []
    aggs = result.aggregates()
    for s in result.samplers():
        color = style.sampler_colors.get(s.value, "black")
        legend.append(("marker", color, s.value.replace("_", " ")))
        rows = [a for a in aggs if a.sampler is s]
        data["series"][s.value] = [[a.grid_index, a.failures, a.runs] for a in rows]
        pts = [(xa(float(a.grid_value)), ya(100.0 * a.failure_rate)) for a in rows]
        body.append(f'<g class="failure" data-sampler="{s.value}">')
        if style.ci_display and rows:
            upper = [(xa(float(a.grid_value)), ya(100.0 * a.ci_high)) for a in rows]
            lower = [(xa(float(a.grid_value)), ya(100.0 * a.ci_low)) for a in reversed(rows)]
            body.append(f'<polygon class="ci" fill="{color}" fill-opacity="0.2" stroke="none" points="'
                        + " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in upper + lower) + '"/>')
        if len(pts) > 1:
            body.append(f'<polyline fill="none" stroke="{color}" stroke-width="{style.line_width}" points="'
                        + " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts) + '"/>')
        for x, y in pts:
            body.append(f'<polygon fill="{color}" points="{_triangle(x, y, style.marker_size)}"/>')
        body.append("</g>")
    body += _legend(style, legend)
    return _document(style, body, data)


def render_plots(result: ExperimentResult, style: PlotStyle | None, stem) -> tuple[Path, Path]:
    """Write ``<stem>_kappa.svg`` and ``<stem>_failure.svg``."""
    style = style or PlotStyle()
    stem = Path(stem)
    kp = stem.with_name(stem.name + "_kappa.svg")
    fp = stem.with_name(stem.name + "_failure.svg")
    kp.write_text(kappa_svg(result, style), encoding="utf-8")
    fp.write_text(failure_svg(result, style), encoding="utf-8")
    return kp, fp


def read_plot_data(svg_text: str) -> dict:
    """Extract the JSON data block embedded by this module."""
    start = svg_text.index("<![CDATA[") + len("<![CDATA[")
    end = svg_text.index("]]>", start)
    return json.loads(svg_text[start:end])
