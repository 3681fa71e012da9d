"""Static SVG figures written by hand so output bytes are reproducible.

Coordinates are printed with two decimals and nothing time- or
environment-dependent goes into the documents.
"""
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import WriteFailure
from .skeleton import CREST

# red (slow) -> green (centre) -> blue (fast)
PALETTE = ((-1.0, (165, 0, 38)), (-0.5, (244, 109, 67)), (-0.2, (254, 224, 139)),
           (0.0, (102, 189, 99)), (0.2, (171, 217, 233)), (0.5, (69, 117, 180)),
           (1.0, (49, 54, 149)))
COLOR_LEVELS = 50
SERIES_COLORS = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
                 "#a6761d", "#666666", "#1f78b4", "#b2df8a", "#fb9a99")
ANNOTATION_SCALES = (0.25, 0.5, 1.5, 3.0)

WIDTH, HEIGHT = 900, 520
MARGIN = dict(left=70, right=80, top=30, bottom=50)


def _f(v):
    return f"{v:.2f}"


class Svg:
    def __init__(self, width=WIDTH, height=HEIGHT):
        self.width, self.height = width, height
        self.parts = []

    def add(self, s):
        self.parts.append(s)

    def rect(self, x, y, w, h, fill, cls=None, opacity=None, stroke=None):
        attrs = f'x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" fill="{fill}"'
        if opacity is not None:
            attrs += f' fill-opacity="{opacity}"'
        if stroke:
            attrs += f' stroke="{stroke}"'
        if cls:
            attrs += f' class="{cls}"'
        self.add(f"<rect {attrs}/>")

    def line(self, x0, y0, x1, y1, stroke="#000", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y1)}" '
                 f'stroke="{stroke}" stroke-width="{width}"{d}/>')

    def polyline(self, xs, ys, stroke="#000", width=1.5, dash=None, cls=None):
        if len(xs) == 0:
            return
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in zip(xs, ys))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        if cls:
            extra += f' class="{cls}"'
        self.add(f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
                 f'stroke-width="{width}"{extra}/>')

    def circle(self, x, y, r, fill):
        self.add(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{r}" fill="{fill}"/>')

    def text(self, x, y, s, size=11, anchor="start", rotate=None, fill="#000"):
        tr = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate is not None else ""
        self.add(f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{size}" '
                 f'text-anchor="{anchor}" fill="{fill}"{tr}>{escape(s)}</text>')

    def render(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        body = [head, f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>']
        return "\n".join(body + self.parts + ["</svg>"]) + "\n"


def nice_ticks(lo, hi, n=6):
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


class Axes:
    """Maps data to pixels inside a rectangle; y may be logarithmic."""

    def __init__(self, svg, x0, y0, w, h, xlim, ylim, ylog=False):
        self.svg, self.x0, self.y0, self.w, self.h = svg, x0, y0, w, h
        self.xlim, self.ylim, self.ylog = xlim, ylim, ylog

    def _ty(self, v):
        return math.log(v) if self.ylog else v

    def px(self, x):
        a, b = self.xlim
        return self.x0 + (np.asarray(x, dtype=float) - a) / (b - a) * self.w

    def py(self, y):
        a, b = (self._ty(v) for v in self.ylim)
        y = np.log(np.asarray(y, dtype=float)) if self.ylog else np.asarray(y, dtype=float)
        return self.y0 + self.h - (y - a) / (b - a) * self.h

    def frame(self, xlabel="", ylabel="", yticks=None, yfmt="{:g}", xfmt="{:g}"):
        s = self.svg
        s.add(f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_f(self.w)}" '
              f'height="{_f(self.h)}" fill="none" stroke="#000"/>')
        for t in nice_ticks(*self.xlim):
            x = float(self.px(t))
            s.line(x, self.y0 + self.h, x, self.y0 + self.h + 4)
            s.text(x, self.y0 + self.h + 17, xfmt.format(t), size=10, anchor="middle")
        if yticks is None:
            yticks = nice_ticks(*self.ylim)
        for t in yticks:
            y = float(self.py(t))
            s.line(self.x0 - 4, y, self.x0, y)
            s.text(self.x0 - 7, y + 3, yfmt.format(t), size=10, anchor="end")
        if xlabel:
            s.text(self.x0 + self.w / 2, self.y0 + self.h + 36, xlabel, anchor="middle")
        if ylabel:
            s.text(self.x0 - 50, self.y0 + self.h / 2, ylabel, anchor="middle", rotate=-90)


def diverging_color(u):
    """Hex colour for u in [-1, 1] on the red-green-blue palette."""
    u = min(1.0, max(-1.0, float(u)))
    for (a, ca), (b, cb) in zip(PALETTE, PALETTE[1:]):
        if u <= b:
            w = (u - a) / (b - a)
            rgb = [round(x + w * (y - x)) for x, y in zip(ca, cb)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*PALETTE[-1][1])


MIN_SPREAD = 1e-3


def color_scale(field, center):
    """(centre, half-range) for the heatmap: +-3 std of coi-valid coefficients.

    The half-range never drops below MIN_SPREAD, so a flat field stays one colour
    instead of stretching rounding noise across the palette.
    """
    valid = field.coeffs[field.coi]
    spread = 3.0 * float(np.std(valid)) if valid.size else 0.0
    return center, max(spread, MIN_SPREAD)


def _quantize(v, center, spread):
    if spread <= 0:
        return 0.0
    u = max(-1.0, min(1.0, (v - center) / spread))
    return round(u * COLOR_LEVELS) / COLOR_LEVELS


def _edges(values, log=False):
    v = np.log(values) if log else np.asarray(values, dtype=float)
    if len(v) == 1:
        d = 0.5 if not log else 0.1
        e = np.array([v[0] - d, v[0] + d])
    else:
        mid = 0.5 * (v[1:] + v[:-1])
        e = np.concatenate([[v[0] - (mid[0] - v[0])], mid, [v[-1] + (v[-1] - mid[-1])]])
    return np.exp(e) if log else e


def scalogram_svg(field, log_series=None, trend=None, center=None):
    svg = Svg()
    m = MARGIN
    times, scales = field.times, field.grid.scales
    te, se = _edges(times), _edges(scales, log=True)
    ax = Axes(svg, m["left"], m["top"], WIDTH - m["left"] - m["right"] - 40,
              HEIGHT - m["top"] - m["bottom"], (te[0], te[-1]), (se[0], se[-1]), ylog=True)
    if center is None:
        if trend is not None:
            center = trend.rho_lt
        elif field.coi.any():
            center = float(np.mean(field.coeffs[field.coi]))
        else:
            center = 0.0
    center, spread = color_scale(field, center)
    xs = ax.px(te)
    ys = ax.py(se)
    for i in range(len(scales)):
        y_top, y_bot = float(ys[i + 1]), float(ys[i])
        row = [(_quantize(v, center, spread), bool(c)) for v, c in zip(field.coeffs[i], field.coi[i])]
        j = 0
        while j < len(row):
            k = j
            while k + 1 < len(row) and row[k + 1] == row[j]:
                k += 1
            u, inside = row[j]
            svg.rect(float(xs[j]), y_top, float(xs[k + 1] - xs[j]), y_bot - y_top,
                     diverging_color(u), cls="cell coi" if inside else "cell edge",
                     opacity=None if inside else "0.35")
            j = k + 1
    ax.frame(xlabel="time (years)", ylabel="scale s (years)",
             yticks=[s for s in (0.25, 0.5, 1, 2, 4, 8, 16, 32) if se[0] <= s <= se[-1]])
    if log_series is not None:
        lo, hi = float(np.min(log_series.values)), float(np.max(log_series.values))
        pad = 0.05 * (hi - lo or 1.0)
        right = Axes(svg, ax.x0, ax.y0, ax.w, ax.h, ax.xlim, (lo - pad, hi + pad))
        svg.polyline(right.px(log_series.times), right.py(log_series.values),
                     stroke="#111111", width=1.6, cls="series")
        if trend is not None:
            tt = np.array([log_series.times[0], log_series.times[-1]])
            svg.polyline(right.px(tt), right.py(trend.predict(tt)), stroke="#111111",
                         width=1.2, dash="6,4", cls="trend")
        for t in nice_ticks(lo - pad, hi + pad, 5):
            y = float(right.py(t))
            svg.line(ax.x0 + ax.w, y, ax.x0 + ax.w + 4, y)
            svg.text(ax.x0 + ax.w + 7, y + 3, f"{t:g}", size=10)
        svg.text(ax.x0 + ax.w + 45, ax.y0 + ax.h / 2, "ln(GDP per capita)", anchor="middle",
                 rotate=90)
    # colour bar
    bx = WIDTH - 30
    n = 2 * COLOR_LEVELS + 1
    hgt = ax.h / n
    for q in range(n):
        u = 1 - q / COLOR_LEVELS
        svg.rect(bx, ax.y0 + q * hgt, 12, hgt + 0.5, diverging_color(u), cls="bar")
    svg.text(bx + 6, ax.y0 - 8, f"{100 * (center + spread):.1f}%", size=9, anchor="middle")
    svg.text(bx + 6, ax.y0 + ax.h + 14, f"{100 * (center - spread):.1f}%", size=9,
             anchor="middle")
    return svg.render()


def skeleton_svg(skeleton, time_range, annotate=ANNOTATION_SCALES):
    svg = Svg()
    m = MARGIN
    scales = skeleton.source_grid.scales
    se = _edges(scales, log=True)
    ax = Axes(svg, m["left"], m["top"], WIDTH - m["left"] - m["right"],
              HEIGHT - m["top"] - m["bottom"], tuple(time_range), (se[0], se[-1]), ylog=True)
    ax.frame(xlabel="time (years)", ylabel="scale s (years)",
             yticks=[s for s in (0.25, 0.5, 1, 2, 4, 8, 16, 32) if se[0] <= s <= se[-1]])
    marks = [s for s in annotate if s in skeleton.source_grid]
    for line in skeleton.lines:
        color = "#2c7bb6" if line.kind == CREST else "#d7191c"
        xs = ax.px([p.time for p in line.points])
        ys = ax.py([p.scale for p in line.points])
        if len(line.points) == 1:
            svg.circle(float(xs[0]), float(ys[0]), 1.2, color)
        else:
            svg.polyline(xs, ys, stroke=color, width=1.2, cls=f"line {line.kind}")
        for p in line.points:
            if any(p.scale == float(s) for s in marks):
                svg.text(float(ax.px(p.time)) + 2, float(ax.py(p.scale)) - 2,
                         f"{100 * p.rho:.1f}", size=7, fill=color)
    return svg.render()


def densities_svg(full, skeleton=()):
    """Full-field pdfs in the main panel, skeleton pdfs in an inset."""
    svg = Svg()
    m = MARGIN
    ax_w, ax_h = WIDTH - m["left"] - 30, HEIGHT - m["top"] - m["bottom"]
    scales = sorted({d.scale for d in full} | {d.scale for d in skeleton})
    colors = {s: SERIES_COLORS[i % len(SERIES_COLORS)] for i, s in enumerate(scales)}

    def panel(ax_x, ax_y, w, h, dens, label):
        if not dens:
            return
        xlo = min(float(d.grid[0]) for d in dens)
        xhi = max(float(d.grid[-1]) for d in dens)
        yhi = max(float(d.pdf.max()) for d in dens) * 1.05
        ax = Axes(svg, ax_x, ax_y, w, h, (xlo, xhi), (0.0, yhi))
        svg.rect(ax_x, ax_y, w, h, "#ffffff")
        ax.frame(xlabel=label, ylabel="pdf", xfmt="{:.2f}")
        for d in dens:
            svg.polyline(ax.px(d.grid), ax.py(d.pdf), stroke=colors[d.scale], width=1.3,
                         cls="pdf")

    panel(m["left"], m["top"], ax_w, ax_h, list(full), "annualized growth rate (1/years)")
    panel(m["left"] + ax_w * 0.62, m["top"] + 10, ax_w * 0.35, ax_h * 0.38, list(skeleton),
          "skeleton")
    for i, s in enumerate(scales):
        y = m["top"] + 16 + 15 * i
        svg.line(m["left"] + 10, y - 4, m["left"] + 30, y - 4, stroke=colors[s], width=2)
        svg.text(m["left"] + 35, y, f"s = {s:g} yr", size=10)
    return svg.render()


def synthetic_svg(actual, synthetics):
    svg = Svg()
    m = MARGIN
    vals = [actual.values] + [sy.values for sy in synthetics]
    lo = min(float(np.min(v)) for v in vals)
    hi = max(float(np.max(v)) for v in vals)
    ax = Axes(svg, m["left"], m["top"], WIDTH - m["left"] - m["right"],
              HEIGHT - m["top"] - m["bottom"], (float(actual.times[0]), float(actual.times[-1])),
              (lo / 1.1, hi * 1.1), ylog=True)
    decades = [10.0 ** k for k in range(int(math.floor(math.log10(lo / 1.1))),
                                        int(math.ceil(math.log10(hi * 1.1))) + 1)]
    ticks = [d * f for d in decades for f in (1, 2, 5) if lo / 1.1 <= d * f <= hi * 1.1]
    ax.frame(xlabel="time (years)", ylabel="real GDP per capita", yticks=ticks)
    svg.polyline(ax.px(actual.times), ax.py(actual.values), stroke="#000000", width=1.8,
                 cls="actual")
    for i, sy in enumerate(synthetics):
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        svg.polyline(ax.px(sy.times), ax.py(sy.values), stroke=color, width=1.3,
                     cls="synthetic")
        y = m["top"] + 16 + 15 * i
        svg.line(m["left"] + 10, y - 4, m["left"] + 30, y - 4, stroke=color, width=2)
        svg.text(m["left"] + 35, y, f"s* = {sy.s_star:g} yr", size=10)
    return svg.render()


def _write(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise WriteFailure(f"cannot write {path}: {exc}") from exc
    return Path(path)


def emit_svg_figures(artifacts, out_dir):
    """Write the four figures for a pipeline run; returns the paths written."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise WriteFailure(f"cannot create {out}: {exc}") from exc
    a = artifacts
    t = a.field.times
    paths = [
        _write(out / "scalogram.svg", scalogram_svg(a.field, a.log_series, a.trend)),
        _write(out / "skeleton.svg", skeleton_svg(a.skeleton, (float(t[0]), float(t[-1])))),
        _write(out / "densities.svg",
               densities_svg([d for d in a.densities if d.source == "full_field"],
                             [d for d in a.densities if d.source == "skeleton"])),
        _write(out / "synthetic.svg", synthetic_svg(a.series, [s for s, _ in a.synthetics])),
    ]
    return paths
