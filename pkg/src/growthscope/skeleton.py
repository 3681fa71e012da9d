"""Wavelet skeleton: per-scale extrema in time, chained across scales."""
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .wavelet import ScaleGrid

CREST = "crest"
VALLEY = "valley"


@dataclass(frozen=True)
class SkeletonPoint:
    time: float
    scale: float
    rho: float
    kind: str


@dataclass(frozen=True)
class SkeletonLine:
    points: tuple
    kind: str

    @property
    def scales(self):
        return [p.scale for p in self.points]


@dataclass(frozen=True)
class SkeletonSet:
    lines: tuple
    source_grid: ScaleGrid

    @property
    def points(self):
        return [p for line in self.lines for p in line.points]

    def to_json(self):
        doc = [{"kind": line.kind,
                "points": [{"t": p.time, "s": p.scale, "rho": p.rho} for p in line.points]}
               for line in self.lines]
        return json.dumps(doc, indent=1)

    def write(self, path):
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


TIE_RTOL = 1e-12


def _row_extrema(row):
    """(index, kind) of strict extrema; a flat top or bottom counts once, at its middle.

    Values closer than TIE_RTOL * max|row| count as equal, so rounding noise
    on a constant row does not create extrema.
    """
    out = []
    n = len(row)
    tol = TIE_RTOL * float(np.max(np.abs(row))) if n else 0.0
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and abs(row[j + 1] - row[i]) <= tol:
            j += 1
        if j >= n - 1:
            break
        left, right, v = row[i - 1], row[j + 1], row[i]
        mid = (i + j) // 2
        if v > left + tol and v > right + tol:
            kind = CREST
        elif v < left - tol and v < right - tol:
            kind = VALLEY
        else:
            kind = None
        if kind is not None:
            out.append((mid, kind))
        i = j + 1
    return out


def extract_extrema(field, scale):
    """Strict local extrema in time of one coefficient row.

    Only the coi-valid stretch of the row is searched, and its two end points
    never qualify since they lack a valid neighbour.
    """
    i = field.grid.index(scale)
    s = float(field.grid.scales[i])
    valid = np.flatnonzero(field.coi[i])
    if valid.size < 3:
        return []
    a, b = int(valid[0]), int(valid[-1])
    row = field.coeffs[i]
    return [SkeletonPoint(float(field.times[a + k]), s, float(row[a + k]), kind)
            for k, kind in _row_extrema(row[a:b + 1])]


def link_lines(per_scale_extrema, grid, time_step):
    """Chain extrema upward through the grid.

    ``per_scale_extrema`` is one list of points per grid scale, ascending.  A
    point continues a line from the next smaller scale when it is the greedy
    nearest-in-time partner of the same kind and within
    ``max(time_step, 0.5 * scale)`` of it.
    """
    finished = []
    open_lines = []  # (points list, kind) ending at the previous scale
    for k, points in enumerate(per_scale_extrema):
        points = sorted(points, key=lambda p: p.time)
        matched = {}
        used = set()
        if open_lines:
            tol = max(time_step, 0.5 * float(grid.scales[k - 1])) * (1 + 1e-12)
            pairs = []
            for a, (chain, kind) in enumerate(open_lines):
                tail = chain[-1]
                for b, p in enumerate(points):
                    d = abs(p.time - tail.time)
                    if p.kind == kind and d <= tol:
                        pairs.append((d, tail.time, p.time, a, b))
            pairs.sort()
            for _, _, _, a, b in pairs:
                if a in used or b in matched:
                    continue
                used.add(a)
                matched[b] = a
        next_open = []
        for a, (chain, kind) in enumerate(open_lines):
            if a not in used:
                finished.append((chain, kind))
        for b, p in enumerate(points):
            if b in matched:
                chain, kind = open_lines[matched[b]]
                next_open.append((chain + [p], kind))
            else:
                next_open.append(([p], p.kind))
        open_lines = next_open
    finished.extend(open_lines)
    finished.sort(key=lambda ck: (ck[0][0].scale, ck[0][0].time))
    lines = tuple(SkeletonLine(tuple(chain), kind) for chain, kind in finished)
    return SkeletonSet(lines, grid)


def build_skeleton(field):
    per_scale = [extract_extrema(field, s) for s in field.grid.scales]
    return link_lines(per_scale, field.grid, field.step)


def intercepts_at_scale(skeleton, s_star):
    """Time-ordered (t, rho, kind) where lines cross scale ``s_star``."""
    grid = skeleton.source_grid
    exact = float(grid.scales[grid.index(s_star)])
    hits = [(p.time, p.rho, p.kind)
            for line in skeleton.lines for p in line.points if p.scale == exact]
    hits.sort()
    return hits


def skeleton_samples(skeleton, scale):
    return np.array([rho for _, rho, _ in intercepts_at_scale(skeleton, scale)])
