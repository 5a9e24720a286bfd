"""Least concave majorant of a planar point set, with the gap and width
diagnostics that drive root certification.

The majorant is the pointwise-smallest concave function dominating the
points; its graph is the upper concave hull.  Each affine piece is stored
as ``value(t) = intercept - neg_slope * t`` so that ``neg_slope`` increases
strictly from segment to segment.
"""
from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass

Point = tuple[float, float]

_REL_EPS = 1e-12


@dataclass(frozen=True)
class Segment:
    """One affine piece of a majorant on [x_lo, x_hi].

    ``neg_slope`` is the negative of the geometric slope; the majorant value
    is ``intercept - neg_slope * t`` and passes through both bounding
    vertices to within 1e-12 relative tolerance.
    """

    x_lo: float
    x_hi: float
    intercept: float
    neg_slope: float
    lo_vertex: int
    hi_vertex: int

    def value(self, t: float) -> float:
        return self.intercept - self.neg_slope * t

    def width(self) -> float:
        return self.x_hi - self.x_lo


@dataclass(frozen=True)
class Majorant:
    vertices: tuple[Point, ...]
    segments: tuple[Segment, ...]
    x_max: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertices": [[x, y] for x, y in self.vertices],
                "segments": [
                    {"x_lo": s.x_lo, "x_hi": s.x_hi, "S": s.intercept, "R": s.neg_slope}
                    for s in self.segments
                ],
            }
        )


def _upper_hull(pts: list[Point]) -> list[Point]:
    """Monotone-chain upper hull of x-sorted, x-distinct points."""
    hull: list[Point] = []
    for p in pts:
        while len(hull) >= 2:
            ox, oy = hull[-2]
            ax, ay = hull[-1]
            t1 = (ax - ox) * (p[1] - oy)
            t2 = (ay - oy) * (p[0] - ox)
            # cross >= 0 means the middle point is on or below the chord;
            # collinear middle points are dropped so no vertex survives them
            tol = _REL_EPS * max(abs(t1), abs(t2))
            if t1 - t2 >= -tol:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _segments_from_vertices(verts: list[Point]) -> tuple[Segment, ...]:
    segs = []
    for i in range(len(verts) - 1):
        (x0, y0), (x1, y1) = verts[i], verts[i + 1]
        neg_slope = (y0 - y1) / (x1 - x0)
        if not math.isfinite(neg_slope):
            raise ValueError("segment slope overflows double precision")
        segs.append(
            Segment(
                x_lo=x0,
                x_hi=x1,
                intercept=y0 + neg_slope * x0,
                neg_slope=neg_slope,
                lo_vertex=i,
                hi_vertex=i + 1,
            )
        )
    return tuple(segs)


def least_concave_majorant(
    points: list[Point], x_max: float, pin_zero_endpoints: bool
) -> Majorant:
    """Upper concave hull over [0, x_max].

    Points with y <= 0 are dropped before hulling.  With
    ``pin_zero_endpoints`` the corners (0, 0) and (x_max, 0) are appended,
    which realizes the positive-part height convention at the boundary.
    Ties in x keep only the larger y; collinear interior points never
    become vertices.
    """
    if not x_max > 0:
        raise ValueError("empty domain: x_max must be positive")
    best: dict[float, float] = {}
    for x, y in points:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError("points must have finite coordinates")
        if x < 0 or x > x_max:
            raise ValueError("point abscissa outside [0, x_max]")
        if y <= 0:
            continue
        if x not in best or y > best[x]:
            best[x] = y
    if pin_zero_endpoints:
        best.setdefault(0.0, 0.0)
        best.setdefault(x_max, 0.0)
    if len(best) == 0:
        raise ValueError("no points above zero and no pinned endpoints")
    raw = sorted(best.items())
    # abscissae closer than 1e-300 would overflow the chord slope; such gaps
    # are below any real data granularity, so collapse them (smaller x wins
    # the position, larger y the height)
    pts: list[Point] = []
    for x, y in raw:
        if pts and x - pts[-1][0] < 1e-300:
            if y > pts[-1][1]:
                pts[-1] = (pts[-1][0], y)
        else:
            pts.append((x, y))
    if len(pts) == 1:
        raise ValueError("a single point has no majorant segments")
    verts = _upper_hull(pts)
    return Majorant(
        vertices=tuple(verts),
        segments=_segments_from_vertices(verts),
        x_max=x_max,
    )


def evaluate(m: Majorant, t: float) -> float:
    """Majorant value at t; t must lie inside a covered interval."""
    segs = m.segments
    if t < segs[0].x_lo or t > segs[-1].x_hi:
        raise ValueError("t outside the majorant domain")
    idx = bisect_right([s.x_lo for s in segs], t) - 1
    if idx < 0:
        idx = 0
    seg = segs[idx]
    if t > seg.x_hi:  # windowed majorants may leave gaps between segments
        raise ValueError("t falls in a gap of a windowed majorant")
    return seg.value(t)


def segment_gap(
    m: Majorant,
    points: list[Point],
    i: int,
    baseline_xs: tuple[float, ...] = (),
) -> float:
    """Smallest vertical distance from segment i's extended line down to any
    competing point.

    Competitors are the input points at abscissae other than the segment's
    two bounding vertices (raw heights, no clipping), plus height-0 points
    at each abscissa in ``baseline_xs``.  Returns +inf when no competitor
    exists; 0 when a third point sits exactly on the line.
    """
    if i < 0 or i >= len(m.segments):
        raise ValueError("segment index out of range")
    seg = m.segments[i]
    lo_x = m.vertices[seg.lo_vertex][0]
    hi_x = m.vertices[seg.hi_vertex][0]
    s, r = seg.intercept, seg.neg_slope
    best = math.inf
    for x, y in points:
        if x == lo_x or x == hi_x or y == -math.inf:
            continue
        gap = s - r * x - y
        if gap < best:
            best = gap
    for x in baseline_xs:
        if x == lo_x or x == hi_x:
            continue
        gap = s - r * x
        if gap < best:
            best = gap
    return best


def _window_segment_range(m: Majorant, kappa: float) -> tuple[int, int]:
    """Segment index range [lo, hi) meeting [kappa*x_max, (1-kappa)*x_max].

    The left cut uses vertex <= kappa*x_max < next vertex; the right cut is
    symmetric, so a vertex exactly on a cut belongs to the outer side on the
    left and to the inner side on the right.
    """
    xs = [v[0] for v in m.vertices]
    left = kappa * m.x_max
    right = (1.0 - kappa) * m.x_max
    q_lo = 0
    for k in range(len(xs) - 1):
        if xs[k] <= left:
            q_lo = k
    q_hi = len(m.segments)
    for k in range(len(xs) - 1, 0, -1):
        if xs[k] >= right:
            q_hi = k
    return q_lo, q_hi


def diagnostics(
    m: Majorant, points: list[Point], kappa: float, mode: str = "window"
) -> tuple[float, float]:
    """(H, L) over the segments meeting the window [kappa, 1-kappa] * x_max.

    H is the minimal clipped gap: competitor heights are max(y, 0) and the
    flat baseline over the whole domain competes as well (its minimum
    against an affine line is attained at a domain endpoint).  L is the
    minimal segment width.  ``interior`` mode additionally drops the first
    and last selected segments.  An empty selection gives (+inf, +inf).
    """
    if not 0.0 < kappa < 0.5:
        raise ValueError("kappa must lie in (0, 1/2)")
    if mode not in ("window", "interior"):
        raise ValueError("mode must be 'window' or 'interior'")
    q_lo, q_hi = _window_segment_range(m, kappa)
    if mode == "interior":
        q_lo += 1
        q_hi -= 1
    if q_lo >= q_hi:
        return math.inf, math.inf
    clipped = [(x, max(y, 0.0)) for x, y in points if y != -math.inf]
    h_min = math.inf
    w_min = math.inf
    for i in range(q_lo, q_hi):
        seg = m.segments[i]
        gap = segment_gap(m, clipped, i)
        base = min(seg.value(0.0), seg.value(m.x_max))
        h_min = min(h_min, gap, base)
        w_min = min(w_min, seg.width())
    return h_min, w_min
