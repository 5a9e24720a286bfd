"""Simulation of the limiting Poisson process, its concave majorant, and the
limit objects built from that majorant.

The process has intensity alpha * v^-(alpha+1) du dv on [0,1] x (0, inf),
infinitely many atoms near v = 0, and (for alpha < 1) an almost-surely
finite-sided majorant.  Sampling truncates at a level v_min and certifies
the truncation through ``miss_mass``: the expected number of unseen atoms
that could still change the hull.  The refinement loop only ever samples
the region above the current hull, which keeps the atom count small even
when the certified level is ~1e-60.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .majorant import (
    Majorant,
    Point,
    _segments_from_vertices,
    _upper_hull,
    _window_segment_range,
)

_V_FLOOR = 1e-280  # below this, v^-alpha arithmetic leaves double range


@dataclass(frozen=True)
class PointProcessSample:
    """Truncated realization: all atoms with V >= v_min."""

    alpha: float
    us: np.ndarray
    vs: np.ndarray
    v_min: float
    marks: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.us.shape != self.vs.shape:
            raise ValueError("atom coordinate arrays must align")
        if self.vs.size and float(self.vs.min()) < self.v_min:
            raise ValueError("atom below the truncation level")
        if self.marks is not None and self.marks.shape[0] != self.us.shape[0]:
            raise ValueError("marks must align with atoms")

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(u), float(v)) for u, v in zip(self.us, self.vs)]

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": self.alpha,
                "v_min": self.v_min,
                "atoms": [[float(u), float(v)] for u, v in zip(self.us, self.vs)],
            }
        )


@dataclass(frozen=True)
class LimitMeasure:
    """Convex combination of uniform circle measures: (weight, log radius)."""

    components: tuple[tuple[float, float], ...]

    def total_weight(self) -> float:
        return sum(w for w, _ in self.components)


@dataclass(frozen=True)
class RealRootLimit:
    """Signed atoms of the limiting real-root process.

    Atoms are stored as (sign, log_radius) pairs; the nominal values are
    sign * e^log_radius, which ``signed_values`` materializes (overflowing
    to +-inf when |log_radius| > ~709, which is why the log form is kept).
    """

    atoms: tuple[tuple[int, float], ...]

    def signed_values(self) -> list[float]:
        return [s * math.exp(lr) for s, lr in self.atoms]


def sample_rho(alpha: float, v_min: float, rng: np.random.Generator) -> PointProcessSample:
    """All atoms above v_min: Poisson(v_min^-alpha) many, U uniform,
    V = v_min * U'^(-1/alpha)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not v_min > 0:
        raise ValueError("v_min must be positive")
    lam = v_min**-alpha
    if lam > 1e12:
        raise ValueError("truncation level too small: expected atom count > 1e12")
    n = int(rng.poisson(lam))
    us = rng.random(n)
    w = rng.random(n)
    w[w == 0.0] = 0.5  # probability-zero guard against an infinite V
    vs = v_min * w ** (-1.0 / alpha)
    return PointProcessSample(alpha=alpha, us=us, vs=vs, v_min=v_min)


def _truncated_pareto(lo: float, hi: float, alpha: float, w: float) -> float:
    # inverse CDF of V restricted to [lo, hi); hi = inf allowed
    lo_m = lo**-alpha
    hi_m = 0.0 if hi == math.inf else hi**-alpha
    return (lo_m - w * (lo_m - hi_m)) ** (-1.0 / alpha)


def _segment_miss(
    x0: float, y0: float, x1: float, y1: float, alpha: float, v_min: float
) -> float:
    """Mass of {(u,v): x0 <= u <= x1, line(u) < v < v_min} for the chord
    through (x0,y0)-(x1,y1).

    Works off the exact endpoint heights: recovering them from slope and
    intercept leaves rounding residues that get multiplied by v_min^-alpha,
    which is astronomically large once the certified level is deep.
    """
    width = x1 - x0
    y_lo = min(y0, y1)
    y_hi = max(y0, y1)
    if y_lo >= v_min:
        return 0.0
    c = 1.0 - alpha
    if y_hi == y_lo:  # flat chord below the level
        if y_lo == 0.0:
            return math.inf
        return width * (y_lo**-alpha - v_min**-alpha)
    r_abs = (y_hi - y_lo) / width
    if y_hi <= v_min:  # fully below: wedge spans the whole chord
        integral = (y_hi**c - y_lo**c) / (r_abs * c)
        return integral - width * v_min**-alpha
    w = (v_min - y_lo) / r_abs
    integral = (v_min**c - y_lo**c) / (r_abs * c)
    return integral - w * v_min**-alpha


def _hull_miss(verts: list[Point], alpha: float, v_min: float) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(verts, verts[1:]):
        total += _segment_miss(x0, y0, x1, y1, alpha, v_min)
    return total


def miss_mass(m: Majorant, alpha: float, v_min: float) -> float:
    """Expected number of unsampled atoms below v_min that would poke above
    the majorant; the truncation-bias certificate."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("miss_mass requires alpha in (0, 1); use the window mode above")
    if not v_min > 0:
        raise ValueError("v_min must be positive")
    segs = m.segments
    if segs[0].x_lo != 0.0 or segs[-1].x_hi != m.x_max or m.x_max != 1.0:
        raise ValueError("miss_mass needs a pinned majorant covering [0, 1]")
    return _hull_miss(list(m.vertices), alpha, v_min)


def _rehull(us: list[float], vs: list[float]) -> list[Point]:
    best = {0.0: 0.0, 1.0: 0.0}
    for u, v in zip(us, vs):
        if v > 0 and (u not in best or v > best[u]):
            best[u] = v
    return _upper_hull(sorted(best.items()))


def _sample_band_above(
    verts: list[Point],
    v_lo: float,
    v_hi: float,
    alpha: float,
    rng: np.random.Generator,
    us: list[float],
    vs: list[float],
) -> None:
    """Poisson-sample the region {v_lo <= v < v_hi, v > hull(u)} and append
    the atoms.  Exact: the region splits per hull segment into a part where
    the hull itself is inside the band (u-density proportional to
    hull(u)^-alpha, sampled by inverse CDF plus one acceptance step) and a
    part fully below it (uniform u)."""
    c = 1.0 - alpha
    inv_c = 1.0 / c
    hi_m = v_hi**-alpha
    lo_m = v_lo**-alpha
    for (x0, y0), (x1, y1) in zip(verts, verts[1:]):
        width = x1 - x0
        y_lo = min(y0, y1)
        y_hi = max(y0, y1)
        if y_lo >= v_hi:
            continue
        if y_hi == y_lo:  # flat chord; x-position carries no information
            if y_lo < v_lo:
                n = int(rng.poisson(max(width * (lo_m - hi_m), 0.0)))
                for _ in range(n):
                    us.append(x0 + width * rng.random())
                    vs.append(_truncated_pareto(v_lo, v_hi, alpha, rng.random()))
            else:
                n = int(rng.poisson(max(width * (y_lo**-alpha - hi_m), 0.0)))
                for _ in range(n):
                    us.append(x0 + width * rng.random())
                    vs.append(_truncated_pareto(y_lo, v_hi, alpha, rng.random()))
            continue

        # distances are measured from the chord's low end, where the small
        # heights live; this keeps every width a small-quantity difference
        r_abs = (y_hi - y_lo) / width
        low_at_right = y1 < y0

        def to_abscissa(t: float) -> float:
            return x1 - t if low_at_right else x0 + t

        w_lo = min(max((v_lo - y_lo) / r_abs, 0.0), width)
        w_hi = min(max((v_hi - y_lo) / r_abs, 0.0), width)

        # part (c): chord below the whole band; v independent of u
        if w_lo > 0.0:
            n = int(rng.poisson(max(w_lo * (lo_m - hi_m), 0.0)))
            for _ in range(n):
                us.append(to_abscissa(w_lo * rng.random()))
                vs.append(_truncated_pareto(v_lo, v_hi, alpha, rng.random()))

        # part (b): chord inside the band; atoms live between chord and v_hi
        if w_hi > w_lo:
            lv_a = v_lo if w_lo > 0.0 else y_lo
            lv_b = v_hi if w_hi < width else y_hi
            g_tot = (lv_b**c - lv_a**c) * inv_c / r_abs
            n = int(rng.poisson(max(g_tot - (w_hi - w_lo) * hi_m, 0.0)))
            for _ in range(n):
                while True:
                    g_t = rng.random() * g_tot
                    line = (lv_a**c + g_t * r_abs * c) ** inv_c
                    if rng.random() < (line / v_hi) ** alpha:
                        continue
                    us.append(to_abscissa(w_lo + (line - lv_a) / r_abs))
                    vs.append(_truncated_pareto(line, v_hi, alpha, rng.random()))
                    break


def _adaptive_majorant(
    alpha: float, rng: np.random.Generator, miss_tol: float
) -> tuple[list[float], list[float], float, list[Point], float]:
    """Shared refinement loop: returns (us, vs, v_min, hull vertices, cert)."""
    us: list[float] = []
    vs: list[float] = []
    v = 1.0
    n0 = int(rng.poisson(1.0))
    for _ in range(n0):
        us.append(rng.random())
        vs.append(_truncated_pareto(1.0, math.inf, alpha, rng.random()))
    while not us:
        v_new = 0.5 * v
        n = int(rng.poisson(v_new**-alpha - v**-alpha))
        for _ in range(n):
            us.append(rng.random())
            vs.append(_truncated_pareto(v_new, v, alpha, rng.random()))
        v = v_new
        if v < _V_FLOOR:
            raise ValueError("no atoms found above the double-precision floor")

    verts = _rehull(us, vs)
    cert = _hull_miss(verts, alpha, v)
    guard = 0
    while cert > miss_tol:
        # walk the certified level down; the miss mass follows an exact
        # v^(1-alpha) power law once the level is below the hull interior,
        # so the model step usually lands in one or two probes
        v_new = v
        m_new = cert
        while m_new > miss_tol:
            v_new *= (0.5 * miss_tol / m_new) ** (1.0 / (1.0 - alpha))
            if v_new < _V_FLOOR:
                raise ValueError(
                    "miss tolerance unreachable in double precision for this alpha"
                )
            m_new = _hull_miss(verts, alpha, v_new)
        _sample_band_above(verts, v_new, v, alpha, rng, us, vs)
        v = v_new
        verts = _rehull(us, vs)
        cert = _hull_miss(verts, alpha, v)
        guard += 1
        if guard > 100:
            raise RuntimeError("majorant refinement failed to converge")
    return us, vs, v, verts, cert


def sample_majorant(
    alpha: float, rng: np.random.Generator, miss_tol: float = 1e-6
) -> tuple[Majorant, int]:
    """One certified realization of the limit majorant and its segment count.

    The returned hull differs from the untruncated process's hull with
    probability at most miss_tol (the expected number of influential unseen
    atoms is below miss_tol at return).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("sample_majorant requires alpha in (0, 1)")
    if not 0.0 < miss_tol <= 0.01:
        raise ValueError("miss_tol must lie in (0, 0.01]")
    _, _, _, verts, _ = _adaptive_majorant(alpha, rng, miss_tol)
    m = Majorant(vertices=tuple(verts), segments=_segments_from_vertices(verts), x_max=1.0)
    return m, len(m.segments)


def sample_process_majorant(
    alpha: float, rng: np.random.Generator, miss_tol: float = 1e-6
) -> tuple[PointProcessSample, Majorant, int]:
    """sample_majorant plus the underlying truncated atom sample."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("sample_majorant requires alpha in (0, 1)")
    if not 0.0 < miss_tol <= 0.01:
        raise ValueError("miss_tol must lie in (0, 0.01]")
    us, vs, v, verts, _ = _adaptive_majorant(alpha, rng, miss_tol)
    sample = PointProcessSample(
        alpha=alpha, us=np.asarray(us), vs=np.asarray(vs), v_min=v
    )
    m = Majorant(vertices=tuple(verts), segments=_segments_from_vertices(verts), x_max=1.0)
    return sample, m, len(m.segments)


def windowed_majorant(
    alpha: float, kappa: float, rng: np.random.Generator
) -> Majorant:
    """Hull restricted to the segments meeting [kappa, 1-kappa].

    For alpha >= 1 the full hull has infinitely many segments piling up at
    the endpoints, so only a window can be simulated.  Refinement is a
    sentinel heuristic, not a certificate: the level halves until every
    hull vertex inside the window clears 2 * v_min, with caps on the
    halving count and the expected atom budget.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0.0 < kappa < 0.5:
        raise ValueError("kappa must lie in (0, 1/2)")
    us: list[float] = []
    vs: list[float] = []
    v = 1.0
    n0 = int(rng.poisson(1.0))
    for _ in range(n0):
        us.append(rng.random())
        vs.append(_truncated_pareto(1.0, math.inf, alpha, rng.random()))
    verts = _rehull(us, vs)
    for _ in range(60):
        unstable = not us or any(
            kappa <= x <= 1.0 - kappa and y < 2.0 * v for x, y in verts[1:-1]
        )
        if not unstable:
            break
        v_new = 0.5 * v
        lam = v_new**-alpha - v**-alpha
        if lam > 2e6:
            break  # atom budget; accept the current hull
        n = int(rng.poisson(lam))
        for _ in range(n):
            us.append(rng.random())
            vs.append(_truncated_pareto(v_new, v, alpha, rng.random()))
        v = v_new
        verts = _rehull(us, vs)

    m = Majorant(vertices=tuple(verts), segments=_segments_from_vertices(verts), x_max=1.0)
    q_lo, q_hi = _window_segment_range(m, kappa)
    win_verts = verts[q_lo : q_hi + 1]
    return Majorant(
        vertices=tuple(win_verts),
        segments=_segments_from_vertices(win_verts),
        x_max=1.0,
    )


def limit_measure(m: Majorant) -> LimitMeasure:
    """One (weight, log_radius) component per segment; weights cover the
    segment span (all of [0,1] for a pinned majorant)."""
    return LimitMeasure(
        components=tuple((s.width(), s.neg_slope) for s in m.segments)
    )


def real_root_limit(
    m: Majorant, c: float, p: float, parity: str, rng: np.random.Generator
) -> RealRootLimit:
    """Signed real-root atoms generated by the sign marks at hull vertices.

    sigma is +1 with probability p at the two boundary vertices and c at
    interior ones; pi is +1 at the left boundary, parity-determined at the
    right, and fair at interior vertices.  Segment k emits a positive atom
    at log-radius R_k when sigma flips across it and a negative atom when
    sigma*pi flips.
    """
    if not 0.0 <= c <= 1.0 or not 0.0 <= p <= 1.0:
        raise ValueError("sign probabilities must lie in [0, 1]")
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    segs = m.segments
    if segs[0].x_lo != 0.0 or segs[-1].x_hi != m.x_max:
        raise ValueError("real_root_limit needs a pinned majorant")
    d = len(segs)
    sigma = [0] * (d + 1)
    pi = [0] * (d + 1)
    for k in range(d + 1):
        prob = p if k in (0, d) else c
        sigma[k] = 1 if rng.random() < prob else -1
        pi[k] = 1 if rng.random() < 0.5 else -1
    pi[0] = 1
    pi[d] = 1 if parity == "even" else -1
    atoms: list[tuple[int, float]] = []
    for k in range(d):
        r_k = segs[k].neg_slope
        if sigma[k] != sigma[k + 1]:
            atoms.append((1, r_k))
        if sigma[k] * pi[k] != sigma[k + 1] * pi[k + 1]:
            atoms.append((-1, r_k))
    return RealRootLimit(atoms=tuple(atoms))
