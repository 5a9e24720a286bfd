"""Root certification and computation for polynomials with log-domain
coefficients.

The polynomials of interest have coefficient magnitudes spanning thousands
of orders, far outside native floating point.  Everything here therefore
works on (log-modulus, phase) pairs: the certificate machinery places roots
in rings and sectors given by the coefficient hull, a winding-number oracle
verifies those boxes by the argument principle, and a small-degree direct
solver covers the representable window for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeffs import LogComplex, canonical_phase
from .majorant import Majorant, Segment, _upper_hull, least_concave_majorant

_POS_FLOOR = 1e-250  # smallest ring/sector half-width we report
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RootBox:
    """Ring-and-sector region certified to contain exactly one root.

    The ring is log|z| in [log_r_center - delta, log_r_center + delta] and
    the sector is arg z within zeta of phase_center.
    """

    segment_index: int
    m: int
    log_r_center: float
    delta: float
    phase_center: float
    zeta: float


@dataclass(frozen=True)
class RootPrediction:
    boxes: tuple[RootBox, ...]
    segment_counts: tuple[tuple[int, int], ...]
    real_flags: tuple[tuple[int, int, int], ...]
    certified: tuple[bool, ...]
    majorant: Majorant


def _term_sum(
    lm: np.ndarray, ph: np.ndarray, log_r: float, theta: float
) -> tuple[float, complex]:
    """Shifted value of sum exp(lm_j + i ph_j) z^j: returns (M, s) with the
    polynomial value equal to e^M * s.  Phases that land exactly on 0 or
    +-pi use exact unit values so that sign cancellations are exact."""
    j = np.arange(lm.size)
    term_lm = lm + j * log_r
    term_ph = ph + j * theta
    m_shift = float(term_lm.max())
    if m_shift == -math.inf:
        return -math.inf, 0j
    mag = np.exp(term_lm - m_shift)
    pv = term_ph - _TWO_PI * np.round(term_ph / _TWO_PI)
    re = np.cos(pv)
    im = np.sin(pv)
    on_axis = np.abs(pv) == math.pi
    re[on_axis] = -1.0
    im[on_axis] = 0.0
    im[pv == 0.0] = 0.0
    total = complex(np.sum(mag * re), np.sum(mag * im))
    return m_shift, total


def eval_log_scaled(coeffs: list[LogComplex], log_z: LogComplex) -> LogComplex:
    """Value of sum xi_j z^j at z = exp(log_z), as a LogComplex.

    Terms are shifted by their maximum log-modulus and summed natively, so
    the result is exact up to rounding of the shifted sum no matter how far
    outside double range the coefficients or the value live.
    """
    if math.isnan(log_z.log_mod) or log_z.log_mod == math.inf:
        raise ValueError("evaluation point must have log-modulus < +inf")
    if log_z.log_mod == -math.inf:
        return coeffs[0]
    lm = np.array([c.log_mod for c in coeffs])
    ph = np.array([c.phase for c in coeffs])
    m_shift, total = _term_sum(lm, ph, log_z.log_mod, log_z.phase)
    if total == 0:
        return LogComplex(-math.inf, 0.0)
    return LogComplex(
        m_shift + math.log(abs(total)), canonical_phase(math.atan2(total.imag, total.real))
    )


def check_main_lemma(
    coeffs: list[LogComplex], segment: Segment, h: float
) -> tuple[float, float] | None:
    """Certificate parameters (delta, zeta) for one hull segment, or None.

    A segment with endpoint abscissae k < l and clearance h over every
    other coefficient point certifies when some delta > 0 satisfies
    n e^(delta n - h) < 1 - e^(-delta).  delta is the smallest root of
    n e^(delta n - h) = (1 - e^(-delta))/2 (bisection in log space, floored
    at 1e-250) and zeta is the geometric mean of its admissible interval
    (2n e^(2 delta n - h), pi / (l - k)).
    """
    n = len(coeffs) - 1
    if n < 1:
        raise ValueError("polynomial must have degree >= 1")
    if not h > 0.0:
        return None
    span = segment.x_hi - segment.x_lo
    if span < 1.0:
        raise ValueError("segment endpoints must be distinct integers")

    def g(log_d: float) -> float:
        d = math.exp(log_d)
        return math.log(2.0 * n) + d * n - h - math.log(-math.expm1(-d))

    log_floor = math.log(_POS_FLOOR)
    log_star = math.log(math.log1p(1.0 / n))  # minimizer of the constraint
    if math.isfinite(h) and g(log_star) > 0.0:
        return None
    if not math.isfinite(h) or g(log_floor) <= 0.0:
        delta = _POS_FLOOR
    else:
        lo, hi = log_floor, log_star
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        delta = math.exp(hi)
    log_zeta_lo = math.log(2.0 * n) + 2.0 * delta * n - h
    log_zeta_hi = math.log(math.pi / span)
    if not log_zeta_lo < log_zeta_hi:
        return None
    zeta = max(math.exp(0.5 * (log_zeta_lo + log_zeta_hi)), _POS_FLOOR)
    return delta, zeta


def _real_sign(c: LogComplex) -> int:
    return 1 if c.phase == 0.0 else -1


def predict_root_boxes(coeffs: list[LogComplex]) -> RootPrediction:
    """Certified root boxes from the coefficient hull.

    Builds the concave majorant of (k, log|xi_k|) clipped below zero and
    pinned at the ends; each hull segment predicts l - k roots on the ring
    at its slope.  The certifying line always passes through the raw
    endpoint log-moduli, which, when log|xi_0| or log|xi_n| is negative,
    tilts the first or last ring off the clipped hull slope toward the
    true pair-cancellation radius.
    """
    n = len(coeffs) - 1
    logs = [c.log_mod for c in coeffs]
    if all(lm == -math.inf for lm in logs):
        raise ValueError("all-zero polynomial")
    if n < 1 or logs[0] == -math.inf or logs[n] == -math.inf:
        raise ValueError("nonzero first and last coefficients required")
    pts = [(float(k), lm) for k, lm in enumerate(logs) if lm > -math.inf]
    maj = least_concave_majorant(pts, x_max=float(n), pin_zero_endpoints=True)
    real_all = all(c.is_real_signed() for c in coeffs)

    boxes: list[RootBox] = []
    counts: list[tuple[int, int]] = []
    flags: list[tuple[int, int, int]] = []
    certified: list[bool] = []
    for i, seg in enumerate(maj.segments):
        k, l = int(seg.x_lo), int(seg.x_hi)
        width = l - k
        counts.append((i, width))
        r_cert = (logs[k] - logs[l]) / width
        h = math.inf
        for j, lm in enumerate(logs):
            if j == k or j == l or lm == -math.inf:
                continue
            line = logs[k] + (logs[l] - logs[k]) * (j - k) / width
            h = min(h, line - lm)
        cert = check_main_lemma(coeffs, seg, h)
        certified.append(cert is not None)
        if real_all:
            s_k, s_l = _real_sign(coeffs[k]), _real_sign(coeffs[l])
            eps_plus = int(s_k != s_l)
            twist_k = s_k if k % 2 == 0 else -s_k
            twist_l = s_l if l % 2 == 0 else -s_l
            eps_minus = int(twist_k != twist_l)
            flags.append((i, eps_plus, eps_minus))
        if cert is None:
            continue
        delta, zeta = cert
        phi = canonical_phase(math.pi + coeffs[k].phase - coeffs[l].phase)
        for m in range(1, width + 1):
            boxes.append(
                RootBox(
                    segment_index=i,
                    m=m,
                    log_r_center=r_cert,
                    delta=delta,
                    phase_center=canonical_phase((phi + _TWO_PI * m) / width),
                    zeta=zeta,
                )
            )
    return RootPrediction(
        boxes=tuple(boxes),
        segment_counts=tuple(counts),
        real_flags=tuple(flags),
        certified=tuple(certified),
        majorant=maj,
    )


def predict_real_roots(
    coeffs: list[LogComplex],
) -> list[tuple[int, float, int]]:
    """Signed real roots (sign, log_r, segment) from a certified prediction.

    One positive root per segment whose endpoint coefficient signs differ,
    one negative root per segment whose parity-twisted signs differ.
    """
    if not all(c.is_real_signed() for c in coeffs):
        raise ValueError("real-signed coefficients required")
    pred = predict_root_boxes(coeffs)
    if not all(pred.certified):
        raise ValueError("prediction is not fully certified")
    by_segment = {b.segment_index: b.log_r_center for b in pred.boxes}
    out: list[tuple[int, float, int]] = []
    for i, eps_plus, eps_minus in pred.real_flags:
        if eps_plus:
            out.append((1, by_segment[i], i))
        if eps_minus:
            out.append((-1, by_segment[i], i))
    return out


def winding_count(
    coeffs: list[LogComplex],
    contour: list[tuple[float, float]],
    samples_per_edge: int = 256,
) -> int:
    """Winding number of the polynomial along a closed polyline given in
    (log|z|, arg z) coordinates; equals the enclosed root count.

    Each edge is sampled uniformly and refined by doubling until adjacent
    principal-value phase steps stay below pi/4.  A sampled value whose
    log-modulus dips 250 under the edge maximum, or an edge that cannot be
    resolved, reports a root too close to the contour instead of guessing.

    A closing edge back to the first vertex is appended unless the last
    vertex already coincides with the first up to a whole number of turns,
    so a circle is written with an explicit 2 pi wrap in its phases.
    """
    if len(contour) < 2:
        raise ValueError("contour needs at least two vertices")
    if samples_per_edge < 2:
        raise ValueError("samples_per_edge must be at least 2")
    lm = np.array([c.log_mod for c in coeffs])
    ph = np.array([c.phase for c in coeffs])
    j = np.arange(lm.size)
    edges = list(zip(contour, contour[1:]))
    (lr_f, th_f), (lr_l, th_l) = contour[0], contour[-1]
    turns = (th_l - th_f) / _TWO_PI
    if not (lr_l == lr_f and abs(turns - round(turns)) < 1e-9):
        edges.append((contour[-1], contour[0]))
    total = 0.0
    for (lr_a, th_a), (lr_b, th_b) in edges:
        samples = samples_per_edge
        while True:
            t = np.linspace(0.0, 1.0, samples + 1)
            log_r = lr_a + (lr_b - lr_a) * t
            theta = th_a + (th_b - th_a) * t
            term_lm = lm[None, :] + j[None, :] * log_r[:, None]
            term_ph = ph[None, :] + j[None, :] * theta[:, None]
            m_shift = term_lm.max(axis=1, keepdims=True)
            pv = term_ph - _TWO_PI * np.round(term_ph / _TWO_PI)
            re = np.cos(pv)
            im = np.sin(pv)
            on_axis = np.abs(pv) == math.pi
            re[on_axis] = -1.0
            im[on_axis] = 0.0
            im[pv == 0.0] = 0.0
            mag = np.exp(term_lm - m_shift)
            vals = (mag * re).sum(axis=1) + 1j * (mag * im).sum(axis=1)
            mods = np.abs(vals)
            if (mods == 0.0).any():
                raise ValueError("contour too close to a root")
            log_mods = m_shift[:, 0] + np.log(mods)
            if log_mods.min() < log_mods.max() - 250.0:
                raise ValueError("contour too close to a root")
            phases = np.angle(vals)
            steps = np.diff(phases)
            steps -= _TWO_PI * np.round(steps / _TWO_PI)
            if np.abs(steps).max() < math.pi / 4.0:
                total += float(steps.sum())
                break
            samples *= 2
            if samples > 1 << 16:
                raise ValueError("contour too close to a root")
    count = round(total / _TWO_PI)
    if abs(total - _TWO_PI * count) > 0.25 * _TWO_PI:
        raise ValueError("winding residual too large; contour unresolved")
    return int(count)


def _circle(log_r: float) -> list[tuple[float, float]]:
    return [(log_r, -math.pi), (log_r, 0.0), (log_r, math.pi)]


def count_roots_annulus(
    coeffs: list[LogComplex],
    log_r1: float,
    log_r2: float,
    samples_per_edge: int = 256,
) -> int:
    """Roots with log_r1 < log|z| < log_r2, by circle winding difference."""
    if not log_r1 < log_r2:
        raise ValueError("log_r1 must be below log_r2")
    outer = winding_count(coeffs, _circle(log_r2), samples_per_edge)
    inner = winding_count(coeffs, _circle(log_r1), samples_per_edge)
    return outer - inner


def verify_boxes(
    coeffs: list[LogComplex],
    pred: RootPrediction,
    samples_per_edge: int = 128,
    indices: list[int] | None = None,
) -> list[int]:
    """Winding count over an inflated contour around each predicted box.

    The certified delta and zeta can be far below double resolution, so
    verification inflates each ring to a third of the gap to the nearest
    neighboring ring (0.5 when alone) and each sector halfway to the
    sector spacing; the true box sits inside and neighbors stay outside,
    so every count should be exactly 1.  ``indices`` selects a subset of
    pred.boxes; counts align with it.
    """
    radii = sorted({b.log_r_center for b in pred.boxes})
    gap: dict[float, float] = {}
    for idx, r in enumerate(radii):
        nearest = math.inf
        if idx > 0:
            nearest = min(nearest, r - radii[idx - 1])
        if idx + 1 < len(radii):
            nearest = min(nearest, radii[idx + 1] - r)
        gap[r] = 0.5 if nearest == math.inf else min(nearest / 3.0, 0.5)
    widths = dict(pred.segment_counts)
    chosen = range(len(pred.boxes)) if indices is None else indices
    counts = []
    for idx in chosen:
        box = pred.boxes[idx]
        d = gap[box.log_r_center]
        z = 0.5 * (box.zeta + math.pi / widths[box.segment_index])
        contour = [
            (box.log_r_center - d, box.phase_center - z),
            (box.log_r_center + d, box.phase_center - z),
            (box.log_r_center + d, box.phase_center + z),
            (box.log_r_center - d, box.phase_center + z),
        ]
        counts.append(winding_count(coeffs, contour, samples_per_edge))
    return counts


def solve_roots_direct(
    coeffs: list[LogComplex], max_degree: int = 128
) -> list[tuple[float, float]]:
    """All roots by Aberth-Ehrlich iteration, as (log|z|, arg z) pairs.

    Only for coefficients whose log-moduli stay within 300 of their max:
    beyond that window the certificate plus winding machinery is the only
    oracle.  Trailing zero coefficients become roots at zero, reported as
    (-inf, 0).
    """
    n = len(coeffs) - 1
    if n > max_degree:
        raise ValueError("degree exceeds the direct-solver limit")
    logs = [c.log_mod for c in coeffs]
    if logs[-1] == -math.inf:
        raise ValueError("nonzero leading coefficient required")
    m_shift = max(lm for lm in logs if lm > -math.inf)
    finite = [lm - m_shift for lm in logs if lm > -math.inf]
    if min(finite) < -300.0:
        raise ValueError("coefficient range exceeds the representable window")

    n_zero = 0
    while logs[n_zero] == -math.inf:
        n_zero += 1
    work = coeffs[n_zero:]
    deg = len(work) - 1
    zero_roots = [(-math.inf, 0.0)] * n_zero
    if deg == 0:
        return zero_roots

    lm = np.array([w.log_mod for w in work])
    ph = np.array([w.phase for w in work])
    j = np.arange(deg + 1)
    finite = lm > -math.inf
    dlm = lm[1:] + np.log(np.arange(1, deg + 1))
    dph = ph[1:]
    dj = np.arange(deg)

    # Newton polygon initialization: one ring of guesses per hull chord,
    # which keeps iterates near their target ring even when rings are
    # separated by hundreds of log units
    pts = sorted((float(k), lm[k]) for k in j[finite])
    hull = _upper_hull(pts)
    guesses = []
    for idx, ((a, ya), (b, yb)) in enumerate(zip(hull, hull[1:])):
        width = int(round(b - a))
        ring = (ya - yb) / (b - a)
        for m in range(width):
            guesses.append(
                math.exp(ring)
                * complex(
                    math.cos(0.4 + _TWO_PI * (m + 0.37 * idx) / width),
                    math.sin(0.4 + _TWO_PI * (m + 0.37 * idx) / width),
                )
            )
    z = np.array(guesses)

    for _ in range(500):
        # log-shifted evaluation of p/p' per point: |z|^deg never forms
        az = np.maximum(np.abs(z), 1e-300)
        lr = np.log(az)
        th = np.angle(z)
        t_lm = lm[None, :] + np.outer(lr, j)
        mp = t_lm.max(axis=1, keepdims=True)
        sp = (np.exp(t_lm - mp) * np.exp(1j * (ph[None, :] + np.outer(th, j)))).sum(axis=1)
        t_dlm = dlm[None, :] + np.outer(lr, dj)
        md = t_dlm.max(axis=1, keepdims=True)
        sd = (np.exp(t_dlm - md) * np.exp(1j * (dph[None, :] + np.outer(th, dj)))).sum(
            axis=1
        )
        shift = np.clip(mp[:, 0] - md[:, 0], -700.0, 700.0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = np.exp(shift) * sp / sd
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, math.inf)
            s = (1.0 / diff).sum(axis=1)
            corr = w / (1.0 - w * s)
        corr = np.where(np.isfinite(corr), corr, 0.1 * az)
        z = z - corr
        if (np.abs(corr) < 1e-12 * np.maximum(np.abs(z), 1e-300)).all():
            break
    else:
        raise RuntimeError("root iteration did not converge")
    out = zero_roots + [
        (math.log(abs(zi)) if zi != 0 else -math.inf, float(np.angle(zi))) for zi in z
    ]
    return out


def surrogate_roots_alpha0(
    coeffs: list[LogComplex],
) -> tuple[int, list[tuple[float, float]], list[tuple[float, float]]]:
    """Two-block surrogate roots for the flat-tail regime.

    When one coefficient dominates all others, the root set splits into
    tau roots solving xi_tau z^tau + xi_0 = 0 and n - tau roots solving
    xi_n z^(n-tau) + xi_tau = 0; both blocks are returned as
    (log|z|, phase) lists.
    """
    n = len(coeffs) - 1
    logs = [c.log_mod for c in coeffs]
    if logs[0] == -math.inf or logs[n] == -math.inf:
        raise ValueError("nonzero first and last coefficients required")
    m_max = max(logs)
    winners = [k for k, lm in enumerate(logs) if lm == m_max]
    if len(winners) != 1:
        raise ValueError("coefficient maximum is not unique")
    tau = winners[0]
    if tau in (0, n):
        raise ValueError("coefficient maximum sits at the boundary")

    first: list[tuple[float, float]] = []
    log_r = (logs[0] - m_max) / tau
    phi = canonical_phase(math.pi + coeffs[0].phase - coeffs[tau].phase)
    for m in range(1, tau + 1):
        first.append((log_r, canonical_phase((phi + _TWO_PI * m) / tau)))
    second: list[tuple[float, float]] = []
    log_r = (m_max - logs[n]) / (n - tau)
    phi = canonical_phase(math.pi + coeffs[tau].phase - coeffs[n].phase)
    for m in range(1, n - tau + 1):
        second.append((log_r, canonical_phase((phi + _TWO_PI * m) / (n - tau))))
    return tau, first, second
