"""Shared helpers: random certifiable instances and the box-root bijection
check used by both the roots suite and the acceptance gate."""
from __future__ import annotations

import math

import numpy as np

from logroots.coeffs import LogComplex, canonical_phase
from logroots.roots import predict_root_boxes, solve_roots_direct

INF = math.inf


def from_logs(logs, signs=None):
    if signs is None:
        signs = [1] * len(logs)
    return [
        LogComplex(lm, 0.0 if s > 0 else math.pi) if lm > -INF else LogComplex(-INF, 0.0)
        for lm, s in zip(logs, signs)
    ]


def phase_gap(a: float, b: float) -> float:
    return abs(canonical_phase(a - b))


def random_certified_instance(rng):
    """Instance with wide hull clearances so every segment certifies and
    the log-moduli stay inside the direct-solver window."""
    while True:
        deg = int(rng.integers(4, 51))
        if deg >= 30:
            n_seg = int(rng.integers(1, 4))
        elif deg >= 16:
            n_seg = int(rng.integers(1, 3))
        else:
            n_seg = 1
        ks = [0, deg]
        if n_seg > 1:
            inner = np.linspace(0, deg, n_seg + 1)[1:-1]
            jitter = rng.integers(-2, 3, size=n_seg - 1)
            ks = [0, *sorted(int(round(x + j)) for x, j in zip(inner, jitter)), deg]
            if len(set(ks)) != n_seg + 1 or min(np.diff(ks)) < 5:
                continue
        slope = float(rng.uniform(2.0, 5.0))
        heights = {0: float(rng.uniform(-5.0, 5.0))}
        for a, b in zip(ks, ks[1:]):
            heights[b] = heights[a] + slope * (b - a)
            slope -= float(rng.uniform(2.0, 4.0))
        logs = []
        for k in range(deg + 1):
            if k in heights:
                logs.append(heights[k])
                continue
            a = max(x for x in ks if x <= k)
            b = min(x for x in ks if x >= k)
            line = heights[a] + (heights[b] - heights[a]) * (k - a) / (b - a)
            logs.append(line - float(rng.uniform(16.0, 40.0)))
        if max(logs) - min(logs) > 280.0:
            continue
        signs = rng.choice([-1, 1], size=deg + 1)
        coeffs = from_logs(logs, signs)
        pred = predict_root_boxes(coeffs)
        if all(pred.certified):
            return coeffs, pred


def assert_box_root_bijection(coeffs, pred):
    """Each solver root lies in exactly one box and each box is hit once."""
    deg = len(coeffs) - 1
    assert sum(w for _, w in pred.segment_counts) == deg
    assert len(pred.boxes) == deg
    roots = solve_roots_direct(coeffs)
    widths = dict(pred.segment_counts)
    radii = sorted({b.log_r_center for b in pred.boxes})
    ring_tol = 0.5
    if len(radii) > 1:
        ring_tol = min(b - a for a, b in zip(radii, radii[1:])) / 3.0
    used = set()
    for lr, ph in roots:
        hits = [
            i
            for i, b in enumerate(pred.boxes)
            if abs(lr - b.log_r_center) < ring_tol
            and phase_gap(ph, b.phase_center)
            < 0.5 * (b.zeta + math.pi / widths[b.segment_index])
        ]
        assert len(hits) == 1 and hits[0] not in used
        used.add(hits[0])
    assert len(used) == deg
