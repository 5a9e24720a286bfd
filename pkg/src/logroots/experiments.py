"""Seeded Monte Carlo experiments comparing the samplers against the limit
theory.

Every experiment draws trial i from an rng substream seeded by the pair
(master_seed, trial index), so reports are pure functions of their
configuration and aggregates do not depend on execution order.  Statistics
carry a z-score and a pass flag whenever an exact theory value exists;
asymptotic comparisons use a wider soft band, and purely diagnostic
quantities report no theory at all.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coeffs import TailSpec, normalizing_sequences, sample_log_moduli, sample_polynomial
from .formulas import (
    alpha0_real_distribution,
    expected_real_roots,
    expected_segments_closed,
    prob_two_segments,
)
from .poisson import sample_majorant
from .roots import predict_root_boxes, verify_boxes

DEFAULT_RECTANGLES = (
    (0.0, 1.0, 1.0),
    (0.0, 0.5, 2.0),
    (0.25, 0.75, 1.5),
    (0.5, 1.0, 1.0),
    (0.0, 1.0, 3.0),
)

_KINDS = ("segment_count", "root_localization", "real_roots", "process_convergence")


@dataclass(frozen=True)
class StatRecord:
    name: str
    estimate: float
    std_error: float | None = None
    theory: float | None = None
    z: float | None = None
    passed: bool | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "theory": self.theory,
            "z": self.z,
            "pass": self.passed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "StatRecord":
        return cls(
            name=obj["name"],
            estimate=obj["estimate"],
            std_error=obj.get("std_error"),
            theory=obj.get("theory"),
            z=obj.get("z"),
            passed=obj.get("pass"),
        )


def _stat(
    name: str,
    estimate: float,
    std_error: float | None,
    theory: float | None = None,
    band: float = 3.0,
) -> StatRecord:
    if theory is None:
        return StatRecord(name, estimate, std_error)
    if std_error is None or std_error == 0.0:
        z = 0.0 if estimate == theory else math.inf
    else:
        z = (estimate - theory) / std_error
    return StatRecord(name, estimate, std_error, theory, z, abs(z) <= band)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    spec: TailSpec
    trials: int
    master_seed: int
    n: int = 0
    miss_tol: float = 1e-6
    kappa: float | None = None
    parity: str | None = None
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.kind != "segment_count" and self.n < 1:
            raise ValueError(f"{self.kind} requires n >= 1")
        if self.kind == "real_roots" and self.parity not in ("even", "odd"):
            raise ValueError("real_roots requires parity 'even' or 'odd'")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "spec": json.loads(self.spec.to_json()),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "n": self.n,
            "miss_tol": self.miss_tol,
            "kappa": self.kappa,
            "parity": self.parity,
            "output_path": self.output_path,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        return cls(
            kind=obj.get("kind", ""),
            spec=TailSpec.from_json(json.dumps(obj.get("spec", {}))),
            trials=int(obj.get("trials", 0)),
            master_seed=int(obj.get("master_seed", 0)),
            n=int(obj.get("n", 0)),
            miss_tol=float(obj.get("miss_tol", 1e-6)),
            kappa=obj.get("kappa"),
            parity=obj.get("parity"),
            output_path=obj.get("output_path"),
        )


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    statistics: tuple[StatRecord, ...]
    uncertified_fraction: float | None
    seed: int
    runtime: float

    def all_passed(self) -> bool:
        return all(s.passed for s in self.statistics if s.passed is not None)

    def to_json(self) -> str:
        return json.dumps(
            {
                "config": self.config.to_dict(),
                "statistics": [s.to_dict() for s in self.statistics],
                "uncertified_fraction": self.uncertified_fraction,
                "seed": self.seed,
                "runtime": self.runtime,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        obj = json.loads(text)
        return cls(
            config=ExperimentConfig.from_dict(obj["config"]),
            statistics=tuple(StatRecord.from_dict(s) for s in obj["statistics"]),
            uncertified_fraction=obj.get("uncertified_fraction"),
            seed=obj["seed"],
            runtime=obj["runtime"],
        )


def substream(master_seed: int, trial: int) -> np.random.Generator:
    """Trial substream: PCG64 seeded by the pair (master_seed, trial)."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, trial)))


def _worker_count() -> int:
    raw = os.environ.get("LOGROOTS_THREADS", "1")
    try:
        return max(1, min(int(raw), 64))
    except ValueError:
        return 1


def _map_trials(trials: int, fn):
    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(trials)))
    return [fn(i) for i in range(trials)]


def _mean_stat(name: str, values: np.ndarray, theory: float | None, band: float = 3.0):
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else None
    return _stat(name, mean, se, theory, band)


def _freq_stat(name: str, hits: int, total: int, theory: float, band: float = 3.0):
    # binomial std error under the theory value, not the estimate
    se = math.sqrt(theory * (1.0 - theory) / total) if 0.0 < theory < 1.0 else 0.0
    return _stat(name, hits / total, se if se > 0.0 else None, theory, band)


def run_segment_count(
    alpha: float, trials: int, seed: int, miss_tol: float = 1e-6
) -> ExperimentReport:
    """Segment counts of sampled limit majorants vs the two exact laws:
    mean L and the probability of exactly two segments."""
    start = time.monotonic()

    def trial(i: int) -> int:
        _, count = sample_majorant(alpha, substream(seed, i), miss_tol=miss_tol)
        return count

    counts = np.array(_map_trials(trials, trial), dtype=float)
    stats = (
        _mean_stat("mean_segments", counts, expected_segments_closed(alpha)),
        _freq_stat(
            "prob_two_segments",
            int((counts == 2.0).sum()),
            trials,
            prob_two_segments(alpha),
        ),
    )
    config = ExperimentConfig(
        kind="segment_count",
        spec=TailSpec(family="pareto_log", alpha=alpha),
        trials=trials,
        master_seed=seed,
        miss_tol=miss_tol,
    )
    return ExperimentReport(config, stats, None, seed, time.monotonic() - start)


def _is_real_axis(phase: float) -> bool:
    return abs(phase) < 1e-9 or abs(abs(phase) - math.pi) < 1e-9


def _phase_spacing_ks(phases: list[float]) -> float:
    """Sup gap between the sorted phases (anchored at the first) and an
    exactly equispaced grid on the circle."""
    width = len(phases)
    ordered = sorted(phases)
    worst = 0.0
    for m, ph in enumerate(ordered):
        frac = ((ph - ordered[0]) % (2.0 * math.pi)) / (2.0 * math.pi)
        worst = max(worst, abs(frac - m / width))
    return worst


def run_root_localization(
    spec: TailSpec,
    n: int,
    trials: int,
    seed: int,
    kappa: float | None = None,
    max_boxes: int = 50,
    samples_per_edge: int = 64,
) -> ExperimentReport:
    """Sampled polynomials through prediction and winding verification.

    Per trial: predict boxes, winding-verify a random subsample of at most
    max_boxes boxes plus every real-axis box, and collect placement
    diagnostics.  When kappa is given, the subsample is drawn only from
    segments meeting the abscissa window [kappa n, (1 - kappa) n].
    """
    start = time.monotonic()
    has_scale = spec.family in ("pareto_log", "fig1b")
    b_n = normalizing_sequences(spec, n).b_n if has_scale else 1.0

    def trial(i: int):
        rng = substream(seed, i)
        coeffs = sample_polynomial(spec, n, rng)
        pred = predict_root_boxes(coeffs)
        segs = len(pred.certified)
        cert = sum(pred.certified)
        all_cert = cert == segs
        eligible = list(range(len(pred.boxes)))
        if kappa is not None:
            lo, hi = kappa * n, (1.0 - kappa) * n
            eligible = [
                idx
                for idx in eligible
                if pred.majorant.segments[pred.boxes[idx].segment_index].x_hi > lo
                and pred.majorant.segments[pred.boxes[idx].segment_index].x_lo < hi
            ]
        real_idx = [
            idx for idx in eligible if _is_real_axis(pred.boxes[idx].phase_center)
        ]
        pool = [idx for idx in eligible if idx not in set(real_idx)]
        take = min(max_boxes, len(pool))
        picked = (
            sorted(rng.choice(len(pool), size=take, replace=False).tolist())
            if take
            else []
        )
        chosen = sorted(set(real_idx) | {pool[k] for k in picked})
        ok = unresolved = 0
        for idx in chosen:
            try:
                counts = verify_boxes(coeffs, pred, samples_per_edge, [idx])
            except ValueError:
                unresolved += 1
                continue
            ok += int(counts[0] == 1)
        w1 = None
        ks_stats: list[tuple[float, int]] = []
        if all_cert and pred.boxes:
            from_boxes = [
                (b_n * b.log_r_center, 1.0 / len(pred.boxes)) for b in pred.boxes
            ]
            widths = dict(pred.segment_counts)
            radii = {b.segment_index: b.log_r_center for b in pred.boxes}
            from_segments = [
                (b_n * radii[i], widths[i] / n) for i in sorted(radii)
            ]
            w1 = distance_stats(from_boxes, from_segments)[0]
            for i in sorted(radii):
                phases = [
                    b.phase_center for b in pred.boxes if b.segment_index == i
                ]
                ks_stats.append((_phase_spacing_ks(phases), len(phases)))
        return segs, cert, all_cert, ok, len(chosen) - unresolved, unresolved, w1, ks_stats

    rows = _map_trials(trials, trial)
    seg_frac = np.array([cert / segs for segs, cert, *_ in rows])
    verified = sum(r[4] for r in rows)
    ok_total = sum(r[3] for r in rows)
    unresolved_total = sum(r[5] for r in rows)
    w1s = np.array([r[6] for r in rows if r[6] is not None])
    ks_all = [k for r in rows for k in r[7]]
    stats = [
        _mean_stat("certified_segment_fraction", seg_frac, None),
        _stat(
            "box_verification_success",
            ok_total / verified if verified else 0.0,
            0.0,
            1.0 if verified else None,
        ),
        _stat("unresolved_boxes", float(unresolved_total), None),
    ]
    if w1s.size:
        stats.append(_mean_stat("wasserstein_box_consistency", w1s, None))
    if ks_all:
        # 1% one-sample KS critical value ~ 1.63 / sqrt(count)
        below = sum(1 for ks, width in ks_all if ks < 1.63 / math.sqrt(width))
        stats.append(
            _stat("phase_ks_fraction_below_critical", below / len(ks_all), None)
        )
        stats.append(_stat("phase_ks_max", max(ks for ks, _ in ks_all), None))
    uncert = sum(1 for r in rows if not r[2]) / trials
    config = ExperimentConfig(
        kind="root_localization",
        spec=spec,
        trials=trials,
        master_seed=seed,
        n=n,
        kappa=kappa,
    )
    return ExperimentReport(config, tuple(stats), uncert, seed, time.monotonic() - start)


def surrogate_real_count(s0: int, st: int, sn: int, tau_parity: int, block2_parity: int) -> int:
    """Real-root count of the two factor equations from signs alone.

    An even-arity block has two real roots when its endpoint signs differ
    and none otherwise; an odd-arity block always has exactly one.
    """
    first = (2 if s0 != st else 0) if tau_parity == 0 else 1
    second = (2 if st != sn else 0) if block2_parity == 0 else 1
    return first + second


def _double_log_good_event(lam: np.ndarray) -> int | None:
    """Dominant index when the two-chord hull certifies, else None.

    Operates on double-log moduli (log of log-modulus), the scale on
    which the slowly-varying family stays finite; the raw log-moduli
    exp(lam) overflow doubles roughly once per 709 draws.  Checks that
    every interior point clears its chord to the peak, and that each
    chord clears the opposite block, by at least the margin the
    localization certificate needs.  All inequalities are evaluated
    through exact log-scale lower bounds, so None may be conservative
    but a returned index never is.
    """
    n = lam.size - 1
    tau = int(lam.argmax())
    if tau in (0, n):
        return None
    # margin covering certificate feasibility and the angular-rate window
    log_h = math.log(3.0 * math.log(n + 1.0) + 4.0)
    lam_t = float(lam[tau])
    k = np.arange(1, n)
    k = k[k != tau]
    frac = np.where(k < tau, k / tau, (n - k) / (n - tau))
    cap = lam_t + np.log(frac)
    diff = lam[k] - cap
    if (diff >= 0.0).any():
        return None
    with np.errstate(divide="ignore"):
        clear = cap + np.log1p(-np.exp(diff))
    if (clear < log_h).any():
        return None
    for lam_end, width in ((float(lam[0]), tau), (float(lam[n]), n - tau)):
        d = lam_end - lam_t
        if d >= 0.0:
            return None
        if lam_t + math.log1p(-math.exp(d)) - math.log(width) < log_h:
            return None
    return tau


def run_real_roots(
    spec: TailSpec, n: int, trials: int, seed: int, parity: str
) -> ExperimentReport:
    """Real-root counts vs theory.

    Slowly-varying spec: the dominant-coefficient surrogate's sign logic,
    gated per trial by the certificate that the coefficient hull is
    exactly the two dominant chords and both certify; the histogram is
    compared against the exact limit distribution.  The trial runs on
    the double-log modulus scale throughout.  Tail-indexed spec:
    predicted real-root counts on fully certified trials against the
    expected-value formula, with a soft 5 sigma band because the formula
    is a large-degree limit and finite-n bias is expected.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if (n % 2 == 0) != (parity == "even"):
        raise ValueError("n parity does not match the parity argument")
    start = time.monotonic()
    config = ExperimentConfig(
        kind="real_roots",
        spec=spec,
        trials=trials,
        master_seed=seed,
        n=n,
        parity=parity,
    )

    if spec.family == "slow_log":

        def trial(i: int):
            rng = substream(seed, i)
            u = rng.random(n + 1)
            bad = u == 0.0
            while bad.any():
                u[bad] = rng.random(int(bad.sum()))
                bad = u == 0.0
            lam = 1.0 / u
            # the family's mass all sits above the sign threshold: c throughout
            pos = rng.random(n + 1) < spec.c
            tau = _double_log_good_event(lam)
            if tau is None:
                return None
            s0, st, sn = ((1 if pos[j] else -1) for j in (0, tau, n))
            return surrogate_real_count(s0, st, sn, tau % 2, (n - tau) % 2)

        rows = _map_trials(trials, trial)
        certified = [r for r in rows if r is not None]
        dist = alpha0_real_distribution(spec.c, spec.p, parity)
        stats = []
        for value, prob in zip(dist.support, dist.probs):
            stats.append(
                _freq_stat(
                    f"prob_count_{value}",
                    sum(1 for r in certified if r == value),
                    len(certified),
                    prob,
                )
            )
        uncert = 1.0 - len(certified) / trials
        return ExperimentReport(
            config, tuple(stats), uncert, seed, time.monotonic() - start
        )

    def trial(i: int):
        rng = substream(seed, i)
        coeffs = sample_polynomial(spec, n, rng)
        pred = predict_root_boxes(coeffs)
        if not all(pred.certified):
            return None
        return sum(ep + em for _, ep, em in pred.real_flags)

    rows = _map_trials(trials, trial)
    certified = np.array([r for r in rows if r is not None], dtype=float)
    theory = expected_real_roots(spec.tail_index, spec.c, spec.p)
    stats = (_mean_stat("mean_real_roots", certified, theory, band=5.0),)
    uncert = 1.0 - certified.size / trials
    return ExperimentReport(config, stats, uncert, seed, time.monotonic() - start)


def run_process_convergence(
    spec: TailSpec,
    n: int,
    rectangles,
    trials: int,
    seed: int,
) -> ExperimentReport:
    """Rescaled coefficient point counts per rectangle vs Poisson masses.

    Per trial the cloud {(k/n, log|xi_k| / a_n)} is counted inside each
    [u1, u2] x [t, inf) rectangle; nonpositive log-moduli never count.
    """
    alpha = spec.tail_index
    rects = [tuple(map(float, r)) for r in rectangles]
    for u1, u2, t in rects:
        if not (0.0 <= u1 < u2 <= 1.0 and t > 0.0):
            raise ValueError("rectangle must satisfy 0 <= u1 < u2 <= 1, t > 0")
    start = time.monotonic()
    a_n = normalizing_sequences(spec, n).a_n

    def trial(i: int):
        rng = substream(seed, i)
        lms = sample_log_moduli(spec, n + 1, rng)
        us = np.arange(n + 1) / n
        vs = np.where(lms > 0.0, lms / a_n, -1.0)
        return [
            int(((us >= u1) & (us <= u2) & (vs >= t)).sum()) for u1, u2, t in rects
        ]

    rows = np.array(_map_trials(trials, trial), dtype=float)
    stats = []
    for col, (u1, u2, t) in enumerate(rects):
        counts = rows[:, col]
        theory = (u2 - u1) * t**-alpha
        label = f"rect[{u1:g},{u2:g}]x[{t:g},inf)"
        stats.append(_mean_stat(f"mean_{label}", counts, theory))
        mean = counts.mean()
        if mean > 0:
            stats.append(
                _stat(f"dispersion_{label}", float(counts.var(ddof=1) / mean), None)
            )
    config = ExperimentConfig(
        kind="process_convergence",
        spec=spec,
        trials=trials,
        master_seed=seed,
        n=n,
    )
    return ExperimentReport(config, tuple(stats), None, seed, time.monotonic() - start)


def distance_stats(sample_a, sample_b) -> tuple[float, float]:
    """Exact 1-Wasserstein and Kolmogorov-Smirnov distances between two
    weighted point sets on the line, by a merged-support CDF walk."""
    for sample in (sample_a, sample_b):
        if not sample:
            raise ValueError("samples must be nonempty")
        total = sum(w for _, w in sample)
        if abs(total - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
    weight_a: dict[float, float] = {}
    weight_b: dict[float, float] = {}
    for x, w in sample_a:
        weight_a[x] = weight_a.get(x, 0.0) + w
    for x, w in sample_b:
        weight_b[x] = weight_b.get(x, 0.0) + w
    xs = sorted(set(weight_a) | set(weight_b))
    cdf_a = cdf_b = 0.0
    w1 = ks = 0.0
    for i, x in enumerate(xs):
        cdf_a += weight_a.get(x, 0.0)
        cdf_b += weight_b.get(x, 0.0)
        gap = abs(cdf_a - cdf_b)
        ks = max(ks, gap)
        if i + 1 < len(xs):
            w1 += gap * (xs[i + 1] - x)
    return w1, ks


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Dispatch a configuration to its runner."""
    if config.kind == "segment_count":
        return run_segment_count(
            config.spec.alpha, config.trials, config.master_seed, config.miss_tol
        )
    if config.kind == "root_localization":
        return run_root_localization(
            config.spec, config.n, config.trials, config.master_seed, config.kappa
        )
    if config.kind == "real_roots":
        return run_real_roots(
            config.spec, config.n, config.trials, config.master_seed, config.parity
        )
    return run_process_convergence(
        config.spec, config.n, DEFAULT_RECTANGLES, config.trials, config.master_seed
    )
