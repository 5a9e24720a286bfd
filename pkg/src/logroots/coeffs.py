"""Coefficient families with logarithmic power-law tails, sampled in log domain.

Coefficients of the polynomials studied here reach magnitudes like e^(n^2),
far beyond floating-point range, so every coefficient is carried as a
:class:`LogComplex` (log-modulus, phase) pair and all sampling happens on the
log scale via exact inverse CDFs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

TWO_PI = 2.0 * math.pi

_FAMILIES = ("pareto_log", "fig1b", "slow_log", "gaussian")

# log-modulus level above which the upper-tail sign probability c applies;
# the exact families put all their mass at or above this level.
_SIGN_THRESHOLD = {"pareto_log": 1.0, "fig1b": 1.0, "slow_log": math.e}


def canonical_phase(phi: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = math.fmod(phi, TWO_PI)
    if w <= -math.pi:
        w += TWO_PI
    elif w > math.pi:
        w -= TWO_PI
    return w + 0.0  # normalize -0.0


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as (natural-log modulus, phase).

    ``log_mod = -inf`` encodes the value 0 and forces ``phase = 0``.  The
    phase is kept canonical in (-pi, pi].
    """

    log_mod: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.log_mod == -math.inf:
            object.__setattr__(self, "phase", 0.0)
        else:
            object.__setattr__(self, "phase", canonical_phase(self.phase))

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.log_mod == -math.inf or other.log_mod == -math.inf:
            return LogComplex(-math.inf)
        return LogComplex(self.log_mod + other.log_mod, self.phase + other.phase)

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_mod, -self.phase)

    def to_complex(self) -> complex:
        """Native complex value; only faithful for |log_mod| within ~709."""
        if self.log_mod == -math.inf:
            return 0j
        r = math.exp(self.log_mod)
        return complex(r * math.cos(self.phase), r * math.sin(self.phase))

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        if z == 0:
            return cls(-math.inf)
        return cls(math.log(abs(z)), math.atan2(z.imag, z.real))

    def is_real_signed(self) -> bool:
        """True when the phase is 0 or pi (a real value, possibly zero)."""
        return self.phase == 0.0 or self.phase == math.pi


@dataclass(frozen=True)
class TailSpec:
    """Coefficient distribution family.

    family: one of pareto_log (P[log|xi| > t] = t^-alpha for t >= 1),
    fig1b (pareto_log with alpha = 2 and all-positive signs by default),
    slow_log (P[log|xi| > t] = 1/log t for t >= e), gaussian (standard
    normal coefficients, the light-tailed contrast family).

    ``p`` is the sign probability P[xi > 0] for ordinary draws, ``c`` the
    sign probability for draws whose log-modulus reaches the family's
    upper-tail threshold.  The exact families place all mass at or above
    that threshold, so there ``c`` governs every draw.  ``c`` defaults to
    ``p``.  ``complex_coeffs`` switches signs to uniform phases.
    """

    family: str
    alpha: float = 0.0
    c: float | None = None
    p: float | None = None
    complex_coeffs: bool = False

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "pareto_log" and not self.alpha > 0:
            raise ValueError("pareto_log requires alpha > 0")
        if self.p is None:
            object.__setattr__(self, "p", 1.0 if self.family == "fig1b" else 0.5)
        if self.c is None:
            object.__setattr__(self, "c", self.p)
        if not 0.0 <= self.p <= 1.0 or not 0.0 <= self.c <= 1.0:
            raise ValueError("sign probabilities must lie in [0, 1]")

    @property
    def tail_index(self) -> float:
        """Effective regular-variation index (fig1b is pareto with alpha=2)."""
        if self.family == "pareto_log":
            return self.alpha
        if self.family == "fig1b":
            return 2.0
        raise ValueError(f"{self.family} has no tail index")

    def positive_prob(self) -> float:
        """Unconditional P[xi > 0] implied by the threshold sign model."""
        return self.p if self.family == "gaussian" else self.c

    def to_json(self) -> str:
        return json.dumps(
            {
                "family": self.family,
                "alpha": self.alpha,
                "c": self.c,
                "p": self.p,
                "complex": self.complex_coeffs,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "TailSpec":
        obj = json.loads(text)
        if not isinstance(obj, dict):
            raise ValueError("spec JSON must be an object")
        return cls(
            family=obj.get("family", ""),
            alpha=float(obj.get("alpha", 0.0)),
            c=obj.get("c"),
            p=obj.get("p"),
            complex_coeffs=bool(obj.get("complex", False)),
        )


@dataclass(frozen=True)
class NormalizingPair:
    a_n: float
    b_n: float


def tail_function(spec: TailSpec, t: float) -> float:
    """P[log|xi| > t] for the exact families; 1 below the family threshold."""
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    if spec.family == "gaussian":
        raise ValueError("gaussian family has no closed log-scale tail")
    if spec.family in ("pareto_log", "fig1b"):
        alpha = spec.tail_index
        return 1.0 if t < 1.0 else t ** -alpha
    # slow_log
    return 1.0 if t < math.e else 1.0 / math.log(t)


def _positive_uniform(rng: np.random.Generator) -> float:
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    return u


def _log_modulus_from_uniform(spec: TailSpec, u: float) -> float:
    if spec.family in ("pareto_log", "fig1b"):
        return u ** (-1.0 / spec.tail_index)
    # slow_log: inverse of 1/log t, i.e. log-modulus e^(1/u); saturates to
    # inf past the double range (the alpha=0 pipelines avoid this path).
    x = 1.0 / u
    return math.inf if x > 709.0 else math.exp(x)


def sample_coefficient(spec: TailSpec, rng: np.random.Generator) -> LogComplex:
    """One coefficient draw: inverse-CDF log-modulus plus sign or phase."""
    if spec.family == "gaussian":
        g = rng.standard_normal()
        while g == 0.0:
            g = rng.standard_normal()
        log_mod = math.log(abs(g))
        above = False
    else:
        log_mod = _log_modulus_from_uniform(spec, _positive_uniform(rng))
        above = log_mod >= _SIGN_THRESHOLD[spec.family]
    if spec.complex_coeffs:
        phase = math.pi - TWO_PI * rng.random()
    else:
        sign_prob = spec.c if above else spec.p
        phase = 0.0 if rng.random() < sign_prob else math.pi
    return LogComplex(log_mod, phase)


def sample_log_moduli(spec: TailSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized log-modulus draws (same marginals as sample_coefficient)."""
    if spec.family == "gaussian":
        g = rng.standard_normal(size)
        bad = g == 0.0
        while bad.any():
            g[bad] = rng.standard_normal(int(bad.sum()))
            bad = g == 0.0
        return np.log(np.abs(g))
    u = rng.random(size)
    bad = u == 0.0
    while bad.any():
        u[bad] = rng.random(int(bad.sum()))
        bad = u == 0.0
    if spec.family in ("pareto_log", "fig1b"):
        return u ** (-1.0 / spec.tail_index)
    with np.errstate(over="ignore"):
        return np.exp(1.0 / u)


def sample_phases(
    spec: TailSpec, log_moduli: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized phases (0/pi signs or uniform) matching sample_coefficient."""
    size = log_moduli.shape[0]
    if spec.complex_coeffs:
        return math.pi - TWO_PI * rng.random(size)
    if spec.family == "gaussian":
        prob = np.full(size, spec.p)
    else:
        prob = np.where(log_moduli >= _SIGN_THRESHOLD[spec.family], spec.c, spec.p)
    return np.where(rng.random(size) < prob, 0.0, math.pi)


def normalizing_sequences(spec: TailSpec, n: int) -> NormalizingPair:
    """a_n solving tail_function(a_n) = 1/n, and b_n = n/a_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if spec.family not in ("pareto_log", "fig1b"):
        raise ValueError(f"{spec.family} has no tail-index normalization")
    a_n = float(n) ** (1.0 / spec.tail_index)
    return NormalizingPair(a_n=a_n, b_n=n / a_n)


def sample_polynomial(spec: TailSpec, n: int, rng: np.random.Generator) -> list[LogComplex]:
    """n+1 i.i.d. coefficient draws, constant term first."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    log_moduli = sample_log_moduli(spec, n + 1, rng)
    phases = sample_phases(spec, log_moduli, rng)
    return [LogComplex(float(m), float(ph)) for m, ph in zip(log_moduli, phases)]


def spec_from_name(name: str, alpha: float | None = None) -> TailSpec:
    """Build a TailSpec from a CLI-style family name."""
    if name == "pareto_log":
        if alpha is None:
            raise ValueError("pareto_log requires --alpha")
        return TailSpec(family="pareto_log", alpha=alpha)
    if name in ("fig1b", "slow_log", "gaussian"):
        return TailSpec(family=name)
    raise ValueError(f"unknown spec name {name!r}")


def with_sign_probs(spec: TailSpec, c: float | None, p: float | None) -> TailSpec:
    """Spec copy with overridden sign probabilities (None keeps current)."""
    return replace(spec, c=spec.c if c is None else c, p=spec.p if p is None else p)
