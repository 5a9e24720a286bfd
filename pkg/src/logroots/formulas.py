"""Closed-form limit quantities: digamma, the Barnes modular constant, the
expected segment count of the limit majorant by two independent routes, and
the exact real-root laws of the slowly-varying regime.

The two segment-count routes (special-function evaluation vs quadrature)
deliberately share no code so that each validates the other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

EULER_GAMMA = 0.5772156649015329


def digamma(x: float) -> float:
    """psi(x) for x > 0, absolute error below 1e-12.

    Recurrence-shifts the argument to >= 8, then applies the asymptotic
    series through the x^-12 term (truncation ~2e-14 at x = 8).
    """
    if not x > 0:
        raise ValueError("digamma requires x > 0")
    acc = 0.0
    while x < 8.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = inv2 * (
        1.0 / 12
        - inv2
        * (
            1.0 / 120
            - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760))))
        )
    )
    return acc + math.log(x) - 0.5 / x - tail


def _psi_minus_log_vec(x: np.ndarray) -> np.ndarray:
    """psi(x) - log(x), elementwise, x > 0.

    Evaluated without forming psi or log alone: the difference decays like
    -1/(2x), so term-level rounding stays proportional to the (small) value
    instead of to log(x). That keeps noise in the Barnes-constant sums near
    1e-14 where summing raw digamma values drifts at ~1e-11.
    """
    x0 = np.array(x, dtype=float)
    x = x0.copy()
    acc = np.zeros_like(x)
    for _ in range(8):
        mask = x < 8.0
        if not mask.any():
            break
        acc[mask] -= 1.0 / x[mask]
        x[mask] += 1.0
    inv2 = 1.0 / (x * x)
    tail = inv2 * (
        1.0 / 12
        - inv2
        * (
            1.0 / 120
            - inv2
            * (
                1.0 / 252
                - inv2
                * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0)))
            )
        )
    )
    return acc + np.log(x / x0) - 0.5 / x - tail


def barnes_C(beta: float, tol: float = 1e-10) -> float:
    """Barnes modular constant C(beta).

    Evaluates the defining sequence
        T(n) = sum_{m<=n} psi(m beta) - (n + 1/2 - 1/(2 beta)) log(n beta) + n,
    whose error expands in integer powers of 1/n, and removes the 1/n
    through 1/n^3 terms by a third-order Richardson ladder over doubling n,
    stopping when successive top-level extrapolants differ by less than tol.

    T(n) is not summed literally: the digamma sum is regrouped as a sum of
    psi(m beta) - log(m beta) differences plus a Stirling evaluation of
    log n! - (n + 1/2) log n + n, which keeps accumulated rounding noise
    near 1e-13 where the literal sum drifts at ~1e-11.
    """
    if not beta > 0:
        raise ValueError("barnes_C requires beta > 0")
    if not tol > 0:
        raise ValueError("tol must be positive")

    base = 128
    n_terms = 0
    diff_sum = 0.0
    # ladder[0] holds T at base * 2^k; ladder[j] the j-th Richardson level
    ladder: list[list[float]] = [[], [], [], []]
    k = 0
    while True:
        n = base * 2**k
        if n > 10**8:
            raise RuntimeError("Barnes constant did not converge within 1e8 terms")
        m = np.arange(n_terms + 1, n + 1, dtype=float)
        diff_sum += math.fsum(_psi_minus_log_vec(m * beta))
        n_terms = n
        inv_n = 1.0 / n
        stirling = 0.5 * math.log(2.0 * math.pi) + inv_n * (
            1.0 / 12 - inv_n * inv_n * (1.0 / 360 - inv_n * inv_n * (1.0 / 1260))
        )
        t_n = diff_sum + stirling - 0.5 * math.log(beta) + 0.5 / beta * math.log(n * beta)
        ladder[0].append(t_n)
        for j in range(1, 4):
            if len(ladder[j - 1]) >= 2:
                w = float(2**j)
                ladder[j].append((w * ladder[j - 1][-1] - ladder[j - 1][-2]) / (w - 1.0))
        top = ladder[3]
        if len(top) >= 2 and abs(top[-1] - top[-2]) < tol:
            return top[-1]
        k += 1


def _closed_formula(alpha: float, barnes_tol: float) -> float:
    beta = 1.0 - alpha
    bracket = 1.0 - 2.0 * barnes_C(beta, barnes_tol) + (math.log(beta) - alpha * EULER_GAMMA) / beta
    return 2.0 + (2.0 - 2.0 * alpha) / (2.0 * alpha - 1.0) * bracket


def expected_segments_closed(alpha: float) -> float:
    """Expected number of majorant segments via the Barnes-constant formula.

    The formula has a removable singularity at alpha = 1/2; within 1e-4 of
    it the value is recovered from symmetric two-point averages of the
    formula at alpha = 1/2 +- eps, Richardson-extrapolated over eps = 8e-3,
    4e-3, 2e-3 (averages kill odd orders, the two-level ladder kills eps^2
    and eps^4), leaving ~1e-9 error without touching the quadrature route.
    The eps values stay large enough that the pole factor does not amplify
    Barnes-constant noise past that budget.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if abs(alpha - 0.5) < 1e-4:

        def sym_avg(eps: float) -> float:
            return 0.5 * (_closed_formula(0.5 - eps, 1e-12) + _closed_formula(0.5 + eps, 1e-12))

        a1, a2, a3 = sym_avg(8e-3), sym_avg(4e-3), sym_avg(2e-3)
        b1 = (4.0 * a2 - a1) / 3.0
        b2 = (4.0 * a3 - a2) / 3.0
        return (16.0 * b2 - b1) / 15.0
    return _closed_formula(alpha, 1e-12)


def _series_numerator(t: float, alpha: float) -> float:
    """1 - (1-t)^(1-2a) - (1-2a)(1-t)^(-a) t, by series; needs |t| < ~0.1.

    The direct expression cancels to O(t^3), so for small t it is summed as
    sum_{k>=3} (-1)^(k+1) [binom(1-2a, k) - (1-2a) binom(-a, k-1)] t^k.
    """
    b_tilde = 1.0 - 2.0 * alpha
    binom_bt = b_tilde  # binom(b_tilde, k), starting at k = 1
    binom_ma = 1.0  # binom(-alpha, k-1), starting at k = 1
    total = 0.0
    tk = 1.0
    sign = 1.0  # (-1)^(k+1) at current k
    for k in range(1, 80):
        if k >= 3:
            term = sign * (binom_bt - b_tilde * binom_ma) * tk * t
            total += term
            if abs(term) < 1e-18 * abs(total) + 1e-300:
                break
        tk *= t
        sign = -sign
        binom_bt *= (b_tilde - k) / (k + 1)
        binom_ma *= (-alpha - k + 1) / k
    return total


def _series_numerator_half(t: float) -> float:
    """(1-t)^(-1/2) t + log(1-t) by series; the terms cancel to O(t^3)."""
    binom = 1.0  # binom(-1/2, k-1)
    total = 0.0
    tk = t
    for k in range(1, 80):
        if k >= 3:
            term = ((-1.0) ** (k - 1) * binom - 1.0 / k) * tk
            total += term
            if abs(term) < 1e-18 * abs(total) + 1e-300:
                break
        tk *= t
        binom *= (-0.5 - k + 1) / k
    return total


_SERIES_CUT = 0.05


def _inner_integrand_general(u: float, alpha: float) -> float:
    t = 1.0 - u
    b_tilde = 1.0 - 2.0 * alpha
    beta = 1.0 - alpha
    if t < _SERIES_CUT:
        num = _series_numerator(t, alpha)
    else:
        lu = math.log(u)
        num = -math.expm1(b_tilde * lu) - b_tilde * math.exp(-alpha * lu) * t
    den = t * math.expm1(beta * math.log(u)) ** 2
    return num / den


def _inner_integrand_half(u: float) -> float:
    t = 1.0 - u
    if t < _SERIES_CUT:
        num = _series_numerator_half(t)
    else:
        num = t / math.sqrt(u) + math.log(u)
    den = t * math.expm1(0.5 * math.log(u)) ** 2
    return num / den


def _left_integrand_general(s: float, alpha: float) -> float:
    # substitution u = s^(1/beta): the combined power s^(1/beta - 1) du-factor
    # removes both endpoint singularities of the inner integrand at u = 0
    beta = 1.0 - alpha
    b_tilde = 1.0 - 2.0 * alpha
    u = s ** (1.0 / beta)
    num = s ** (1.0 / beta - 1.0) - s - b_tilde * (1.0 - u)
    den = beta * (1.0 - u) * (1.0 - s) ** 2
    return num / den


def _left_integrand_half(s: float) -> float:
    u = s * s
    num = (1.0 - u) + 2.0 * s * math.log(s)
    den = 0.5 * (1.0 - u) * (1.0 - s) ** 2
    return num / den


def expected_segments_integral(alpha: float, tol: float = 1e-9) -> float:
    """Expected segment count by adaptive quadrature of the definite-integral
    representation; absolute error below tol.

    The integrand's u -> 0 singularity is removed by substituting
    u = s^(1/(1-alpha)) on (0, 1/2]; near u = 1 the numerator is evaluated
    by series (it cancels to cubic order, and direct evaluation loses every
    digit past u ~ 0.9999).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not tol > 0:
        raise ValueError("tol must be positive")
    beta = 1.0 - alpha
    eps = {"epsabs": tol / 4.0, "epsrel": 1e-12, "limit": 200}
    if alpha == 0.5:
        left, _ = quad(_left_integrand_half, 0.0, math.sqrt(0.5), **eps)
        right, _ = quad(_inner_integrand_half, 0.5, 1.0, **eps)
        return 2.0 + left + right
    left, _ = quad(_left_integrand_general, 0.0, 0.5**beta, args=(alpha,), **eps)
    right, _ = quad(_inner_integrand_general, 0.5, 1.0, args=(alpha,), **eps)
    return 2.0 + (2.0 - 2.0 * alpha) / (2.0 * alpha - 1.0) * (left + right)


def prob_two_segments(alpha: float) -> float:
    """P[the limit majorant has exactly two segments] = 1 - alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return 1.0 - alpha


def expected_real_roots(alpha: float, c: float, p: float) -> float:
    """Mean of the limiting real-root count for tail index alpha and sign
    probabilities c (tail) and p (boundary)."""
    if not 0.0 <= c <= 1.0 or not 0.0 <= p <= 1.0:
        raise ValueError("sign probabilities must lie in [0, 1]")
    mean_l = expected_segments_closed(alpha)
    return (2.0 * c * (1.0 - c) + 0.5) * (mean_l - 2.0) + 2.0 * (p + c - 2.0 * p * c) + 1.0


@dataclass(frozen=True)
class Alpha0Distribution:
    parity: str
    support: tuple[int, ...]
    probs: tuple[float, ...]


def alpha0_real_distribution(c: float, p: float, parity: str) -> Alpha0Distribution:
    """Exact limiting real-root distribution in the slowly-varying regime:
    support {0, 2, 4} for even degree, {1, 3} for odd."""
    if not 0.0 <= c <= 1.0 or not 0.0 <= p <= 1.0:
        raise ValueError("sign probabilities must lie in [0, 1]")
    if parity == "even":
        probs = (
            0.5 * (c * p * p + (1.0 - c) * (1.0 - p) * (1.0 - p)),
            0.5 + p * (1.0 - p),
            0.5 * (c * (1.0 - p) * (1.0 - p) + (1.0 - c) * p * p),
        )
        support = (0, 2, 4)
    elif parity == "odd":
        probs = (1.0 - p - c + 2.0 * p * c, p + c - 2.0 * p * c)
        support = (1, 3)
    else:
        raise ValueError("parity must be 'even' or 'odd'")
    assert abs(sum(probs) - 1.0) < 1e-12
    return Alpha0Distribution(parity=parity, support=support, probs=probs)
