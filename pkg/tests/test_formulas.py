"""Formula-route tests.

The two segment-count routes are validated against each other and against
the five analytically known values; digamma gets scipy as an external
oracle plus its defining identities.
"""
from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import digamma as scipy_digamma

from logroots.formulas import (
    EULER_GAMMA,
    Alpha0Distribution,
    alpha0_real_distribution,
    barnes_C,
    digamma,
    expected_real_roots,
    expected_segments_closed,
    expected_segments_integral,
    prob_two_segments,
)

# analytically known expected segment counts
EXACT_TABLE = {
    0.25: (1.5 - 4.0 / (3.0 * math.sqrt(3.0))) * math.pi,
    1.0 / 3.0: 4.0 * math.pi / (3.0 * math.sqrt(3.0)),
    0.5: 1.5 + math.pi**2 / 8.0,
    2.0 / 3.0: 2.0 + 2.0 * math.pi / (3.0 * math.sqrt(3.0)),
    0.75: 2.0 + math.pi / 2.0,
}


def test_digamma_against_scipy():
    rng = np.random.default_rng(1)
    xs = np.concatenate([rng.uniform(1e-3, 1.0, 50), rng.uniform(1.0, 500.0, 50)])
    for x in xs:
        assert abs(digamma(float(x)) - scipy_digamma(x)) < 1e-12


def test_digamma_identities():
    rng = np.random.default_rng(2)
    for x in rng.uniform(0.1, 20.0, 40):
        x = float(x)
        # recurrence psi(x+1) = psi(x) + 1/x
        assert digamma(x + 1.0) == pytest.approx(digamma(x) + 1.0 / x, abs=1e-12)
    for x in rng.uniform(0.05, 0.95, 20):
        x = float(x)
        # reflection psi(1-x) - psi(x) = pi / tan(pi x)
        lhs = digamma(1.0 - x) - digamma(x)
        assert lhs == pytest.approx(math.pi / math.tan(math.pi * x), abs=1e-11)


def test_digamma_special_values():
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-13)
    assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), abs=1e-13)
    with pytest.raises(ValueError):
        digamma(0.0)
    with pytest.raises(ValueError):
        digamma(-1.0)


def test_barnes_constant_analytic_values():
    # C(1) = 1/2: sum psi(m) = n H_{n-1} - n + 1 - n*gamma makes the
    # sequence 1/2 - 1/(12n) + O(n^-2)
    assert barnes_C(1.0, 1e-11) == pytest.approx(0.5, abs=1e-10)
    # C(1/2) from continuity of the closed segment-count formula at 1/2
    assert barnes_C(0.5, 1e-11) == pytest.approx(
        0.5 - math.log(2.0) - EULER_GAMMA / 2.0, abs=1e-10
    )


def test_barnes_constant_direct_sequence_oracle():
    # brute-force T(n) at one large n, no Richardson, vs the ladder value
    beta = 2.0 / 3.0
    n = 400_000
    m = np.arange(1, n + 1, dtype=float)
    t_n = float(
        math.fsum(scipy_digamma(m * beta)) - (n + 0.5 - 0.5 / beta) * math.log(n * beta) + n
    )
    assert barnes_C(beta, 1e-11) == pytest.approx(t_n, abs=1e-4)


def test_barnes_validation():
    with pytest.raises(ValueError):
        barnes_C(0.0)
    with pytest.raises(ValueError):
        barnes_C(1.0, tol=0.0)


@pytest.mark.parametrize("alpha, exact", sorted(EXACT_TABLE.items()))
def test_closed_route_hits_table(alpha, exact):
    assert abs(expected_segments_closed(alpha) - exact) < 1e-8


@pytest.mark.parametrize("alpha, exact", sorted(EXACT_TABLE.items()))
def test_integral_route_hits_table(alpha, exact):
    assert abs(expected_segments_integral(alpha) - exact) < 1e-8


def test_routes_agree_on_grid():
    for k in range(1, 20):
        alpha = 0.05 * k
        diff = abs(expected_segments_closed(alpha) - expected_segments_integral(alpha))
        assert diff < 1e-6, alpha


def test_continuity_window_is_smooth():
    # the window construction near alpha = 1/2 stays consistent with the
    # quadrature route just outside and at the center
    center = expected_segments_closed(0.5)
    assert center == pytest.approx(EXACT_TABLE[0.5], abs=1e-8)
    for alpha in (0.49991, 0.50009):
        assert expected_segments_closed(alpha) == pytest.approx(center, abs=1e-3)
    for alpha in (0.4995, 0.5005):
        assert abs(
            expected_segments_closed(alpha) - expected_segments_integral(alpha)
        ) < 1e-6


def test_boundary_behavior():
    # approaches 2 as alpha -> 0, grows without bound as alpha -> 1
    assert expected_segments_closed(0.01) == pytest.approx(2.0, abs=0.1)
    values = [expected_segments_closed(a) for a in (0.75, 0.9, 0.95, 0.99, 0.999)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] > 10.0
    with pytest.raises(ValueError):
        expected_segments_closed(0.0)
    with pytest.raises(ValueError):
        expected_segments_integral(1.0)


def test_prob_two_segments():
    assert prob_two_segments(0.25) == 0.75
    assert prob_two_segments(0.5) == 0.5
    with pytest.raises(ValueError):
        prob_two_segments(1.0)


def test_expected_real_roots_reduces_to_segment_count():
    # c = p = 1/2 collapses the formula to E L_alpha
    for alpha in (0.25, 0.5, 0.75):
        assert expected_real_roots(alpha, 0.5, 0.5) == pytest.approx(
            expected_segments_closed(alpha), abs=1e-9
        )


def _alpha0_mean_roots(c: float, p: float) -> float:
    # parity-balanced mean of the exact slowly-varying-regime root count
    even = alpha0_real_distribution(c, p, "even")
    odd = alpha0_real_distribution(c, p, "odd")
    mean_even = sum(k * q for k, q in zip(even.support, even.probs))
    mean_odd = sum(k * q for k, q in zip(odd.support, odd.probs))
    return 0.5 * (mean_even + mean_odd)


def test_alpha0_minimum_over_c():
    # min over c of the slowly-varying-regime mean is 1 + 2 min(p, 1-p)
    for p in np.linspace(0.1, 0.9, 9):
        p = float(p)
        grid = [_alpha0_mean_roots(float(c), p) for c in np.linspace(0.0, 1.0, 401)]
        assert min(grid) == pytest.approx(1.0 + 2.0 * min(p, 1.0 - p), abs=1e-12)


def test_expected_real_roots_validation():
    with pytest.raises(ValueError):
        expected_real_roots(0.5, -0.1, 0.5)
    with pytest.raises(ValueError):
        expected_real_roots(0.5, 0.5, 2.0)


def test_alpha0_distribution_fair_case():
    d = alpha0_real_distribution(0.5, 0.5, "even")
    assert d.support == (0, 2, 4)
    assert d.probs == pytest.approx((0.125, 0.75, 0.125))
    d = alpha0_real_distribution(0.5, 0.5, "odd")
    assert d.support == (1, 3)
    assert d.probs == pytest.approx((0.5, 0.5))


def test_alpha0_distribution_degenerate_signs():
    # all-positive signs: even degree keeps no real roots, odd exactly one
    d = alpha0_real_distribution(1.0, 1.0, "even")
    assert d.probs == pytest.approx((0.5, 0.5, 0.0))
    d = alpha0_real_distribution(1.0, 1.0, "odd")
    assert d.probs == pytest.approx((1.0, 0.0))


def test_alpha0_distribution_sums_to_one():
    rng = np.random.default_rng(3)
    for _ in range(50):
        c, p = float(rng.random()), float(rng.random())
        for parity in ("even", "odd"):
            d = alpha0_real_distribution(c, p, parity)
            assert sum(d.probs) == pytest.approx(1.0, abs=1e-12)
            assert isinstance(d, Alpha0Distribution)
    with pytest.raises(ValueError):
        alpha0_real_distribution(0.5, 0.5, "both")
