import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ris_linkopt import LinkBudget, McConfig, PhaseErrorModel, SampleMode, draw_errors
from ris_linkopt.power_model import (
    expected_power_closed_form,
    received_power,
    sample_power,
    sinc,
)

TWO_PLUS_FOUR_OVER_PI = 3.2732395447351626862  # mpmath, 50 digits

amplitudes = st.floats(1e-3, 1e3)
phases = st.floats(-1e4, 1e4)


@pytest.mark.parametrize("offset,expected", [(0.0, 4.0), (math.pi, 0.0), (math.pi / 2, 2.0)])
def test_received_power_interference(offset, expected):
    b = LinkBudget.from_amplitudes(1.0, 1.0, 1.1)
    assert received_power(b, b.theta + offset) == pytest.approx(expected, abs=1e-12)


def test_received_power_rejects_nonfinite(unit_budget):
    with pytest.raises(ValueError):
        received_power(unit_budget, math.nan)


def test_received_power_vectorizes(unit_budget):
    phi = np.linspace(0, 6, 7)
    np.testing.assert_array_equal(
        received_power(unit_budget, phi), [received_power(unit_budget, p) for p in phi]
    )


def test_sinc_values():
    assert sinc(0.0) == 1.0
    assert sinc(math.pi) == pytest.approx(0.0, abs=1e-15)
    assert sinc(math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-15)


def test_sinc_small_argument_branch():
    for x in (1e-9, 9.99e-9, 1.01e-8, 1e-6):
        assert sinc(x) == pytest.approx(1 - x * x / 6, rel=1e-15)
        assert sinc(-x) == sinc(x)


@given(st.floats(-100, 100))
def test_sinc_even(x):
    assert sinc(x) == sinc(-x)


def test_closed_form_reduces_to_ideal_at_zero_error():
    rng = np.random.default_rng(3)
    b = LinkBudget.from_amplitudes(1.7, 0.4, 2.2)
    phis = rng.uniform(-10, 10, 100)
    np.testing.assert_array_equal(
        expected_power_closed_form(b, phis, PhaseErrorModel(0.0)), received_power(b, phis)
    )


def test_closed_form_at_first_sinc_zero():
    b = LinkBudget.from_amplitudes(1.0, 1.0, 0.3)
    for phi in (0.0, 1.0, 4.0):
        assert expected_power_closed_form(b, phi, PhaseErrorModel(math.pi)) == pytest.approx(
            2.0, abs=1e-14
        )


def test_closed_form_half_pi_frozen_value():
    b = LinkBudget.from_amplitudes(1.0, 1.0, 0.3)
    value = expected_power_closed_form(b, b.theta, PhaseErrorModel(math.pi / 2))
    assert value == pytest.approx(TWO_PLUS_FOUR_OVER_PI, rel=1e-14)


@pytest.mark.parametrize("sigma", [0.05, 0.5, 1.3, 2.9, 4.0])
@pytest.mark.parametrize("phi", [0.0, 1.0, 2.5])
def test_closed_form_matches_quadrature(sigma, phi):
    b = LinkBudget.from_amplitudes(1.3, 0.6, 0.9)

    def integrand(delta):
        x = b.a_su**2 + b.a_ru**2 + 2 * b.a_su * b.a_ru * math.cos(phi - b.theta + delta)
        return x / (2 * sigma)

    value, _ = integrate.quad(integrand, -sigma, sigma, epsabs=1e-13, epsrel=1e-13)
    assert expected_power_closed_form(b, phi, PhaseErrorModel(sigma)) == pytest.approx(
        value, rel=1e-12
    )


def test_phase_error_model_validation():
    with pytest.raises(ValueError):
        PhaseErrorModel(-0.1)
    with pytest.raises(ValueError):
        PhaseErrorModel(math.inf)


def test_sample_power_zero_error_matches_ideal(unit_budget):
    for phi in (0.0, 2.0, 5.0):
        assert sample_power(unit_budget, phi, 0.0, PhaseErrorModel(0.7), "sampled") == (
            received_power(unit_budget, phi)
        )


def test_paper_mode_keeps_sinc_factor():
    b = LinkBudget.from_amplitudes(1.0, 1.0, 0.0)
    value = sample_power(b, 0.3, 0.0, PhaseErrorModel(math.pi), SampleMode.PAPER)
    assert value == pytest.approx(2.0, abs=1e-14)


def test_unknown_mode():
    with pytest.raises(ValueError, match="unknown sample mode"):
        sample_power(LinkBudget.from_amplitudes(1, 1, 0), 0.0, 0.0, PhaseErrorModel(0.1), "exact")


def test_sampled_mean_million_draws():
    b = LinkBudget.from_amplitudes(1.2, 0.8, 0.4)
    err = PhaseErrorModel(0.5)
    deltas = draw_errors(err, McConfig(1_000_000, 2024))
    samples = sample_power(b, b.theta, deltas, err, "sampled")
    se = samples.std(ddof=1) / math.sqrt(samples.size)
    assert abs(samples.mean() - expected_power_closed_form(b, b.theta, err)) < 3 * se


def test_expectation_consistency_repeated_trials():
    b = LinkBudget.from_amplitudes(1.0, 0.9, 2.0)
    err = PhaseErrorModel(1.1)
    phi = 1.4
    target = expected_power_closed_form(b, phi, err)
    k = 100_000
    hits = 0
    for seed in range(100):
        s = sample_power(b, phi, draw_errors(err, McConfig(k, seed)), err, "sampled")
        hits += abs(s.mean() - target) < 4 * s.std(ddof=1) / math.sqrt(k)
    assert hits >= 99


@settings(max_examples=300)
@given(amplitudes, amplitudes, phases, phases)
def test_power_bounds(a_su, a_ru, theta, phi):
    b = LinkBudget.from_amplitudes(a_su, a_ru, theta)
    p = received_power(b, phi)
    scale = (a_su + a_ru) ** 2
    assert (a_su - a_ru) ** 2 - 1e-12 * scale <= p <= scale * (1 + 1e-12)


@settings(max_examples=200)
@given(amplitudes, amplitudes, phases)
def test_bounds_attained(a_su, a_ru, theta):
    b = LinkBudget.from_amplitudes(a_su, a_ru, theta)
    scale = (a_su + a_ru) ** 2
    assert received_power(b, theta) == pytest.approx(scale, rel=1e-12)
    assert received_power(b, theta + math.pi) == pytest.approx((a_su - a_ru) ** 2, abs=1e-12 * scale)


@settings(max_examples=200)
@given(amplitudes, amplitudes, phases, st.floats(-100, 100))
def test_periodicity(a_su, a_ru, theta, phi):
    b = LinkBudget.from_amplitudes(a_su, a_ru, theta)
    assert received_power(b, phi + 2 * math.pi) == pytest.approx(received_power(b, phi), rel=1e-9)


def test_optimum_value_non_increasing_in_sigma():
    b = LinkBudget.from_amplitudes(1.0, 0.5, 3.0)
    sigmas = np.linspace(0.0, math.pi, 2001)
    values = [expected_power_closed_form(b, b.theta, PhaseErrorModel(s)) for s in sigmas]
    assert np.all(np.diff(values) <= 1e-15)


@pytest.mark.parametrize("sigma", [0.0, 0.3, 1.0, 2.0, 3.0])
def test_argmax_invariant_under_sigma(sigma):
    b = LinkBudget.from_amplitudes(1.0, 0.7, -41.3)
    grid = np.linspace(0.0, 2 * math.pi, 100_000, endpoint=False)
    step = grid[1]
    best = grid[np.argmax(expected_power_closed_form(b, grid, PhaseErrorModel(sigma)))]
    d = abs(best - b.theta_wrapped)
    assert min(d, 2 * math.pi - d) <= step
