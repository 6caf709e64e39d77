"""Two-path interference power, with and without uniform RIS phase error.

The received power as a function of the RIS phase ``phi_R`` is

    P(phi_R) = A_SU**2 + A_RU**2 + 2 A_SU A_RU cos(phi_R - Theta)

and a uniform additive error ``delta ~ U(-sigma, sigma)`` scales the cross
term by ``sinc(sigma) = sin(sigma) / sigma`` in expectation.

Functions accept scalar or array phases and broadcast with numpy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .link_budget import LinkBudget

_TAYLOR_CUTOFF = 1e-8


class SampleMode(str, enum.Enum):
    """How a single Monte Carlo sample of the received power is formed.

    ``PAPER`` keeps the ``sinc(sigma)`` factor on the cross term *and* adds
    the sampled error, so the sample mean tends to the cross term times
    ``sinc(sigma)**2``. ``SAMPLED`` drops the factor; its sample mean is an
    unbiased estimate of the closed-form expectation.
    """

    PAPER = "paper"
    SAMPLED = "sampled"

    @classmethod
    def parse(cls, value) -> "SampleMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown sample mode {value!r}; expected one of "
                + ", ".join(m.value for m in cls)
            ) from None


@dataclass(frozen=True)
class PhaseErrorModel:
    """Uniform additive phase error on ``[-sigma, sigma]`` (radians)."""

    sigma: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma!r}")


def _check_finite(name: str, value) -> None:
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{name} must be finite")


def _as_output(value):
    return float(value) if np.ndim(value) == 0 else value


def sinc(sigma):
    """Unnormalized sinc, ``sin(x)/x`` with value 1 at 0."""
    x = np.asarray(sigma, dtype=float)
    _check_finite("sigma", x)
    small = np.abs(x) < _TAYLOR_CUTOFF
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return _as_output(out)


def _cross_amplitude(budget: LinkBudget) -> float:
    return 2.0 * budget.a_su * budget.a_ru


def received_power(budget: LinkBudget, phi_r):
    """Instantaneous received power in watts at RIS phase ``phi_r``."""
    _check_finite("phi_r", phi_r)
    phase = np.asarray(phi_r, dtype=float) - budget.theta_wrapped
    p = budget.a_su**2 + budget.a_ru**2 + _cross_amplitude(budget) * np.cos(phase)
    return _as_output(p)


def expected_power_closed_form(budget: LinkBudget, phi_r, err: PhaseErrorModel):
    """Expected received power under ``U(-sigma, sigma)`` phase error."""
    _check_finite("phi_r", phi_r)
    phase = np.asarray(phi_r, dtype=float) - budget.theta_wrapped
    p = budget.a_su**2 + budget.a_ru**2 + _cross_amplitude(budget) * sinc(err.sigma) * np.cos(
        phase
    )
    return _as_output(p)


def cross_term_factor(err: PhaseErrorModel, mode) -> float:
    """Deterministic factor multiplying the sampled cross term."""
    mode = SampleMode.parse(mode)
    return sinc(err.sigma) if mode is SampleMode.PAPER else 1.0


def sample_power(budget: LinkBudget, phi_r, delta, err: PhaseErrorModel, mode=SampleMode.SAMPLED):
    """Received power for one (or an array of) sampled phase errors ``delta``."""
    factor = cross_term_factor(err, mode)
    _check_finite("phi_r", phi_r)
    _check_finite("delta", delta)
    phase = np.asarray(phi_r, dtype=float) - budget.theta_wrapped + np.asarray(delta, dtype=float)
    p = budget.a_su**2 + budget.a_ru**2 + _cross_amplitude(budget) * factor * np.cos(phase)
    return _as_output(p)
