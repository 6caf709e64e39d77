"""RIS phase optimization.

Two routes:

* error-free: the closed-form optimum ``Theta mod 2*pi``;
* uniform phase error: sample-average approximation (SAA) of the expected
  received power over one frozen set of drawn errors, maximized by scalar
  BFGS with a Wolfe line search and a few equally spaced starts.

The BFGS loop runs on the cross term normalized by ``2*A_SU*A_RU`` with the
constant ``A_SU**2 + A_RU**2`` removed. That is an affine change of the
objective, so the maximizer is unchanged, but it makes the convergence
tolerances meaningful when the received power itself is ~1e-15 W.
Reported objective values are always watts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .bfgs import minimize_scalar_bfgs
from .link_budget import TWO_PI, LinkBudget, wrap_phase
from .power_model import (
    PhaseErrorModel,
    SampleMode,
    cross_term_factor,
    expected_power_closed_form,
    sample_power,
    sinc,
)

_CHUNK = 2**22  # max phase x sample products per vectorized block


@dataclass(frozen=True)
class McConfig:
    sample_count: int = 100_000
    seed: int = 42

    def __post_init__(self):
        if int(self.sample_count) != self.sample_count or self.sample_count < 1:
            raise ValueError(f"sample_count must be a positive integer, got {self.sample_count!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class BfgsConfig:
    initial_phase: float = 0.0
    initial_hessian: float = 1.0
    tolerance: float = 1e-8
    max_iterations: int = 200
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    multistart_count: int = 4

    def __post_init__(self):
        if not math.isfinite(self.initial_phase):
            raise ValueError("initial_phase must be finite")
        if not (math.isfinite(self.initial_hessian) and self.initial_hessian > 0.0):
            raise ValueError("initial_hessian must be positive")
        if not (math.isfinite(self.tolerance) and self.tolerance > 0.0):
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.wolfe_c1 < self.wolfe_c2 < 1.0:
            raise ValueError("Wolfe constants need 0 < c1 < c2 < 1")
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a phase optimization.

    ``history`` holds ``(phase, objective_watts)`` for every accepted
    iterate of the winning start, unwrapped, starting with the start point.
    ``final_gradient_norm`` is measured on the normalized objective and is
    therefore dimensionless.
    """

    optimal_phase: float
    objective_value: float
    iterations: int
    converged: bool
    final_gradient_norm: float
    stop_reason: str = "gradient"
    start_phase: float = 0.0
    history: tuple = field(default=(), repr=False)

    @property
    def penultimate(self) -> tuple[float, float]:
        """Last iterate before the final one (the start if there was no step)."""
        if len(self.history) >= 2:
            return self.history[-2]
        return self.history[-1]

    def to_dict(self) -> dict:
        return {
            "optimal_phase_rad": self.optimal_phase,
            "objective_value_w": self.objective_value,
            "iterations": self.iterations,
            "converged": self.converged,
            "final_gradient_norm": self.final_gradient_norm,
            "stop_reason": self.stop_reason,
            "start_phase_rad": self.start_phase,
            "history": [{"phase_rad": p, "objective_w": v} for p, v in self.history],
        }


def optimal_phase_ideal(budget: LinkBudget) -> float:
    """Error-free optimum ``Theta - 2*pi*floor(Theta / 2*pi)``."""
    return wrap_phase(budget.theta)


def stationary_phases(budget: LinkBudget, n_values: Iterable[int]) -> np.ndarray:
    """``Theta + pi*n`` for each ``n``; even ``n`` are maxima, odd ``n`` minima."""
    n = np.asarray(list(n_values), dtype=float)
    return budget.theta + math.pi * n


def draw_errors(err: PhaseErrorModel, mc: McConfig) -> np.ndarray:
    """``K`` errors ``sigma*(2u - 1)`` from a PCG64 stream seeded with ``mc.seed``."""
    rng = np.random.Generator(np.random.PCG64(mc.seed))
    u = rng.random(mc.sample_count)
    return err.sigma * (2.0 * u - 1.0)


def _mean_over_samples(func, phis: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Row means of ``func(phi[:, None] + delta[None, :])`` computed in blocks."""
    out = np.empty(phis.shape[0])
    rows = max(1, _CHUNK // max(1, deltas.shape[0]))
    for start in range(0, phis.shape[0], rows):
        block = phis[start : start + rows, None] + deltas[None, :]
        out[start : start + rows] = np.mean(func(block), axis=1)
    return out


def estimate_expected_power(
    budget: LinkBudget,
    phi_r,
    err: PhaseErrorModel,
    mc: McConfig = McConfig(),
    mode=SampleMode.SAMPLED,
    errors: np.ndarray | None = None,
):
    """Monte Carlo mean of :func:`sample_power` over the seeded error draws.

    ``errors`` may be passed to reuse an existing draw; ``phi_r`` may be an
    array, in which case every phase is evaluated on the same samples.
    """
    deltas = draw_errors(err, mc) if errors is None else np.asarray(errors, dtype=float)
    if deltas.size == 0:
        raise ValueError("need at least one error sample")
    if np.ndim(phi_r) == 0:
        return float(np.mean(sample_power(budget, float(phi_r), deltas, err, mode)))
    phis = np.asarray(phi_r, dtype=float)
    if not np.all(np.isfinite(phis)):
        raise ValueError("phi_r must be finite")
    flat = phis.ravel()
    means = _mean_over_samples(
        lambda x: sample_power(budget, x, 0.0, err, mode), flat, deltas
    )
    return means.reshape(phis.shape)


def analytic_gradient(
    budget: LinkBudget,
    phi_r: float,
    errors,
    err: PhaseErrorModel,
    mode=SampleMode.SAMPLED,
) -> float:
    """Derivative of the sample-average power with respect to ``phi_r`` (W/rad)."""
    deltas = np.asarray(errors, dtype=float)
    if deltas.size == 0:
        raise ValueError("need at least one error sample")
    factor = cross_term_factor(err, mode)
    phase = phi_r - budget.theta_wrapped + deltas
    return float(-2.0 * budget.a_su * budget.a_ru * factor * np.mean(np.sin(phase)))


class _NormalizedObjective:
    """Negated, normalized cross term ``-factor * mean(cos(phi - Theta + delta))``."""

    def __init__(self, budget: LinkBudget, deltas: np.ndarray, factor: float):
        self.theta = budget.theta_wrapped
        self.deltas = np.asarray(deltas, dtype=float)
        self.factor = factor if budget.a_ru > 0.0 else 0.0

    def fun(self, phi: float) -> float:
        return float(-self.factor * np.mean(np.cos(phi - self.theta + self.deltas)))

    def grad(self, phi: float) -> float:
        return float(self.factor * np.mean(np.sin(phi - self.theta + self.deltas)))


def _optimize(objective: _NormalizedObjective, to_watts, bfgs: BfgsConfig) -> OptimizationResult:
    best = None
    for k in range(bfgs.multistart_count):
        start = bfgs.initial_phase + TWO_PI * k / bfgs.multistart_count
        trace = minimize_scalar_bfgs(
            objective.fun,
            objective.grad,
            start,
            h0=bfgs.initial_hessian,
            tol=bfgs.tolerance,
            max_iterations=bfgs.max_iterations,
            c1=bfgs.wolfe_c1,
            c2=bfgs.wolfe_c2,
        )
        if best is None or trace.fun < best[1].fun:
            best = (start, trace)
    start, trace = best
    return OptimizationResult(
        optimal_phase=wrap_phase(trace.x),
        objective_value=to_watts(trace.x),
        iterations=trace.iterations,
        converged=trace.converged,
        final_gradient_norm=abs(trace.grad),
        stop_reason=trace.stop_reason,
        start_phase=start,
        history=tuple((x, to_watts(x)) for x, _ in trace.history),
    )


def optimize_stochastic(
    budget: LinkBudget,
    err: PhaseErrorModel,
    mc: McConfig = McConfig(),
    bfgs: BfgsConfig = BfgsConfig(),
    mode=SampleMode.SAMPLED,
    errors: np.ndarray | None = None,
) -> OptimizationResult:
    """Maximize the sample-average expected power over ``phi_R``.

    The errors are drawn once (or taken from ``errors``) and reused for
    every iteration and every start, so the objective is deterministic.
    """
    mode = SampleMode.parse(mode)
    deltas = draw_errors(err, mc) if errors is None else np.asarray(errors, dtype=float)
    objective = _NormalizedObjective(budget, deltas, cross_term_factor(err, mode))

    def to_watts(phi):
        return estimate_expected_power(budget, phi, err, mc, mode, errors=deltas)

    return _optimize(objective, to_watts, bfgs)


def optimize_closed_form(
    budget: LinkBudget, err: PhaseErrorModel, bfgs: BfgsConfig = BfgsConfig()
) -> OptimizationResult:
    """BFGS on the exact expectation ``A^2 + B^2 + 2AB sinc(sigma) cos(phi - Theta)``."""
    objective = _NormalizedObjective(budget, np.zeros(1), sinc(err.sigma))

    def to_watts(phi):
        return expected_power_closed_form(budget, phi, err)

    return _optimize(objective, to_watts, bfgs)


def grid_argmax(values: np.ndarray, grid: np.ndarray) -> float:
    return float(grid[int(np.argmax(values))])


def phase_distance(a, b):
    """Absolute angular distance on the circle, in [0, pi]."""
    d = np.abs(wrap_phase(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    d = np.minimum(d, TWO_PI - d)
    return float(d) if np.ndim(d) == 0 else d


__all__ = [
    "BfgsConfig",
    "McConfig",
    "OptimizationResult",
    "analytic_gradient",
    "draw_errors",
    "estimate_expected_power",
    "grid_argmax",
    "optimal_phase_ideal",
    "optimize_closed_form",
    "optimize_stochastic",
    "phase_distance",
    "stationary_phases",
]
