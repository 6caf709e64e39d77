"""Received-power modeling and RIS phase optimization for satellite links.

The package models a satellite-to-user link with an additional path
reflected by a reconfigurable intelligent surface (RIS). It provides the
closed-form optimal RIS phase for the error-free case and a sample-average
BFGS optimizer for the case of uniform phase errors.
"""

from .geometry import (
    EarthModel,
    EcefVector,
    GeodeticPoint,
    euclidean_distance,
    scenario_distances,
    to_ecef,
)
from .link_budget import (
    AggregateReflection,
    LinkBudget,
    RadioConfig,
    RisArray,
    aggregate_reflection,
    build_link_budget,
    free_space_loss,
    wavelength,
    wrap_phase,
)
from .power_model import (
    PhaseErrorModel,
    SampleMode,
    expected_power_closed_form,
    received_power,
    sample_power,
    sinc,
)
from .optimizers import (
    BfgsConfig,
    McConfig,
    OptimizationResult,
    analytic_gradient,
    draw_errors,
    estimate_expected_power,
    optimal_phase_ideal,
    optimize_stochastic,
    stationary_phases,
)
from .scenario import Scenario, ScenarioFile, reference_scenario

__version__ = "0.1.0"

__all__ = [
    "AggregateReflection",
    "BfgsConfig",
    "EarthModel",
    "EcefVector",
    "GeodeticPoint",
    "LinkBudget",
    "McConfig",
    "OptimizationResult",
    "PhaseErrorModel",
    "RadioConfig",
    "RisArray",
    "SampleMode",
    "Scenario",
    "ScenarioFile",
    "aggregate_reflection",
    "analytic_gradient",
    "build_link_budget",
    "draw_errors",
    "estimate_expected_power",
    "euclidean_distance",
    "expected_power_closed_form",
    "free_space_loss",
    "optimal_phase_ideal",
    "optimize_stochastic",
    "received_power",
    "reference_scenario",
    "sample_power",
    "scenario_distances",
    "sinc",
    "stationary_phases",
    "to_ecef",
    "wavelength",
    "wrap_phase",
]
