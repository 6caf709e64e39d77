"""Parameter sweeps over RIS-user distance, RIS phase and phase-error width.

Each sweep returns a :class:`SweepResult` that can be written as CSV (one
row per grid cell) and as JSON (axes, row-major values, metadata). Output
is deterministic for a fixed configuration, whatever the thread count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .geometry import EcefVector, to_ecef, to_geodetic
from .link_budget import TWO_PI, LinkBudget, build_link_budget, linear_to_db
from .optimizers import (
    BfgsConfig,
    McConfig,
    OptimizationResult,
    draw_errors,
    estimate_expected_power,
    optimal_phase_ideal,
    optimize_closed_form,
    optimize_stochastic,
)
from .power_model import (
    PhaseErrorModel,
    SampleMode,
    expected_power_closed_form,
    received_power,
    sinc,
)
from .scenario import Scenario

THREADS_ENV = "RIS_LINKOPT_THREADS"
DIRECT_PATH_MODES = ("geometric", "fixed")
ESTIMATORS = ("closed_form", "monte_carlo")


def linear_axis(lo: float, hi: float, count: int) -> np.ndarray:
    if int(count) != count or count < 2:
        raise ValueError(f"axis needs at least 2 points, got {count!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"axis needs finite min < max, got [{lo}, {hi}]")
    return np.linspace(lo, hi, int(count))


@dataclass
class SweepResult:
    """Axis grids plus named value grids shaped like the axis product.

    ``overlay`` arrays are aligned with the first axis (one entry per
    first-axis value). ``units`` maps every value/overlay name to its unit;
    quantities in ``"W"`` also get a dBW column on output.
    """

    name: str
    axes: list
    values: dict
    units: dict
    overlay: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(grid) for _, grid in self.axes)
        for key, arr in self.values.items():
            if np.shape(arr) != shape:
                raise ValueError(f"value grid {key!r} has shape {np.shape(arr)}, expected {shape}")
        for key, arr in self.overlay.items():
            if len(arr) != shape[0]:
                raise ValueError(f"overlay {key!r} must align with the first axis")

    @property
    def axis_names(self) -> list:
        return [name for name, _ in self.axes]

    def axis(self, name: str) -> np.ndarray:
        for n, grid in self.axes:
            if n == name:
                return grid
        raise KeyError(name)

    def _columns(self, mapping: dict) -> list:
        cols = []
        for key in mapping:
            unit = self.units.get(key, "")
            if unit == "W":
                cols += [f"{key}_w", f"{key}_dbw"]
            else:
                cols.append(key)
        return cols

    @staticmethod
    def _cells(value, unit):
        value = float(value)
        if unit == "W":
            return [value, linear_to_db(value)]
        return [value]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.axis_names + self._columns(self.values) + self._columns(self.overlay))
        grids = [grid for _, grid in self.axes]
        for index in np.ndindex(*(len(g) for g in grids)):
            row = [_fmt(grids[k][i]) for k, i in enumerate(index)]
            for key, arr in self.values.items():
                row += [_fmt(v) for v in self._cells(arr[index], self.units.get(key, ""))]
            for key, arr in self.overlay.items():
                row += [_fmt(v) for v in self._cells(arr[index[0]], self.units.get(key, ""))]
            writer.writerow(row)
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "axes": {"order": self.axis_names, **{n: _jsonable(g) for n, g in self.axes}},
            "values": {
                k: {"unit": self.units.get(k, ""), "data": _jsonable(np.ravel(v))}
                for k, v in self.values.items()
            },
            "overlay": {
                k: {"unit": self.units.get(k, ""), "data": _jsonable(v)}
                for k, v in self.overlay.items()
            },
            "extra": _jsonable(self.extra),
            "metadata": _jsonable(self.metadata),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, directory, stem: str | None = None) -> tuple[Path, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        stem = stem or self.name
        csv_path = directory / f"{stem}.csv"
        json_path = directory / f"{stem}.json"
        csv_path.write_bytes(self.to_csv().encode("utf-8"))
        json_path.write_bytes(self.to_json().encode("utf-8"))
        return csv_path, json_path


def _fmt(value) -> str:
    return repr(float(value))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return n or (os.cpu_count() or 1)


def _parallel_map(fn: Callable, items: Sequence) -> list:
    workers = min(thread_count(), max(1, len(items)))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- distance axis ---------------------------------------------------------


def user_at_distance(scenario: Scenario, d_ru: float):
    """Move the user along the great circle from the RIS through the user.

    The user keeps its altitude and ends up at straight-line distance
    ``d_ru`` from the RIS; satellite and RIS stay put.
    """
    earth = scenario.earth
    ris = np.array(to_ecef(scenario.ris, earth).as_tuple())
    usr = np.array(to_ecef(scenario.user, earth).as_tuple())
    r1 = float(np.linalg.norm(ris))
    r2 = earth.radius + scenario.user.altitude
    ris_hat = ris / r1
    tangent = usr / np.linalg.norm(usr) - np.dot(usr / np.linalg.norm(usr), ris_hat) * ris_hat
    norm_t = float(np.linalg.norm(tangent))
    if norm_t < 1e-15:
        # user straight above/below the RIS: head east
        lon = scenario.ris.longitude
        tangent, norm_t = np.array([-math.sin(lon), math.cos(lon), 0.0]), 1.0
    tangent /= norm_t
    # half-angle form: d^2 = (r1 - r2)^2 + 4 r1 r2 sin^2(psi/2), stable for short d
    half = (d_ru * d_ru - (r1 - r2) ** 2) / (4.0 * r1 * r2)
    if not 0.0 <= half <= 1.0:
        raise ValueError(f"RIS-user distance {d_ru} m is not reachable at the user altitude")
    psi = 2.0 * math.asin(math.sqrt(half))
    pos = r2 * (math.cos(psi) * ris_hat + math.sin(psi) * tangent)
    point = to_geodetic(EcefVector(*pos), earth)
    # keep the configured altitude exactly
    return type(point)(point.latitude, point.longitude, scenario.user.altitude)


def budget_at_distance(scenario: Scenario, d_ru: float, direct_path: str = "geometric") -> LinkBudget:
    """Link budget with the RIS-user distance set to ``d_ru``.

    ``direct_path="geometric"`` recomputes the satellite-user distance from
    the moved user; ``"fixed"`` keeps the reference satellite-user distance.
    """
    if direct_path not in DIRECT_PATH_MODES:
        raise ValueError(f"direct_path must be one of {DIRECT_PATH_MODES}, got {direct_path!r}")
    if not (math.isfinite(d_ru) and d_ru > 0.0):
        raise ValueError(f"d_ru must be positive, got {d_ru!r}")
    magnitude = scenario.aggregate().magnitude
    if direct_path == "geometric":
        moved = scenario.with_user(user_at_distance(scenario, d_ru))
        return build_link_budget(moved.distances(), scenario.radio, magnitude)
    d_su, d_sr, _ = scenario.distances()
    return build_link_budget((d_su, d_sr, d_ru), scenario.radio, magnitude)


# --- sweeps ----------------------------------------------------------------


def sweep_power_surface(
    scenario: Scenario,
    d_ru_values: np.ndarray,
    phi_values: np.ndarray,
    direct_path: str = "geometric",
) -> SweepResult:
    """Received power over ``d_RU x phi_R`` with the optimal phase per ``d_RU``."""
    d_ru_values = np.asarray(d_ru_values, dtype=float)
    phi_values = np.asarray(phi_values, dtype=float)

    def column(d):
        b = budget_at_distance(scenario, d, direct_path)
        phi_star = optimal_phase_ideal(b)
        return received_power(b, phi_values), phi_star, received_power(b, phi_star)

    cols = _parallel_map(column, list(d_ru_values))
    return SweepResult(
        name="power_surface",
        axes=[("d_ru_m", d_ru_values), ("phi_r_rad", phi_values)],
        values={"received_power": np.array([c[0] for c in cols])},
        units={"received_power": "W", "optimal_phase_rad": "rad", "optimal_power": "W"},
        overlay={
            "optimal_phase_rad": np.array([c[1] for c in cols]),
            "optimal_power": np.array([c[2] for c in cols]),
        },
        metadata={"direct_path": direct_path},
    )


def sweep_ris_vs_direct(
    scenario: Scenario, d_ru_values: np.ndarray, direct_path: str = "fixed"
) -> SweepResult:
    """Direct-only power against optimally phased RIS-assisted power over ``d_RU``."""
    d_ru_values = np.asarray(d_ru_values, dtype=float)

    def point(d):
        b = budget_at_distance(scenario, d, direct_path)
        return b.a_su**2, received_power(b, optimal_phase_ideal(b))

    pts = _parallel_map(point, list(d_ru_values))
    return SweepResult(
        name="ris_vs_direct",
        axes=[("d_ru_m", d_ru_values)],
        values={
            "without_ris": np.array([p[0] for p in pts]),
            "with_ris": np.array([p[1] for p in pts]),
        },
        units={"without_ris": "W", "with_ris": "W"},
        metadata={"direct_path": direct_path},
    )


def sweep_sinc(sigma_values: np.ndarray, scenario: Scenario | None = None) -> SweepResult:
    """``sinc(sigma)`` and, given a scenario, the expected power at ``phi_R = Theta``."""
    sigma_values = np.asarray(sigma_values, dtype=float)
    values = {"sinc": sinc(sigma_values)}
    units = {"sinc": "1"}
    if scenario is not None:
        b = scenario.budget()
        theta = b.theta_wrapped
        values["expected_power"] = np.array(
            [expected_power_closed_form(b, theta, PhaseErrorModel(abs(s))) for s in sigma_values]
        )
        units["expected_power"] = "W"
    return SweepResult(
        name="sinc", axes=[("sigma_rad", sigma_values)], values=values, units=units
    )


def sweep_expected_surface(
    scenario: Scenario, sigma_values: np.ndarray, phi_values: np.ndarray
) -> SweepResult:
    """Closed-form expected power over ``sigma x phi_R`` (one row per sigma)."""
    sigma_values = np.asarray(sigma_values, dtype=float)
    phi_values = np.asarray(phi_values, dtype=float)
    b = scenario.budget()
    grid = np.array(
        [expected_power_closed_form(b, phi_values, PhaseErrorModel(s)) for s in sigma_values]
    )
    return SweepResult(
        name="expected_surface",
        axes=[("sigma_rad", sigma_values), ("phi_r_rad", phi_values)],
        values={"expected_power": grid},
        units={"expected_power": "W"},
    )


def sweep_expected_vs_phase(
    scenario: Scenario,
    sigma_values: Sequence[float],
    phi_values: np.ndarray,
    mc: McConfig = McConfig(),
    bfgs: BfgsConfig = BfgsConfig(),
    mode=SampleMode.SAMPLED,
) -> SweepResult:
    """Monte Carlo expected power versus ``phi_R``, one curve per sigma.

    Every curve and its BFGS optimum use the same seeded draw, so the marked
    optimum is the maximizer of exactly the plotted curve.
    """
    mode = SampleMode.parse(mode)
    sigma_values = np.asarray(sigma_values, dtype=float)
    phi_values = np.asarray(phi_values, dtype=float)
    b = scenario.budget()

    def curve(sigma):
        err = PhaseErrorModel(sigma)
        deltas = draw_errors(err, mc)
        values = estimate_expected_power(b, phi_values, err, mc, mode, errors=deltas)
        result = optimize_stochastic(b, err, mc, bfgs, mode, errors=deltas)
        return values, result

    curves = _parallel_map(curve, list(sigma_values))
    results: list[OptimizationResult] = [c[1] for c in curves]
    return SweepResult(
        name="expected_vs_phase",
        axes=[("sigma_rad", sigma_values), ("phi_r_rad", phi_values)],
        values={"expected_power": np.array([c[0] for c in curves])},
        units={
            "expected_power": "W",
            "optimal_phase_rad": "rad",
            "optimal_power": "W",
            "converged": "1",
        },
        overlay={
            "optimal_phase_rad": np.array([r.optimal_phase for r in results]),
            "optimal_power": np.array([r.objective_value for r in results]),
            "converged": np.array([1.0 if r.converged else 0.0 for r in results]),
        },
        extra={"optima": [r.to_dict() for r in results]},
        metadata={"seed": mc.seed, "samples": mc.sample_count, "mode": mode.value},
    )


def sweep_optimal_vs_suboptimal(
    scenario: Scenario,
    sigma_values: np.ndarray,
    estimator: str = "closed_form",
    mc: McConfig = McConfig(),
    bfgs: BfgsConfig = BfgsConfig(),
    mode=SampleMode.SAMPLED,
) -> SweepResult:
    """Expected power at the BFGS optimum and at the iterate just before it.

    ``estimator="closed_form"`` optimizes the exact sinc expectation;
    ``"monte_carlo"`` optimizes the seeded sample average. The full iterate
    history per sigma is kept in ``extra`` so that other readings of the
    "just before the optimum" point can be computed afterwards.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    mode = SampleMode.parse(mode)
    sigma_values = np.asarray(sigma_values, dtype=float)
    b = scenario.budget()

    def run(sigma):
        err = PhaseErrorModel(sigma)
        if estimator == "closed_form":
            return optimize_closed_form(b, err, bfgs)
        return optimize_stochastic(b, err, mc, bfgs, mode)

    results: list[OptimizationResult] = _parallel_map(run, list(sigma_values))
    metadata = {"estimator": estimator}
    if estimator == "monte_carlo":
        metadata.update(seed=mc.seed, samples=mc.sample_count, mode=mode.value)
    return SweepResult(
        name="optimal_vs_suboptimal",
        axes=[("sigma_rad", sigma_values)],
        values={
            "optimal": np.array([r.objective_value for r in results]),
            "suboptimal": np.array([r.penultimate[1] for r in results]),
        },
        units={"optimal": "W", "suboptimal": "W"},
        extra={"optima": [r.to_dict() for r in results]},
        metadata=metadata,
    )


# --- figure presets ----------------------------------------------------------


def _figure2(sf):
    return sweep_power_surface(
        sf.scenario(), linear_axis(10.0, 1000.0, 100), linear_axis(0.0, TWO_PI, 181)
    )


def _figure3(sf):
    return sweep_ris_vs_direct(sf.scenario(), linear_axis(10.0, 1000.0, 100))


def _figure4(sf):
    return sweep_sinc(linear_axis(0.0, 10.0, 501), sf.scenario())


def _figure5(sf):
    return sweep_expected_surface(
        sf.scenario(), linear_axis(0.0, math.pi, 61), linear_axis(0.0, TWO_PI, 181)
    )


def _figure6(sf, mode=SampleMode.SAMPLED):
    return sweep_expected_vs_phase(
        sf.scenario(), (0.0, 0.5, 1.0), linear_axis(0.0, TWO_PI, 361), sf.mc, sf.bfgs, mode
    )


def _figure7(sf, mode=SampleMode.SAMPLED, estimator="closed_form"):
    return sweep_optimal_vs_suboptimal(
        sf.scenario(), linear_axis(0.0, math.pi, 32), estimator, sf.mc, sf.bfgs, mode
    )


FIGURES = {2: _figure2, 3: _figure3, 4: _figure4, 5: _figure5, 6: _figure6, 7: _figure7}


def run_figure(figure: int, sf, mode=SampleMode.SAMPLED, estimator: str = "closed_form") -> SweepResult:
    """Regenerate the data of one figure preset from a :class:`ScenarioFile`."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}")
    if figure == 6:
        result = _figure6(sf, mode)
    elif figure == 7:
        result = _figure7(sf, mode, estimator)
    else:
        result = FIGURES[figure](sf)
    result.metadata.update(figure=figure, scenario=sf.to_dict(), seed=sf.mc.seed)
    result.metadata.setdefault("mode", SampleMode.parse(mode).value)
    return result
