"""Scenario description and the JSON scenario-file schema.

:class:`Scenario` is the physical configuration in internal units (radians,
linear gains). :class:`ScenarioFile` mirrors the JSON file in file units
(degrees, dBi) with every default filled in; :meth:`ScenarioFile.to_dict`
serializes it back so that re-parsing gives an identical object.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .geometry import EarthModel, GeodeticPoint, MEAN_EARTH_RADIUS_M, scenario_distances
from .link_budget import (
    AggregateReflection,
    LinkBudget,
    RadioConfig,
    RisArray,
    aggregate_reflection,
    build_link_budget,
    db_to_linear,
)
from .optimizers import BfgsConfig, McConfig
from .power_model import PhaseErrorModel


class ScenarioError(ValueError):
    """Invalid scenario content; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ScenarioParseError(ValueError):
    """The scenario file is not valid JSON."""


@dataclass(frozen=True)
class Scenario:
    satellite: GeodeticPoint
    ris: GeodeticPoint
    user: GeodeticPoint
    radio: RadioConfig
    ris_array: RisArray
    earth: EarthModel = EarthModel()

    def distances(self) -> tuple[float, float, float]:
        return scenario_distances(self.satellite, self.ris, self.user, self.earth)

    def aggregate(self) -> AggregateReflection:
        return aggregate_reflection(self.ris_array)

    def budget(self) -> LinkBudget:
        return build_link_budget(self.distances(), self.radio, self.aggregate().magnitude)

    def with_user(self, user: GeodeticPoint) -> "Scenario":
        return dataclasses.replace(self, user=user)


# --- file schema -----------------------------------------------------------


@dataclass(frozen=True)
class SiteSpec:
    lat_deg: float
    lon_deg: float
    alt_m: float = 0.0

    def point(self) -> GeodeticPoint:
        return GeodeticPoint.from_degrees(self.lat_deg, self.lon_deg, self.alt_m)


@dataclass(frozen=True)
class RisSpec:
    lat_deg: float
    lon_deg: float
    alt_m: float = 0.0
    # explicit (gamma, phase_rad) pairs, or None for the count/gamma form
    elements: tuple | None = None
    count: int = 1
    gamma: float = 1.0
    coherent: bool = True
    passive: bool = True

    def array(self) -> RisArray:
        if self.elements is not None:
            gammas = [g for g, _ in self.elements]
            phases = [p for _, p in self.elements]
            return RisArray(gammas, phases, self.passive)
        if self.coherent:
            return RisArray.uniform(self.count, self.gamma, 0.0, self.passive)
        # an unconfigured surface: phases spread evenly around the circle
        phases = [2.0 * math.pi * n / self.count for n in range(self.count)]
        return RisArray([self.gamma] * self.count, phases, self.passive)


@dataclass(frozen=True)
class RadioSpec:
    frequency_hz: float
    tx_power_w: float
    gain_tx_dbi: float
    gain_rx_dbi: float
    gain_ris_in_dbi: float
    gain_ris_out_dbi: float
    excess_loss_db: float = 0.0

    def config(self) -> RadioConfig:
        return RadioConfig(
            frequency=self.frequency_hz,
            transmit_power=self.tx_power_w,
            gain_tx=db_to_linear(self.gain_tx_dbi),
            gain_rx=db_to_linear(self.gain_rx_dbi),
            gain_ris_in=db_to_linear(self.gain_ris_in_dbi),
            gain_ris_out=db_to_linear(self.gain_ris_out_dbi),
            excess_loss_direct_db=self.excess_loss_db,
        )


@dataclass(frozen=True)
class ScenarioFile:
    satellite: SiteSpec
    ris: RisSpec
    user: SiteSpec
    radio: RadioSpec
    error: PhaseErrorModel = PhaseErrorModel()
    mc: McConfig = McConfig()
    bfgs: BfgsConfig = BfgsConfig()
    earth_radius_m: float = MEAN_EARTH_RADIUS_M

    def scenario(self) -> Scenario:
        return Scenario(
            satellite=self.satellite.point(),
            ris=GeodeticPoint.from_degrees(self.ris.lat_deg, self.ris.lon_deg, self.ris.alt_m),
            user=self.user.point(),
            radio=self.radio.config(),
            ris_array=self.ris.array(),
            earth=EarthModel(self.earth_radius_m),
        )

    def to_dict(self) -> dict:
        ris: dict[str, Any] = {
            "lat_deg": self.ris.lat_deg,
            "lon_deg": self.ris.lon_deg,
            "alt_m": self.ris.alt_m,
            "passive": self.ris.passive,
        }
        if self.ris.elements is not None:
            ris["elements"] = [{"gamma": g, "phase_rad": p} for g, p in self.ris.elements]
        else:
            ris["elements"] = {
                "count": self.ris.count,
                "gamma": self.ris.gamma,
                "coherent": self.ris.coherent,
            }
        return {
            "satellite": dataclasses.asdict(self.satellite),
            "ris": ris,
            "user": dataclasses.asdict(self.user),
            "radio": {
                "frequency_hz": self.radio.frequency_hz,
                "tx_power_w": self.radio.tx_power_w,
                "gains_dbi": {
                    "tx": self.radio.gain_tx_dbi,
                    "rx": self.radio.gain_rx_dbi,
                    "ris_in": self.radio.gain_ris_in_dbi,
                    "ris_out": self.radio.gain_ris_out_dbi,
                },
                "excess_loss_db": self.radio.excess_loss_db,
            },
            "error": {"sigma_rad": self.error.sigma},
            "mc": {"samples": self.mc.sample_count, "seed": self.mc.seed},
            "bfgs": {
                "tolerance": self.bfgs.tolerance,
                "max_iterations": self.bfgs.max_iterations,
                "multistart": self.bfgs.multistart_count,
                "wolfe_c1": self.bfgs.wolfe_c1,
                "wolfe_c2": self.bfgs.wolfe_c2,
            },
            "earth": {"radius_m": self.earth_radius_m},
        }


_MISSING = object()


def _section(data: dict, key: str, path: str, required: bool = True) -> dict:
    value = data.get(key, _MISSING)
    full = f"{path}.{key}" if path else key
    if value is _MISSING:
        if required:
            raise ScenarioError(full, "required section is missing")
        return {}
    if not isinstance(value, dict):
        raise ScenarioError(full, "expected an object")
    return value


def _number(data: dict, key: str, path: str, default=_MISSING) -> float:
    full = f"{path}.{key}"
    value = data.get(key, default)
    if value is _MISSING:
        raise ScenarioError(full, "required field is missing")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(full, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioError(full, "must be finite")
    return float(value)


def _integer(data: dict, key: str, path: str, default=_MISSING) -> int:
    full = f"{path}.{key}"
    value = data.get(key, default)
    if value is _MISSING:
        raise ScenarioError(full, "required field is missing")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(full, f"expected an integer, got {value!r}")
    return value


def _boolean(data: dict, key: str, path: str, default: bool) -> bool:
    value = data.get(key, default)
    if not isinstance(value, bool):
        raise ScenarioError(f"{path}.{key}", f"expected true/false, got {value!r}")
    return value


def _site(data: dict, key: str, alt_default=_MISSING) -> SiteSpec:
    sec = _section(data, key, "")
    lat = _number(sec, "lat_deg", key)
    if abs(lat) > 90.0:
        raise ScenarioError(f"{key}.lat_deg", "latitude must lie in [-90, 90]")
    lon = _number(sec, "lon_deg", key)
    alt = _number(sec, "alt_m", key, alt_default)
    if alt < 0.0:
        raise ScenarioError(f"{key}.alt_m", "altitude must be >= 0")
    return SiteSpec(lat, lon, alt)


def _ris(data: dict) -> RisSpec:
    site = _site(data, "ris", 0.0)
    sec = data["ris"]
    passive = _boolean(sec, "passive", "ris", True)
    elements = sec.get("elements", _MISSING)
    if elements is _MISSING:
        raise ScenarioError("ris.elements", "required field is missing")
    if isinstance(elements, list):
        if not elements:
            raise ScenarioError("ris.elements", "element list is empty")
        pairs = []
        for i, item in enumerate(elements):
            path = f"ris.elements[{i}]"
            if not isinstance(item, dict):
                raise ScenarioError(path, "expected an object with gamma and phase_rad")
            gamma = _number(item, "gamma", path)
            phase = _number(item, "phase_rad", path)
            if gamma < 0.0:
                raise ScenarioError(f"{path}.gamma", "must be >= 0")
            if passive and gamma > 1.0:
                raise ScenarioError(f"{path}.gamma", "passive elements need gamma <= 1")
            pairs.append((gamma, phase))
        return RisSpec(site.lat_deg, site.lon_deg, site.alt_m, tuple(pairs), passive=passive)
    if isinstance(elements, dict):
        count = _integer(elements, "count", "ris.elements")
        if count < 1:
            raise ScenarioError("ris.elements.count", "must be >= 1")
        gamma = _number(elements, "gamma", "ris.elements", 1.0)
        if gamma < 0.0 or (passive and gamma > 1.0):
            raise ScenarioError(
                "ris.elements.gamma", "must be in [0, 1] for a passive RIS, >= 0 otherwise"
            )
        coherent = _boolean(elements, "coherent", "ris.elements", True)
        return RisSpec(
            site.lat_deg,
            site.lon_deg,
            site.alt_m,
            None,
            count=count,
            gamma=gamma,
            coherent=coherent,
            passive=passive,
        )
    raise ScenarioError("ris.elements", "expected a list of elements or a {count, gamma} object")


def _radio(data: dict) -> RadioSpec:
    sec = _section(data, "radio", "")
    freq = _number(sec, "frequency_hz", "radio")
    if freq <= 0.0:
        raise ScenarioError("radio.frequency_hz", "must be positive")
    power = _number(sec, "tx_power_w", "radio")
    if power <= 0.0:
        raise ScenarioError("radio.tx_power_w", "must be positive")
    gains = _section(sec, "gains_dbi", "radio")
    g = {k: _number(gains, k, "radio.gains_dbi") for k in ("tx", "rx", "ris_in", "ris_out")}
    excess = _number(sec, "excess_loss_db", "radio", 0.0)
    if excess < 0.0:
        raise ScenarioError("radio.excess_loss_db", "must be >= 0")
    return RadioSpec(freq, power, g["tx"], g["rx"], g["ris_in"], g["ris_out"], excess)


def _wrap(path: str, build):
    try:
        return build()
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from None


def parse_scenario(data: Any) -> ScenarioFile:
    """Validate a decoded JSON document and apply defaults."""
    if not isinstance(data, dict):
        raise ScenarioError("<root>", "expected a JSON object")
    satellite = _site(data, "satellite")
    if satellite.alt_m <= 0.0:
        raise ScenarioError("satellite.alt_m", "satellite altitude must be positive")
    ris = _ris(data)
    user = _site(data, "user", 0.0)
    radio = _radio(data)

    err_sec = _section(data, "error", "", required=False)
    sigma = _number(err_sec, "sigma_rad", "error", 0.0)
    error = _wrap("error.sigma_rad", lambda: PhaseErrorModel(sigma))

    mc_sec = _section(data, "mc", "", required=False)
    samples = _integer(mc_sec, "samples", "mc", 100_000)
    if samples < 1:
        raise ScenarioError("mc.samples", "must be >= 1")
    seed = _integer(mc_sec, "seed", "mc", 42)
    mc = _wrap("mc.seed", lambda: McConfig(samples, seed))

    b = _section(data, "bfgs", "", required=False)
    tol = _number(b, "tolerance", "bfgs", 1e-8)
    if tol <= 0.0:
        raise ScenarioError("bfgs.tolerance", "must be positive")
    max_iter = _integer(b, "max_iterations", "bfgs", 200)
    if max_iter < 1:
        raise ScenarioError("bfgs.max_iterations", "must be >= 1")
    multistart = _integer(b, "multistart", "bfgs", 4)
    if multistart < 1:
        raise ScenarioError("bfgs.multistart", "must be >= 1")
    c1 = _number(b, "wolfe_c1", "bfgs", 1e-4)
    c2 = _number(b, "wolfe_c2", "bfgs", 0.9)
    bfgs = _wrap(
        "bfgs.wolfe_c1",
        lambda: BfgsConfig(
            tolerance=tol,
            max_iterations=max_iter,
            multistart_count=multistart,
            wolfe_c1=c1,
            wolfe_c2=c2,
        ),
    )

    earth_sec = _section(data, "earth", "", required=False)
    radius = _number(earth_sec, "radius_m", "earth", MEAN_EARTH_RADIUS_M)
    if radius <= 0.0:
        raise ScenarioError("earth.radius_m", "must be positive")

    sf = ScenarioFile(satellite, ris, user, radio, error, mc, bfgs, radius)
    # domain checks that need the whole configuration
    scenario = _wrap("ris.elements", sf.scenario)
    _wrap("user", scenario.distances)
    return sf


def load_scenario(path) -> ScenarioFile:
    """Read and validate a scenario file.

    Raises ``FileNotFoundError``, :class:`ScenarioParseError` or
    :class:`ScenarioError`.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: invalid JSON ({exc})") from None
    return parse_scenario(data)


REFERENCE_SCENARIO = {
    "satellite": {"lat_deg": 0.0, "lon_deg": 0.0, "alt_m": 550000.0},
    "ris": {
        "lat_deg": 0.0,
        "lon_deg": math.degrees(0.01),
        "alt_m": 0.0,
        "elements": {"count": 100, "gamma": 1.0, "coherent": True},
        "passive": True,
    },
    "user": {"lat_deg": 0.0, "lon_deg": math.degrees(0.02), "alt_m": 0.0},
    "radio": {
        "frequency_hz": 2.0e9,
        "tx_power_w": 10.0,
        "gains_dbi": {"tx": 30.0, "rx": 0.0, "ris_in": 10.0, "ris_out": 10.0},
        "excess_loss_db": 0.0,
    },
    "error": {"sigma_rad": 0.5},
    "mc": {"samples": 100000, "seed": 42},
}


def reference_scenario() -> ScenarioFile:
    """LEO reference: 550 km satellite over (0, 0), RIS and user on the equator."""
    return parse_scenario(REFERENCE_SCENARIO)
