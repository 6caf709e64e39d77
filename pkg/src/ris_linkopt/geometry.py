"""Spherical-Earth geometry: geodetic points, ECEF vectors and link distances.

All angles are radians. The Earth is a sphere of configurable radius; there
is no ellipsoid correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MEAN_EARTH_RADIUS_M = 6371000.0


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


def _normalize_longitude(lon: float) -> float:
    """Map a longitude onto [-pi, pi)."""
    wrapped = math.fmod(lon + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class EarthModel:
    radius: float = MEAN_EARTH_RADIUS_M

    def __post_init__(self):
        _require_finite(radius=self.radius)
        if self.radius <= 0.0:
            raise ValueError(f"earth radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class GeodeticPoint:
    """A point above a spherical Earth.

    Longitude is normalized onto [-pi, pi) at construction, so ``lon`` and
    ``lon + 2*pi`` describe the same point.
    """

    latitude: float
    longitude: float
    altitude: float = 0.0

    def __post_init__(self):
        _require_finite(
            latitude=self.latitude, longitude=self.longitude, altitude=self.altitude
        )
        if abs(self.latitude) > math.pi / 2:
            raise ValueError(f"latitude {self.latitude} outside [-pi/2, pi/2]")
        if self.altitude < 0.0:
            raise ValueError(f"altitude must be >= 0, got {self.altitude}")
        # an exact -pi..pi input keeps its value; only out-of-range values wrap
        if not -math.pi <= self.longitude <= math.pi:
            object.__setattr__(self, "longitude", _normalize_longitude(self.longitude))

    @classmethod
    def from_degrees(cls, lat_deg: float, lon_deg: float, alt_m: float = 0.0):
        return cls(math.radians(lat_deg), math.radians(lon_deg), alt_m)


@dataclass(frozen=True)
class EcefVector:
    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def to_ecef(p: GeodeticPoint, earth: EarthModel = EarthModel()) -> EcefVector:
    """Earth-centered Cartesian image of ``p`` at radius ``R + altitude``."""
    r = earth.radius + p.altitude
    cos_lat = math.cos(p.latitude)
    return EcefVector(
        r * cos_lat * math.cos(p.longitude),
        r * cos_lat * math.sin(p.longitude),
        r * math.sin(p.latitude),
    )


def to_geodetic(v: EcefVector, earth: EarthModel = EarthModel()) -> GeodeticPoint:
    """Inverse of :func:`to_ecef` on the sphere."""
    _require_finite(x=v.x, y=v.y, z=v.z)
    horizontal = math.hypot(v.x, v.y)
    lat = math.atan2(v.z, horizontal)
    lon = math.atan2(v.y, v.x)
    alt = v.norm() - earth.radius
    # sub-millimetre rounding below the surface is clamped
    if -1e-6 < alt < 0.0:
        alt = 0.0
    return GeodeticPoint(lat, lon, alt)


def euclidean_distance(a: EcefVector, b: EcefVector) -> float:
    _require_finite(ax=a.x, ay=a.y, az=a.z, bx=b.x, by=b.y, bz=b.z)
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def scenario_distances(
    sat: GeodeticPoint,
    ris: GeodeticPoint,
    user: GeodeticPoint,
    earth: EarthModel = EarthModel(),
) -> tuple[float, float, float]:
    """Return ``(d_SU, d_SR, d_RU)`` in meters.

    Raises
    ------
    ValueError
        If the satellite is not above the surface or two points coincide.
    """
    if sat.altitude <= 0.0:
        raise ValueError("satellite altitude must be positive")
    s, r, u = to_ecef(sat, earth), to_ecef(ris, earth), to_ecef(user, earth)
    d_su = euclidean_distance(s, u)
    d_sr = euclidean_distance(s, r)
    d_ru = euclidean_distance(r, u)
    for name, d in (("satellite/user", d_su), ("satellite/RIS", d_sr), ("RIS/user", d_ru)):
        if d == 0.0:
            raise ValueError(f"degenerate geometry: {name} positions coincide")
    return d_su, d_sr, d_ru
