"""Path losses, RIS aggregation and the amplitude/phase link decomposition.

Everything here is linear (watts, linear gains, linear losses). Decibel
values only appear at the configuration and reporting boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s, exact
TWO_PI = 2.0 * math.pi


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0.0:
        return -math.inf
    return 10.0 * math.log10(value)


def wrap_phase(phase):
    """Wrap a phase (scalar or array) into ``[0, 2*pi)``.

    Uses ``phase - 2*pi*floor(phase / 2*pi)`` with a guard for the rounding
    case where the result lands exactly on ``2*pi``.
    """
    wrapped = phase - TWO_PI * np.floor(phase / TWO_PI)
    wrapped = np.where(wrapped >= TWO_PI, 0.0, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def wavelength(frequency: float) -> float:
    if not math.isfinite(frequency) or frequency <= 0.0:
        raise ValueError(f"frequency must be positive and finite, got {frequency!r}")
    return SPEED_OF_LIGHT / frequency


def free_space_loss(d: float, lam: float) -> float:
    """Friis free-space loss ``(4*pi*d/lam)**2`` as a linear factor."""
    if not (math.isfinite(d) and d > 0.0):
        raise ValueError(f"distance must be positive and finite, got {d!r}")
    if not (math.isfinite(lam) and lam > 0.0):
        raise ValueError(f"wavelength must be positive and finite, got {lam!r}")
    return (4.0 * math.pi * d / lam) ** 2


def free_space_loss_db(d: float, lam: float) -> float:
    return 20.0 * math.log10(4.0 * math.pi * d / lam)


@dataclass(frozen=True)
class RadioConfig:
    """Transmit power, linear antenna gains and direct-path excess loss.

    ``gain_ris_in`` and ``gain_ris_out`` are the aggregate RIS port gains at
    the common incidence and reflection angles.
    """

    frequency: float
    transmit_power: float
    gain_tx: float = 1.0
    gain_rx: float = 1.0
    gain_ris_in: float = 1.0
    gain_ris_out: float = 1.0
    excess_loss_direct_db: float = 0.0

    def __post_init__(self):
        wavelength(self.frequency)
        for name in ("transmit_power", "gain_tx", "gain_rx", "gain_ris_in", "gain_ris_out"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not (math.isfinite(self.excess_loss_direct_db) and self.excess_loss_direct_db >= 0.0):
            raise ValueError(
                f"excess_loss_direct_db must be >= 0, got {self.excess_loss_direct_db!r}"
            )

    @property
    def wavelength(self) -> float:
        return wavelength(self.frequency)


@dataclass(frozen=True)
class RisArray:
    gammas: tuple[float, ...]
    phases: tuple[float, ...]
    passive: bool = True

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        if not self.gammas:
            raise ValueError("RIS array must have at least one element")
        if len(self.gammas) != len(self.phases):
            raise ValueError("gammas and phases must have equal length")
        for i, (g, p) in enumerate(zip(self.gammas, self.phases)):
            if not math.isfinite(g) or g < 0.0:
                raise ValueError(f"element {i}: reflection magnitude must be >= 0, got {g!r}")
            if self.passive and g > 1.0:
                raise ValueError(f"element {i}: passive element needs magnitude <= 1, got {g}")
            if not math.isfinite(p):
                raise ValueError(f"element {i}: phase must be finite")

    @classmethod
    def uniform(cls, count: int, gamma: float = 1.0, phase: float = 0.0, passive: bool = True):
        """``count`` identical, co-phased elements."""
        if count < 1:
            raise ValueError("RIS element count must be >= 1")
        return cls((gamma,) * count, (phase,) * count, passive)

    @property
    def size(self) -> int:
        return len(self.gammas)


@dataclass(frozen=True)
class AggregateReflection:
    magnitude: float
    phase: float


def aggregate_reflection(ris: RisArray) -> AggregateReflection:
    """Magnitude and phase of ``sum(gamma_n * exp(-1j * phi_n))``.

    The phase is reported as the ``phi_R`` in ``|Gamma_R| exp(-1j phi_R)``,
    wrapped into [0, 2*pi); a zero sum gets phase 0.
    """
    gammas = np.asarray(ris.gammas)
    phases = np.asarray(ris.phases)
    total = np.sum(gammas * np.exp(-1j * phases))
    magnitude = float(abs(total))
    if magnitude == 0.0:
        return AggregateReflection(0.0, 0.0)
    return AggregateReflection(magnitude, wrap_phase(-float(np.angle(total))))


@dataclass(frozen=True)
class LinkBudget:
    """Everything the interference power model consumes.

    ``a_su`` and ``a_ru`` are field amplitudes in sqrt(watts); they each
    carry the transmit power exactly once. Phases are kept unwrapped.
    """

    a_su: float
    a_ru: float
    phi_su: float
    phi_sr: float
    phi_ru: float
    d_su: float = math.nan
    d_sr: float = math.nan
    d_ru: float = math.nan
    l_su: float = math.nan
    l_sr: float = math.nan
    l_ru: float = math.nan

    def __post_init__(self):
        if not (math.isfinite(self.a_su) and self.a_su > 0.0):
            raise ValueError(f"a_su must be positive, got {self.a_su!r}")
        if not (math.isfinite(self.a_ru) and self.a_ru >= 0.0):
            raise ValueError(f"a_ru must be >= 0, got {self.a_ru!r}")
        for name in ("phi_su", "phi_sr", "phi_ru"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def from_amplitudes(cls, a_su: float, a_ru: float, theta: float) -> "LinkBudget":
        """Synthetic budget with the given amplitudes and phase offset."""
        return cls(a_su=a_su, a_ru=a_ru, phi_su=theta, phi_sr=0.0, phi_ru=0.0)

    @property
    def theta(self) -> float:
        return self.phi_su - self.phi_sr - self.phi_ru

    @property
    def theta_wrapped(self) -> float:
        return wrap_phase(self.theta)

    def as_dict(self) -> dict:
        return {
            "d_su_m": self.d_su,
            "d_sr_m": self.d_sr,
            "d_ru_m": self.d_ru,
            "l_su_db": linear_to_db(self.l_su),
            "l_sr_db": linear_to_db(self.l_sr),
            "l_ru_db": linear_to_db(self.l_ru),
            "a_su": self.a_su,
            "a_ru": self.a_ru,
            "phi_su_rad": self.phi_su,
            "phi_sr_rad": self.phi_sr,
            "phi_ru_rad": self.phi_ru,
            "theta_rad": self.theta,
            "theta_wrapped_rad": self.theta_wrapped,
        }


def build_link_budget(
    distances: Sequence[float], radio: RadioConfig, ris_magnitude: float
) -> LinkBudget:
    """Assemble a :class:`LinkBudget` from ``(d_SU, d_SR, d_RU)``.

    Only the direct path carries the excess (clutter) loss; both RIS hops
    are pure free space.
    """
    d_su, d_sr, d_ru = (float(d) for d in distances)
    if not (math.isfinite(ris_magnitude) and ris_magnitude >= 0.0):
        raise ValueError(f"RIS magnitude must be >= 0, got {ris_magnitude!r}")
    lam = radio.wavelength
    l_su = free_space_loss(d_su, lam) * db_to_linear(radio.excess_loss_direct_db)
    l_sr = free_space_loss(d_sr, lam)
    l_ru = free_space_loss(d_ru, lam)
    p_t = radio.transmit_power
    a_su = math.sqrt(p_t * radio.gain_tx * radio.gain_rx / l_su)
    a_ru = (
        math.sqrt(
            p_t * radio.gain_tx * radio.gain_ris_in * radio.gain_ris_out * radio.gain_rx
            / (l_sr * l_ru)
        )
        * ris_magnitude
    )
    k = TWO_PI / lam
    return LinkBudget(
        a_su=a_su,
        a_ru=a_ru,
        phi_su=k * d_su,
        phi_sr=k * d_sr,
        phi_ru=k * d_ru,
        d_su=d_su,
        d_sr=d_sr,
        d_ru=d_ru,
        l_su=l_su,
        l_sr=l_sr,
        l_ru=l_ru,
    )
