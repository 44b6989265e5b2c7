"""Decode-phase carbon accounting: emissions, per-1000-token intensity and the efficiency score."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

DEFAULT_X_REF = 0.001719  # kgCO2e per 1000 generated tokens


class EmissionMode(str, Enum):
    MEASURED = "measured"
    TOKEN_FACTOR = "token_factor"


class MissingMeasurement(ValueError):
    pass


class ZeroTokens(ValueError):
    pass


@dataclass(frozen=True)
class EmissionConfig:
    """How emissions are obtained for a record.

    ``measured`` uses a recorded ``ce_kg`` or ``energy_kwh * grid_intensity``;
    ``token_factor`` charges ``token_factor`` kgCO2e per 1000 generated tokens.
    """

    mode: EmissionMode = EmissionMode.MEASURED
    token_factor: float = DEFAULT_X_REF
    grid_intensity: Optional[float] = None  # kgCO2e per kWh
    x_ref: float = DEFAULT_X_REF

    def __post_init__(self):
        object.__setattr__(self, "mode", EmissionMode(self.mode))
        if not self.token_factor > 0:
            raise ValueError("token_factor must be positive")
        if self.grid_intensity is not None and not self.grid_intensity > 0:
            raise ValueError("grid_intensity must be positive")
        if not self.x_ref > 0:
            raise ValueError("x_ref must be positive")


@dataclass(frozen=True)
class DecodeMeasurement:
    n_tokens: int
    duration_s: float
    energy_kwh: Optional[float] = None
    ce_kg: Optional[float] = None

    def __post_init__(self):
        if self.n_tokens < 0:
            raise ValueError("n_tokens must be >= 0")
        if self.duration_s < 0:
            raise ValueError("duration_s must be >= 0")


def estimate_ce(m: DecodeMeasurement, cfg: EmissionConfig) -> float:
    """Emissions (kgCO2e) of one generation under ``cfg``."""
    if cfg.mode is EmissionMode.TOKEN_FACTOR:
        return m.n_tokens / 1000.0 * cfg.token_factor
    if m.ce_kg is not None:
        return m.ce_kg
    if m.energy_kwh is None:
        raise MissingMeasurement("measured mode needs ce_kg or energy_kwh")
    if cfg.grid_intensity is None:
        raise MissingMeasurement("energy_kwh given but no grid_intensity configured")
    return m.energy_kwh * cfg.grid_intensity


def carbon_intensity(ce: float, n_tokens: float) -> float:
    """kgCO2e per 1000 generated tokens."""
    if n_tokens <= 0:
        raise ZeroTokens("carbon intensity is undefined for zero generated tokens")
    return 1000.0 * ce / n_tokens


def ees(x: float, x_ref: float = DEFAULT_X_REF) -> float:
    """Environmental efficiency: 1 at zero intensity, 0.5 at the reference intensity."""
    if x < 0:
        raise ValueError("carbon intensity cannot be negative")
    if not x_ref > 0:
        raise ValueError("x_ref must be positive")
    return 1.0 / (1.0 + x / x_ref)
