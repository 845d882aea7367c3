"""Physical constants and unit conversions.

Everything downstream works in SI with all frequencies and rates as angular
frequencies (rad/s). Inputs quoted as ordinary frequencies or in eV are
converted here, at the boundary, and nowhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 values, fixed for reproducibility."""

    hbar: float = 1.054571817e-34  # J s
    c: float = 299792458.0  # m/s
    eV_in_J: float = 1.602176634e-19  # J
    curie_in_Bq: float = 3.7e10  # 1/s


CONSTANTS = PhysicalConstants()

TWO_PI = 2.0 * math.pi


def energy_to_angular_frequency(energy_ev: float) -> float:
    """omega = E / hbar, with E given in eV. Returns rad/s."""
    if not energy_ev > 0:
        raise DomainError(f"energy must be positive, got {energy_ev} eV")
    return energy_ev * CONSTANTS.eV_in_J / CONSTANTS.hbar


def angular_frequency_to_energy(omega: float) -> float:
    """Inverse of energy_to_angular_frequency. Returns eV."""
    if not omega > 0:
        raise DomainError(f"angular frequency must be positive, got {omega} rad/s")
    return omega * CONSTANTS.hbar / CONSTANTS.eV_in_J


def energy_to_wavevector(energy_ev: float) -> float:
    """k = E / (hbar c), with E given in eV. Returns 1/m."""
    if not energy_ev > 0:
        raise DomainError(f"energy must be positive, got {energy_ev} eV")
    return energy_ev * CONSTANTS.eV_in_J / (CONSTANTS.hbar * CONSTANTS.c)


def wavevector_to_energy(k: float) -> float:
    """Inverse of energy_to_wavevector. Returns eV."""
    if not k > 0:
        raise DomainError(f"wave number must be positive, got {k} 1/m")
    return k * CONSTANTS.hbar * CONSTANTS.c / CONSTANTS.eV_in_J


def frequency_to_angular(f: float) -> float:
    """2*pi*f for an ordinary frequency in Hz."""
    if not math.isfinite(f):
        raise DomainError(f"frequency must be finite, got {f}")
    return TWO_PI * f


def angular_to_frequency(omega: float) -> float:
    """omega / (2*pi)."""
    if not math.isfinite(omega):
        raise DomainError(f"angular frequency must be finite, got {omega}")
    return omega / TWO_PI
