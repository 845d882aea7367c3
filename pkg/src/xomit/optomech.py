"""Optomechanical linearization chain.

From laser power and cavity geometry to the quantities the spectrum needs:
mean intracavity photon number, linearized coupling G, optical spring and
damping shifts, effective mechanical frequency and damping, zero-point
fluctuation, averaged cavity length/frequency shifts, and the total
decoherence rate s = Gamma/2 + kappa + gamma_m of the bound nuclide.

Y_ZPF depends on omega_m, omega_m on the spring shift, the spring shift on G,
and G on Y_ZPF (through the vacuum coupling), so derive() closes the loop by
fixed-point iteration; for realistic parameters the shift is ~1e-9 relative
and the loop converges in two passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, DomainError
from .franck_condon import Validity, validity
from .nuclides import NuclideTransition, lamb_dicke
from .units import CONSTANTS, TWO_PI

HBAR = CONSTANTS.hbar

# Demonstrated reference setup: 0.14 ug lever, 25 mm cavity, quoted vacuum
# coupling 2*pi*3.9 Hz. All rates in rad/s.
DEFAULT_MASS_KG = 0.14e-9
DEFAULT_LENGTH_M = 0.025
DEFAULT_OMEGA0 = TWO_PI * 0.95e6
DEFAULT_GAMMA0 = TWO_PI * 0.14e3
DEFAULT_KAPPA = TWO_PI * 0.2e6
DEFAULT_OMEGA_C = 1e15
DEFAULT_G0 = TWO_PI * 3.9
DEFAULT_N_PHONON = 5e6


@dataclass(frozen=True)
class OptomechConfig:
    """User-specified physical inputs. Angular frequencies in rad/s.

    delta_c is the effective laser-cavity detuning; None selects red-detuned
    operation delta_c = -omega_m. g0 is the vacuum optomechanical coupling;
    None derives it from geometry as omega_c * Y_ZPF / L, the default pins the
    demonstrated value. g_override bypasses the power chain entirely.
    omega_rabi None resolves to 1e-3 * G (floored at 1e-3 * kappa when G = 0);
    v_photon None resolves to the mean cavity photon number.
    """

    mass_kg: float = DEFAULT_MASS_KG
    length_m: float = DEFAULT_LENGTH_M
    omega0: float = DEFAULT_OMEGA0
    gamma0: float = DEFAULT_GAMMA0
    kappa: float = DEFAULT_KAPPA
    omega_c: float = DEFAULT_OMEGA_C
    power_w: float = 0.0
    delta_c: float | None = None
    omega_rabi: float | None = None
    n_phonon: float = DEFAULT_N_PHONON
    v_photon: float | None = None
    g0: float | None = DEFAULT_G0
    g_override: float | None = None

    def __post_init__(self):
        for label in ("mass_kg", "length_m", "omega0", "kappa", "omega_c"):
            if not getattr(self, label) > 0:
                raise DomainError(f"{label} must be positive, got {getattr(self, label)}")
        for label in ("gamma0", "power_w", "n_phonon"):
            if getattr(self, label) < 0:
                raise DomainError(f"{label} must be nonnegative, got {getattr(self, label)}")
        if self.omega_rabi is not None and self.omega_rabi < 0:
            raise DomainError(f"omega_rabi must be nonnegative, got {self.omega_rabi}")
        if self.v_photon is not None and self.v_photon < 0:
            raise DomainError(f"v_photon must be nonnegative, got {self.v_photon}")
        if self.g0 is not None and self.g0 <= 0:
            raise DomainError(f"g0 must be positive, got {self.g0}")
        if self.g_override is not None and self.g_override < 0:
            raise DomainError(f"g_override must be nonnegative, got {self.g_override}")


@dataclass(frozen=True)
class DerivedOptomech:
    """Everything the linearization chain produces, mutually consistent."""

    n_cav: float
    g0: float
    g: float
    delta_omega0: float
    delta_gamma0: float
    omega_m: float
    gamma_m: float
    y_zpf: float
    delta_l: float
    delta_omega_c: float
    s: float
    eta: float
    delta_c: float
    v_photon: float
    omega_rabi: float
    gamma: float
    nuclide_name: str
    warnings: tuple[str, ...]


def cavity_photon_number(power_w: float, omega_l: float, omega_c: float, kappa: float) -> float:
    """Mean intracavity photon number for drive power P at laser frequency omega_l."""
    if power_w < 0:
        raise DomainError(f"power must be nonnegative, got {power_w} W")
    for label, value in (("omega_l", omega_l), ("omega_c", omega_c), ("kappa", kappa)):
        if not value > 0:
            raise DomainError(f"{label} must be positive, got {value}")
    return kappa * power_w / (HBAR * omega_l * ((omega_l - omega_c) ** 2 + (kappa / 2) ** 2))


def vacuum_coupling(omega_c: float, length_m: float, y_zpf: float) -> float:
    """Geometric vacuum optomechanical coupling omega_c * Y_ZPF / L."""
    for label, value in (("omega_c", omega_c), ("length_m", length_m), ("y_zpf", y_zpf)):
        if not value > 0:
            raise DomainError(f"{label} must be positive, got {value}")
    return omega_c * y_zpf / length_m


def spring_shift(g: float, kappa: float, omega0: float) -> float:
    """Optical spring shift 4 G^2 omega0 / (kappa^2 + 16 omega0^2)."""
    if g < 0 or kappa < 0 or omega0 < 0:
        raise DomainError("spring_shift arguments must be nonnegative")
    denom = kappa * kappa + 16.0 * omega0 * omega0
    if denom == 0.0:
        return 0.0
    return 4.0 * g * g * omega0 / denom


def damping_shift(g: float, kappa: float, omega0: float) -> float:
    """Optical damping shift 4 G^2 (1/kappa - kappa/(kappa^2 + 16 omega0^2))."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if g < 0 or omega0 < 0:
        raise DomainError("spring_shift arguments must be nonnegative")
    return 4.0 * g * g * (1.0 / kappa - kappa / (kappa * kappa + 16.0 * omega0 * omega0))


def zero_point_fluctuation(mass_kg: float, omega_m: float) -> float:
    """Ground-state rms displacement sqrt(hbar / (2 M omega_m))."""
    for label, value in (("mass_kg", mass_kg), ("omega_m", omega_m)):
        if not value > 0:
            raise DomainError(f"{label} must be positive, got {value}")
    return math.sqrt(HBAR / (2.0 * mass_kg * omega_m))


def cavity_shifts(
    omega_c: float, length_m: float, mass_kg: float, omega0: float, n_cav: float
) -> tuple[float, float]:
    """Averaged cavity length and frequency shifts from radiation pressure.

    delta_L = hbar omega_c n_cav / (L M omega0^2),
    delta_omega_c = delta_L * omega_c / L. The effective detuning downstream
    is delta_c + delta_omega_c.
    """
    for label, value in (("omega_c", omega_c), ("length_m", length_m), ("mass_kg", mass_kg), ("omega0", omega0)):
        if not value > 0:
            raise DomainError(f"{label} must be positive, got {value}")
    if n_cav < 0:
        raise DomainError(f"n_cav must be nonnegative, got {n_cav}")
    delta_l = HBAR * omega_c * n_cav / (length_m * mass_kg * omega0 * omega0)
    return delta_l, delta_l * omega_c / length_m


def derive(config: OptomechConfig, nuclide: NuclideTransition) -> DerivedOptomech:
    """Run the full linearization chain against a bound nuclide.

    The nuclide enters through s = Gamma/2 + kappa + gamma_m and through the
    Lamb-Dicke parameter. Regime violations produce warning flags on the
    result, never exceptions.
    """
    omega_m = config.omega0
    g = 0.0
    n_cav = 0.0
    g0 = 0.0
    for iteration in range(100):
        y_zpf = zero_point_fluctuation(config.mass_kg, omega_m)
        g0 = config.g0 if config.g0 is not None else vacuum_coupling(config.omega_c, config.length_m, y_zpf)
        delta_c = config.delta_c if config.delta_c is not None else -omega_m
        omega_l = config.omega_c + delta_c
        n_cav = cavity_photon_number(config.power_w, omega_l, config.omega_c, config.kappa)
        g = config.g_override if config.g_override is not None else g0 * math.sqrt(n_cav)
        omega_m_next = config.omega0 + spring_shift(g, config.kappa, config.omega0)
        if abs(omega_m_next - omega_m) <= 1e-12 * omega_m:
            omega_m = omega_m_next
            break
        omega_m = omega_m_next
    else:
        raise ConvergenceError("effective frequency fixed point did not converge in 100 iterations")

    y_zpf = zero_point_fluctuation(config.mass_kg, omega_m)
    delta_omega0 = omega_m - config.omega0
    delta_gamma0 = damping_shift(g, config.kappa, config.omega0)
    gamma_m = config.gamma0 + delta_gamma0
    s = nuclide.gamma / 2.0 + config.kappa + gamma_m
    delta_c = config.delta_c if config.delta_c is not None else -omega_m
    delta_l, delta_omega_c = cavity_shifts(config.omega_c, config.length_m, config.mass_kg, config.omega0, n_cav)
    eta = lamb_dicke(nuclide, y_zpf)
    v_photon = config.v_photon if config.v_photon is not None else n_cav
    if config.omega_rabi is not None:
        omega_rabi = config.omega_rabi
    else:
        omega_rabi = 1e-3 * g if g > 0 else 1e-3 * config.kappa

    warnings = []
    if abs(delta_c + omega_m) > 1e-6 * omega_m:
        warnings.append(f"not red-detuned: delta_c = {delta_c:.6g}, -omega_m = {-omega_m:.6g}")
    if g > 0 and g >= s:
        warnings.append(f"outside stable weak-coupling regime: G = {g:.6g} >= s = {s:.6g}")
    if g > 0 and omega_rabi > 0.1 * g:
        warnings.append(f"drive not weak: Omega = {omega_rabi:.6g} > 0.1 G = {0.1 * g:.6g}")
    if validity(eta, config.n_phonon) is Validity.INVALID:
        warnings.append(f"sideband expansion invalid: eta*sqrt(n) = {eta * math.sqrt(config.n_phonon):.3g} >= 1")

    return DerivedOptomech(
        n_cav=n_cav,
        g0=g0,
        g=g,
        delta_omega0=delta_omega0,
        delta_gamma0=delta_gamma0,
        omega_m=omega_m,
        gamma_m=gamma_m,
        y_zpf=y_zpf,
        delta_l=delta_l,
        delta_omega_c=delta_omega_c,
        s=s,
        eta=eta,
        delta_c=delta_c,
        v_photon=v_photon,
        omega_rabi=omega_rabi,
        gamma=nuclide.gamma,
        nuclide_name=nuclide.name,
        warnings=tuple(warnings),
    )


def with_power(config: OptomechConfig, power_w: float) -> OptomechConfig:
    """Copy of config at a different drive power (sweep helper)."""
    return replace(config, power_w=power_w)


def ringdown(y0: float, v0: float, gamma_m: float, omega_m: float, t):
    """Free decay of the lever tip, y'' + gamma_m y' + omega_m^2 y = 0.

    Underdamped closed form; t may be a scalar or array. Raises for
    critically damped or overdamped parameters.
    """
    if gamma_m < 0:
        raise DomainError(f"gamma_m must be nonnegative, got {gamma_m}")
    if not omega_m > gamma_m / 2.0:
        raise DomainError(
            f"overdamped regime: omega_m = {omega_m} <= gamma_m/2 = {gamma_m / 2.0}; "
            "only the underdamped lever is modeled"
        )
    t = np.asarray(t, dtype=float)
    omega_d = math.sqrt(omega_m * omega_m - 0.25 * gamma_m * gamma_m)
    envelope = np.exp(-0.5 * gamma_m * t)
    return envelope * (y0 * np.cos(omega_d * t) + ((v0 + 0.5 * gamma_m * y0) / omega_d) * np.sin(omega_d * t))
