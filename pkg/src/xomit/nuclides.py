"""Nuclear transition database and Lamb-Dicke helpers.

Ships the six built-in low-lying Moessbauer transitions used throughout, and
loads user nuclides from a strict JSON schema. The published linewidth column
is MHz-valued but ambiguous between ordinary and angular frequency; the
``gamma_convention`` switch makes the interpretation explicit:

* ``"hz"`` (default): column value is an ordinary frequency in MHz,
  Gamma = 2*pi * value * 1e6 rad/s.
* ``"rad_s"``: column value already is an angular rate in units of 1e6 rad/s,
  Gamma = value * 1e6 rad/s.

Every output snapshot records which convention produced it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import DomainError, NuclideFormatError, UnknownNuclideError
from .units import TWO_PI, energy_to_angular_frequency, energy_to_wavevector

GAMMA_CONVENTIONS = ("hz", "rad_s")


@dataclass(frozen=True)
class NuclideTransition:
    """One recoilless nuclear transition.

    energy_ev is the transition energy in eV; gamma the natural linewidth in
    rad/s. The wave number is always derived from the energy, never stored.
    """

    name: str
    energy_ev: float
    gamma: float

    def __post_init__(self):
        if not self.energy_ev > 0:
            raise DomainError(f"{self.name}: energy must be positive, got {self.energy_ev} eV")
        if not self.gamma > 0:
            raise DomainError(f"{self.name}: linewidth must be positive, got {self.gamma} rad/s")

    @property
    def k_x(self) -> float:
        """Resonant wave number in 1/m."""
        return energy_to_wavevector(self.energy_ev)

    @property
    def omega_n(self) -> float:
        """Transition angular frequency in rad/s."""
        return energy_to_angular_frequency(self.energy_ev)


@dataclass(frozen=True)
class PhononBounds:
    """Phonon-number window in which the first sidebands are usable.

    n_min solves eta*sqrt(n) = 0.1 exactly; n_max = 100 * n_min puts
    eta*sqrt(n_max) at the upper validity edge of 1.
    """

    n_min: float
    n_max: float


# Published transition table: (name, energy in keV, linewidth column in MHz).
_TABLE = (
    ("45Sc", 12.400, 2.18e-6),
    ("67Zn", 93.312, 0.08),
    ("73Ge", 13.285, 0.23),
    ("157Gd", 63.929, 1.51),
    ("181Ta", 6.238, 0.11),
    ("229Th", 7.8e-3, 1e-10),
)


def _gamma_from_mhz(value_mhz: float, convention: str) -> float:
    if convention not in GAMMA_CONVENTIONS:
        raise DomainError(f"gamma convention must be one of {GAMMA_CONVENTIONS}, got {convention!r}")
    if convention == "hz":
        return TWO_PI * value_mhz * 1e6
    return value_mhz * 1e6


def builtin_nuclides(gamma_convention: str = "hz") -> list[NuclideTransition]:
    """The six built-in transitions, in table order."""
    return [
        NuclideTransition(name, e_kev * 1e3, _gamma_from_mhz(g_mhz, gamma_convention))
        for name, e_kev, g_mhz in _TABLE
    ]


def builtin_gamma_mhz(name: str) -> float:
    """Raw linewidth column value (MHz) for a built-in nuclide."""
    canonical = _normalize(name)
    for row_name, _, g_mhz in _TABLE:
        if _normalize(row_name) == canonical:
            return g_mhz
    raise UnknownNuclideError(name, [row[0] for row in _TABLE])


def _normalize(name: str) -> str:
    cleaned = name.strip().lower().replace("-", "").replace("_", "")
    digits = "".join(ch for ch in cleaned if ch.isdigit())
    letters = "".join(ch for ch in cleaned if ch.isalpha())
    return digits + letters


def get_nuclide(
    name: str,
    gamma_convention: str = "hz",
    extra: Iterable[NuclideTransition] = (),
) -> NuclideTransition:
    """Look up a nuclide by name among built-ins plus any user-supplied list.

    Name matching ignores case, hyphens, and element/mass-number order,
    so "67Zn", "Zn-67" and "zn67" are equivalent.
    """
    pool = list(extra) + builtin_nuclides(gamma_convention)
    canonical = _normalize(name)
    for nuc in pool:
        if _normalize(nuc.name) == canonical:
            return nuc
    raise UnknownNuclideError(name, [n.name for n in pool])


_ALLOWED_FIELDS = {"name", "energy_eV", "gamma_MHz", "gamma_rad_s"}


def load_nuclides(
    source: Union[str, Path, bytes, IO],
    gamma_convention: str = "hz",
) -> list[NuclideTransition]:
    """Load nuclides from a JSON array of objects.

    Schema per entry: {"name": str, "energy_eV": num, "gamma_MHz": num} with
    gamma_rad_s accepted in place of gamma_MHz (exactly one of the two).
    Unknown fields are rejected. gamma_MHz is interpreted per the convention
    switch; gamma_rad_s is taken verbatim.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and source.endswith(".json")):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, (str, bytes)):
        text = source.decode("utf-8") if isinstance(source, bytes) else source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NuclideFormatError(f"nuclide file is not valid JSON: {exc}") from exc

    if not isinstance(data, list):
        raise NuclideFormatError(f"nuclide file must be a JSON array, got {type(data).__name__}")

    out = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise NuclideFormatError(f"entry {i}: expected object, got {type(entry).__name__}")
        unknown = set(entry) - _ALLOWED_FIELDS
        if unknown:
            raise NuclideFormatError(f"entry {i}: unknown fields {sorted(unknown)}")
        for field in ("name",):
            if field not in entry:
                raise NuclideFormatError(f"entry {i}: missing field {field!r}")
        if not isinstance(entry["name"], str) or not entry["name"].strip():
            raise NuclideFormatError(f"entry {i}: field 'name' must be a non-empty string")
        if "energy_eV" not in entry:
            raise NuclideFormatError(f"entry {i} ({entry['name']}): missing field 'energy_eV'")
        has_mhz = "gamma_MHz" in entry
        has_rad = "gamma_rad_s" in entry
        if has_mhz == has_rad:
            raise NuclideFormatError(
                f"entry {i} ({entry['name']}): exactly one of 'gamma_MHz' or 'gamma_rad_s' required"
            )
        for field in ("energy_eV", "gamma_MHz", "gamma_rad_s"):
            if field in entry and not isinstance(entry[field], (int, float)):
                raise NuclideFormatError(f"entry {i} ({entry['name']}): field {field!r} must be a number")
        energy = float(entry["energy_eV"])
        if not energy > 0:
            raise NuclideFormatError(f"entry {i} ({entry['name']}): field 'energy_eV' must be positive, got {energy}")
        gamma = _gamma_from_mhz(float(entry["gamma_MHz"]), gamma_convention) if has_mhz else float(entry["gamma_rad_s"])
        if not gamma > 0:
            raise NuclideFormatError(
                f"entry {i} ({entry['name']}): field "
                f"{'gamma_MHz' if has_mhz else 'gamma_rad_s'} must be positive"
            )
        out.append(NuclideTransition(entry["name"], energy, gamma))
    return out


def lamb_dicke(nuclide: NuclideTransition, y_zpf: float) -> float:
    """Lamb-Dicke parameter eta = k_x * Y_ZPF."""
    if not y_zpf > 0:
        raise DomainError(f"zero-point fluctuation must be positive, got {y_zpf} m")
    return nuclide.k_x * y_zpf


def phonon_bounds(eta: float) -> PhononBounds:
    """Usable phonon window from 0.1 <= eta*sqrt(n) < 1."""
    if not eta > 0:
        raise DomainError(f"Lamb-Dicke parameter must be positive, got {eta}")
    n_min = (0.1 / eta) ** 2
    return PhononBounds(n_min=n_min, n_max=100.0 * n_min)


def round_sig_figs(x: float, figs: int = 2) -> float:
    """Round to a number of significant figures (for table display)."""
    if x == 0:
        return 0.0
    return round(x, figs - 1 - int(math.floor(math.log10(abs(x)))))
