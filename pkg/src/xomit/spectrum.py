"""Steady-state absorption spectra and their analysis.

The weak-drive steady-state coherence between |g, n> and |e, m> at x-ray
detuning Delta (all rates angular, D = Delta - (m-n) omega_m) is

    rho(Delta) = Omega * { F^m_n (2s - Gamma) [i s + D]
                           - 2i G^2 F^{m-1}_{n-1} sqrt(m n) }
                 / ( 2 (2s - Gamma) { G^2 m + [s - i D]^2 } )

with s = Gamma/2 + kappa + gamma_m. The absorption spectrum is the sum of the
imaginary parts over the sideband window m in [n-6, n+6], with both coupling
coefficients replaced by their magnitudes (they share the i^d phase, so the
substitution preserves the relative sign; a switch keeps the complex variant
for sensitivity checks).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from io import StringIO
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InputError
from .franck_condon import franck_condon, validity
from .nuclides import NuclideTransition
from .optomech import DerivedOptomech, OptomechConfig, derive

SIDEBAND_WINDOW = 6
DEFAULT_GRID_POINTS = 10001
DEFAULT_GRID_SPAN = 3.0  # in units of omega_m, symmetric about 0


@dataclass(frozen=True)
class LineParams:
    """The scalar inputs the coherence formula needs."""

    omega_m: float
    s: float
    gamma: float
    g: float
    omega_rabi: float
    eta: float

    def __post_init__(self):
        if not (2.0 * self.s - self.gamma) > 0:
            raise DomainError(
                f"unphysical regime 2s - Gamma = {2 * self.s - self.gamma} <= 0; "
                "requires kappa + gamma_m > 0"
            )

    @classmethod
    def from_derived(cls, derived: DerivedOptomech) -> "LineParams":
        return cls(
            omega_m=derived.omega_m,
            s=derived.s,
            gamma=derived.gamma,
            g=derived.g,
            omega_rabi=derived.omega_rabi,
            eta=derived.eta,
        )


@dataclass(frozen=True)
class CoherenceSet:
    """Steady-state coherences indexed by phonon offset d = m - n."""

    base_n: float
    delta: float
    entries: dict[int, complex]


@dataclass(frozen=True)
class DipMetrics:
    """Transparency-dip measurements around the zero-phonon line.

    split is measured on the full spectrum inside the window; line_split on
    the central line's own profile, which removes the additive sideband-tail
    pull and is the quantity the dressed-state formula approximates.
    Both are None when no flanking peak pair exists.
    """

    center_absorption: float
    contrast: float
    split: float | None
    line_split: float | None


@dataclass
class Spectrum:
    """Absorption on a detuning grid plus the full provenance snapshot."""

    delta: np.ndarray
    absorption: np.ndarray
    snapshot: dict

    @property
    def omega_m(self) -> float:
        return self.snapshot["derived"]["omega_m"]

    def to_csv(self) -> str:
        buf = StringIO()
        buf.write("delta_rad_s,delta_over_omega_m,absorption\n")
        wm = self.omega_m
        for d, a in zip(self.delta, self.absorption):
            buf.write(f"{float(d)!r},{float(d) / wm!r},{float(a)!r}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "schema": "xomit.spectrum/1",
            "snapshot": self.snapshot,
            "points": [[float(d), float(a)] for d, a in zip(self.delta, self.absorption)],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Spectrum":
        payload = json.loads(text)
        if payload.get("schema") != "xomit.spectrum/1":
            raise InputError(f"unrecognized spectrum schema: {payload.get('schema')!r}")
        pts = payload["points"]
        return cls(
            delta=np.array([p[0] for p in pts], dtype=float),
            absorption=np.array([p[1] for p in pts], dtype=float),
            snapshot=payload["snapshot"],
        )


def _fc_pair(m, n, eta: float, use_abs_fc: bool) -> tuple[complex, complex]:
    f1 = franck_condon(m, n, eta)
    f2 = franck_condon(m - 1, n - 1, eta) if (m >= 1 and n >= 1) else 0.0j
    if use_abs_fc:
        return abs(f1) + 0.0j, abs(f2) + 0.0j
    return f1, f2


def steady_state_coherence(m, n, delta, p: LineParams, use_abs_fc: bool = False):
    """Steady-state coherence for one sideband transition.

    delta may be a scalar or array. use_abs_fc applies the
    magnitude substitution to both coupling coefficients.
    """
    if m < 0 or n < 0:
        raise DomainError(f"phonon counts must be nonnegative, got m={m}, n={n}")
    f1, f2 = _fc_pair(m, n, p.eta, use_abs_fc)
    two_s_minus_gamma = 2.0 * p.s - p.gamma
    deltas = np.asarray(delta, dtype=float)
    scalar_input = deltas.ndim == 0
    d_eff = np.atleast_1d(deltas) - (m - n) * p.omega_m
    cross = math.sqrt(float(m) * float(n)) if (m >= 1 and n >= 1) else 0.0
    numerator = p.omega_rabi * (
        f1 * two_s_minus_gamma * (1j * p.s + d_eff) - 2j * p.g * p.g * f2 * cross
    )
    denominator = 2.0 * two_s_minus_gamma * (p.g * p.g * m + (p.s - 1j * d_eff) ** 2)
    out = numerator / denominator
    return complex(out[0]) if scalar_input else out


def coherence_set(n, delta: float, p: LineParams, use_abs_fc: bool = False) -> CoherenceSet:
    """All windowed coherences at one detuning."""
    entries = {}
    for d in range(-SIDEBAND_WINDOW, SIDEBAND_WINDOW + 1):
        m = n + d
        if m < 0:
            continue
        entries[d] = steady_state_coherence(m, n, delta, p, use_abs_fc=use_abs_fc)
    return CoherenceSet(base_n=n, delta=delta, entries=entries)


def absorption(delta, n, p: LineParams):
    """Windowed sum of coherence imaginary parts with magnitude coefficients.

    delta may be a scalar or array; the window clips at m = 0 when n < 6.
    """
    deltas = np.asarray(delta, dtype=float)
    scalar_input = deltas.ndim == 0
    work = np.atleast_1d(deltas)
    total = np.zeros_like(work)
    for d in range(-SIDEBAND_WINDOW, SIDEBAND_WINDOW + 1):
        m = n + d
        if m < 0:
            continue
        total = total + np.imag(steady_state_coherence(m, n, work, p, use_abs_fc=True))
    return float(total[0]) if scalar_input else total


def absorption_term(delta, offset: int, n, p: LineParams):
    """Single sideband term of the absorption sum (for residual analysis)."""
    m = n + offset
    if m < 0:
        raise DomainError(f"offset {offset} leaves no phonons at n = {n}")
    deltas = np.asarray(delta, dtype=float)
    scalar_input = deltas.ndim == 0
    out = np.imag(steady_state_coherence(m, n, np.atleast_1d(deltas), p, use_abs_fc=True))
    return float(out[0]) if scalar_input else out


def default_grid(omega_m: float, points: int = DEFAULT_GRID_POINTS, span: float = DEFAULT_GRID_SPAN) -> np.ndarray:
    if points < 2:
        raise InputError(f"grid needs at least 2 points, got {points}")
    if not span > 0:
        raise InputError(f"grid span must be positive, got {span}")
    return np.linspace(-span * omega_m, span * omega_m, points)


def compute_spectrum(
    grid: Sequence[float],
    n,
    p: LineParams,
    snapshot: dict | None = None,
    normalize: bool = False,
) -> Spectrum:
    """Pointwise absorption over a sorted detuning grid with provenance.

    normalize rescales so that the uncoupled (G = 0) zero-phonon value at
    Delta = 0 maps to 1; the reference is recorded in the snapshot.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InputError("detuning grid is empty")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise InputError("detuning grid must be strictly increasing")

    values = absorption(grid, n, p)
    snap = dict(snapshot or {})
    snap.setdefault("line_params", {
        "omega_m": p.omega_m, "s": p.s, "gamma": p.gamma,
        "g": p.g, "omega_rabi": p.omega_rabi, "eta": p.eta,
    })
    snap["n_phonon"] = float(n)
    snap.setdefault("derived", {})["omega_m"] = p.omega_m
    snap["grid"] = {"points": int(grid.size), "min": float(grid[0]), "max": float(grid[-1])}
    snap["window_clipped"] = bool(n < SIDEBAND_WINDOW)
    snap["normalized"] = bool(normalize)
    if normalize:
        reference = _g0_reference(n, p)
        snap["normalization_reference"] = reference
        values = values / reference
    return Spectrum(delta=grid, absorption=values, snapshot=snap)


def _g0_reference(n, p: LineParams) -> float:
    p0 = LineParams(omega_m=p.omega_m, s=p.s, gamma=p.gamma, g=0.0, omega_rabi=p.omega_rabi, eta=p.eta)
    return float(absorption(0.0, n, p0))


def peak_positions(g: float, s: float, m, v) -> tuple[float, float] | None:
    """Dressed-state estimate of the split-peak pair around a line center.

    Returns (negative, positive) detuning or None when the radicand is
    negative (dip unresolved, "unsplit").
    """
    radicand = (g * math.sqrt(m + v + 2.0 * m * v) + s) ** 2 - 2.0 * s * s
    if radicand < 0:
        return None
    root = math.sqrt(radicand)
    return (-root, root)


@dataclass(frozen=True)
class DressedStates:
    """Eigenstate coefficient triples on (|e,v-1,m+1>, |e,v,m>, |e,v+1,m-1>)."""

    upper: tuple[float, float, float]
    lower: tuple[float, float, float]
    upper_normalized: tuple[float, float, float]
    lower_normalized: tuple[float, float, float]


def dressed_states(v, m) -> DressedStates:
    """The two bright eigenstate triples of the excited beam-splitter chain.

    Coefficients (sqrt((1+m)v/((1+v)m)), -/+ sqrt((m+v+2mv)/((1+v)m)), 1);
    singular at m = 0 or v = 0.
    """
    if m < 1 or v < 1:
        raise DomainError(
            f"dressed-state coefficients are singular for m = {m}, v = {v}; need m >= 1 and v >= 1"
        )
    c1 = math.sqrt((1.0 + m) * v / ((1.0 + v) * m))
    c2 = math.sqrt((m + v + 2.0 * m * v) / ((1.0 + v) * m))
    upper = (c1, -c2, 1.0)
    lower = (c1, c2, 1.0)

    def _normed(t):
        norm = math.sqrt(sum(x * x for x in t))
        return tuple(x / norm for x in t)

    return DressedStates(upper=upper, lower=lower,
                         upper_normalized=_normed(upper), lower_normalized=_normed(lower))


def find_peaks(x, y) -> list[tuple[float, float]]:
    """Strict local maxima with quadratic sub-grid refinement.

    Returns (position, height) pairs in increasing position order; empty for
    monotone data. Accepts a Spectrum in place of (x, y).
    """
    if isinstance(x, Spectrum):
        x, y = x.delta, x.absorption
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise InputError(f"need at least 3 points to find peaks, got {x.size}")
    out = []
    for i in range(1, x.size - 1):
        if y[i] > y[i - 1] and y[i] > y[i + 1]:
            out.append(_refine_peak(x, y, i))
    return out


def _refine_peak(x: np.ndarray, y: np.ndarray, i: int) -> tuple[float, float]:
    # parabola through the three bracketing samples, Newton divided differences
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    d1 = (y1 - y0) / (x1 - x0)
    d2 = (y2 - y1) / (x2 - x1)
    a = (d2 - d1) / (x2 - x0)
    if a >= 0:
        return float(x1), float(y1)
    xv = 0.5 * (x0 + x1) - d1 / (2.0 * a)
    yv = y0 + d1 * (xv - x0) + a * (xv - x0) * (xv - x1)
    return float(xv), float(yv)


def _paired_split(peaks: Iterable[tuple[float, float]], limit: float) -> float | None:
    interior = [pk for pk in peaks if abs(pk[0]) < limit]
    neg = [pk[0] for pk in interior if pk[0] < 0]
    pos = [pk[0] for pk in interior if pk[0] > 0]
    if not neg or not pos:
        return None
    return min(pos) - max(neg)


def make_snapshot(config: OptomechConfig, nuclide: NuclideTransition, derived: DerivedOptomech) -> dict:
    """Full provenance record embedded in every output file."""
    from dataclasses import asdict

    snap = {
        "config": asdict(config),
        "nuclide": {
            "name": nuclide.name,
            "energy_eV": nuclide.energy_ev,
            "gamma_rad_s": nuclide.gamma,
            "k_x_per_m": nuclide.k_x,
        },
        "derived": asdict(derived),
        "validity": validity(derived.eta, config.n_phonon).value,
        "warnings": list(derived.warnings),
    }
    snap["derived"]["warnings"] = list(derived.warnings)
    return snap


def spectrum_for(
    config: OptomechConfig,
    nuclide: NuclideTransition,
    n=None,
    grid=None,
    points: int = DEFAULT_GRID_POINTS,
    span: float = DEFAULT_GRID_SPAN,
    normalize: bool = False,
) -> Spectrum:
    """Derive the system and compute its spectrum in one step."""
    derived = derive(config, nuclide)
    p = LineParams.from_derived(derived)
    if n is None:
        n = config.n_phonon
    if grid is None:
        grid = default_grid(derived.omega_m, points=points, span=span)
    return compute_spectrum(grid, n, p, snapshot=make_snapshot(config, nuclide, derived), normalize=normalize)


def dip_metrics(
    n,
    p: LineParams,
    window: float = 0.75,
    points: int = 4001,
) -> DipMetrics:
    """Absorption at line center, dip contrast, and measured splittings.

    Contrast is 1 - A(0)/max(A) over |Delta| <= window * omega_m, clamped to
    [0, 1]; with no coupling the center is the maximum and the contrast is 0.
    """
    if not 0 < window:
        raise InputError(f"window must be positive, got {window}")
    grid = np.linspace(-window * p.omega_m, window * p.omega_m, points)
    values = absorption(grid, n, p)
    center = float(absorption(0.0, n, p))
    reference = float(values.max())
    if reference > 0:
        contrast = min(max(1.0 - center / reference, 0.0), 1.0)
    else:
        contrast = 0.0
    split = _paired_split(find_peaks(grid, values), limit=0.99 * window * p.omega_m)
    line = absorption_term(grid, 0, n, p)
    line_split = _paired_split(find_peaks(grid, line), limit=0.99 * window * p.omega_m)
    return DipMetrics(center_absorption=center, contrast=contrast, split=split, line_split=line_split)
