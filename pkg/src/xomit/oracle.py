"""Independent verification path for the analytic steady state.

Builds the truncated six-state model around the prepared state |g, v, n>:
three ground states {(g,v-1,n+1), (g,v,n), (g,v+1,n-1)} and three excited
states {(e,v-1,m+1), (e,v,m), (e,v+1,m-1)} coupled by the photon-phonon
beam splitter -G(a'b + ab') within each electronic block and by the weak
x-ray drive -(Omega/2) F^{m'}_{n'} across blocks (diagonal in the photon
index). States with negative occupations are dropped and the basis shrinks.

Two solvers are exposed:

* steady_state_solve: a small complex linear solve for the excited-ground
  coherences with the ground amplitude frozen on |g,v,n> (first order in
  Omega), each coherence damped at s = Gamma/2 + kappa + gamma_m;
* time_evolve: fixed-step RK4 on the full density matrix with the declared
  dissipator (excited-population decay at Gamma without refill, plus
  excited-projector dephasing at 2s - Gamma so e-g coherences decay at s).
  The ground beam splitter can be switched off to match the frozen-ground
  closure of the linear solve.

compare_with_analytic measures, per sideband offset, how far the closed-form
coherence and the linear solve are apart and emits a machine-readable report;
disagreement beyond tolerance is documented, never suppressed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import median

import numpy as np

from .errors import DomainError, StepSizeError
from .franck_condon import franck_condon
from .optomech import DerivedOptomech
from .spectrum import LineParams, steady_state_coherence

DECOHERENCE_MODEL_ID = "excited-decay+eg-dephasing/1"


@dataclass(frozen=True)
class BasisState:
    species: str  # "g" or "e"
    photon: float
    phonon: float


@dataclass(frozen=True)
class TruncatedBasis:
    """Ordered six-state (or smaller) basis around |g, v, n>."""

    n: float
    m: float
    v: float
    states: tuple[BasisState, ...]

    @classmethod
    def build(cls, n, m, v) -> "TruncatedBasis":
        if n < 0 or m < 0 or v < 0:
            raise DomainError(f"occupations must be nonnegative, got n={n}, m={m}, v={v}")
        candidates = [
            BasisState("g", v - 1, n + 1),
            BasisState("g", v, n),
            BasisState("g", v + 1, n - 1),
            BasisState("e", v - 1, m + 1),
            BasisState("e", v, m),
            BasisState("e", v + 1, m - 1),
        ]
        states = tuple(st for st in candidates if st.photon >= 0 and st.phonon >= 0)
        return cls(n=float(n), m=float(m), v=float(v), states=states)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, species: str, photon: float, phonon: float) -> int:
        for i, st in enumerate(self.states):
            if st.species == species and st.photon == photon and st.phonon == phonon:
                return i
        raise KeyError(f"state ({species}, {photon}, {phonon}) not in basis")

    def excited_indices(self) -> list[int]:
        return [i for i, st in enumerate(self.states) if st.species == "e"]

    def ground_indices(self) -> list[int]:
        return [i for i, st in enumerate(self.states) if st.species == "g"]


@dataclass(frozen=True)
class OracleParams:
    """Model inputs for the truncated solver."""

    omega_m: float
    delta_c: float
    s: float
    gamma: float
    g: float
    omega_rabi: float
    eta: float
    v: float

    @classmethod
    def from_derived(cls, derived: DerivedOptomech) -> "OracleParams":
        return cls(
            omega_m=derived.omega_m,
            delta_c=derived.delta_c,
            s=derived.s,
            gamma=derived.gamma,
            g=derived.g,
            omega_rabi=derived.omega_rabi,
            eta=derived.eta,
            v=derived.v_photon,
        )

    def line_params(self) -> LineParams:
        return LineParams(
            omega_m=self.omega_m, s=self.s, gamma=self.gamma,
            g=self.g, omega_rabi=self.omega_rabi, eta=self.eta,
        )


def build_hamiltonian(
    basis: TruncatedBasis,
    params: OracleParams,
    delta: float,
    include_ground_bs: bool = True,
) -> np.ndarray:
    """Hermitian truncated Hamiltonian in rad/s units.

    Diagonal entries are omega_m * phonons - delta_c * photons - delta for
    excited states, referenced to the prepared ground state |g, v, n> (a pure
    gauge shift that keeps matrix norms at detuning scale instead of
    n * omega_m). The drive column carries the complex sideband coefficients.
    """
    dim = basis.dim
    h = np.zeros((dim, dim), dtype=complex)
    # reference each diagonal through occupation offsets so the entries stay
    # at detuning scale exactly (n * omega_m cancellation would cost ~1e-9)
    for i, st in enumerate(basis.states):
        diag = params.omega_m * (st.phonon - basis.n) - params.delta_c * (st.photon - basis.v)
        if st.species == "e":
            diag -= delta
        h[i, i] = diag

    # beam splitter within each electronic block: (c, mu) <-> (c+1, mu-1)
    for i, st in enumerate(basis.states):
        if st.species == "g" and not include_ground_bs:
            continue
        for j, other in enumerate(basis.states):
            if j <= i or other.species != st.species:
                continue
            if other.photon == st.photon + 1 and other.phonon == st.phonon - 1:
                g_elem = -params.g * math.sqrt((st.photon + 1.0) * st.phonon)
            elif other.photon == st.photon - 1 and other.phonon == st.phonon + 1:
                g_elem = -params.g * math.sqrt(st.photon * (st.phonon + 1.0))
            else:
                continue
            h[i, j] = g_elem
            h[j, i] = g_elem

    # x-ray drive, diagonal in the photon index
    for i, st in enumerate(basis.states):
        if st.species != "e":
            continue
        for j, other in enumerate(basis.states):
            if other.species != "g" or other.photon != st.photon:
                continue
            coeff = franck_condon(st.phonon, other.phonon, params.eta)
            h[i, j] = -(params.omega_rabi / 2.0) * coeff
            h[j, i] = np.conj(h[i, j])
    return h


def steady_state_solve(params: OracleParams, n, m, delta) -> complex | np.ndarray:
    """Excited-ground coherence on (e, v, m) from the frozen-ground linear solve.

    delta may be a scalar or an array (batched solves share one Hamiltonian
    assembly since the x-ray detuning only shifts the excited diagonal).
    """
    basis = TruncatedBasis.build(n, m, params.v)
    h0 = build_hamiltonian(basis, params, delta=0.0, include_ground_bs=True)
    exc = basis.excited_indices()
    h_ee = h0[np.ix_(exc, exc)]
    target_row = exc.index(basis.index("e", params.v, float(m)))
    ground_col = basis.index("g", params.v, float(n))
    drive = h0[exc, ground_col]

    deltas = np.atleast_1d(np.asarray(delta, dtype=float))
    k = len(exc)
    a = np.zeros((deltas.size, k, k), dtype=complex)
    a[:] = params.s * np.eye(k) + 1j * h_ee
    idx = np.arange(k)
    a[:, idx, idx] -= 1j * deltas[:, None]
    b = np.broadcast_to((-1j * drive)[:, None], (deltas.size, k, 1)).copy()
    sol = np.linalg.solve(a, b)[:, target_row, 0]
    if np.isscalar(delta) or np.asarray(delta).ndim == 0:
        return complex(sol[0])
    return sol


def coherence_offsets(params: OracleParams, n, delta, offsets=range(-6, 7)) -> dict[int, complex | np.ndarray]:
    """steady_state_solve across a window of sideband offsets."""
    out = {}
    for d in offsets:
        m = n + d
        if m < 0:
            continue
        out[d] = steady_state_solve(params, n, m, delta)
    return out


def _dissipator(rho: np.ndarray, excited_mask: np.ndarray, gamma: float, dephasing: float) -> np.ndarray:
    p_rho = excited_mask[:, None] * rho
    rho_p = rho * excited_mask[None, :]
    anticomm = p_rho + rho_p
    prp = excited_mask[:, None] * rho * excited_mask[None, :]
    return -(gamma / 2.0) * anticomm + dephasing * (prp - 0.5 * anticomm)


def time_evolve(
    rho0: np.ndarray,
    params: OracleParams,
    n,
    m,
    delta: float,
    t_end: float,
    dt: float,
    include_ground_bs: bool = True,
    record_every: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 trajectory of the truncated master equation.

    Decoherence model (id excited-decay+eg-dephasing/1): excited populations
    decay at Gamma with no refill (trace non-increasing), excited-projector
    dephasing at 2s - Gamma brings every e-g coherence decay rate to s.
    Returns (times, trajectory) including the initial state.
    """
    basis = TruncatedBasis.build(n, m, params.v)
    if rho0.shape != (basis.dim, basis.dim):
        raise DomainError(f"rho0 shape {rho0.shape} does not match basis dimension {basis.dim}")
    scale = max(params.omega_m, abs(params.delta_c), params.s, params.g, params.omega_rabi, abs(delta))
    if scale > 0 and dt > 0.05 / scale:
        raise StepSizeError(f"dt = {dt} exceeds 0.05/max-rate = {0.05 / scale:.3e}")
    if dt <= 0:
        raise StepSizeError(f"dt must be positive, got {dt}")

    h = build_hamiltonian(basis, params, delta=delta, include_ground_bs=include_ground_bs)
    excited_mask = np.array([1.0 if st.species == "e" else 0.0 for st in basis.states])
    dephasing = 2.0 * params.s - params.gamma
    if dephasing < 0:
        raise DomainError(f"2s - Gamma = {dephasing} < 0 is unphysical")

    def rhs(rho):
        return -1j * (h @ rho - rho @ h) + _dissipator(rho, excited_mask, params.gamma, dephasing)

    steps = max(1, int(round(t_end / dt)))
    rho = np.array(rho0, dtype=complex)
    times = [0.0]
    frames = [rho.copy()]
    for k in range(1, steps + 1):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k % record_every == 0 or k == steps:
            times.append(k * dt)
            frames.append(rho.copy())
    return np.array(times), np.array(frames)


def prepared_state(basis: TruncatedBasis) -> np.ndarray:
    """Density matrix |g, v, n><g, v, n| in the given basis."""
    rho = np.zeros((basis.dim, basis.dim), dtype=complex)
    i = basis.index("g", basis.v, basis.n)
    rho[i, i] = 1.0
    return rho


def _rel_err(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, np.abs(a - b) / np.where(scale > 0, scale, 1.0), 0.0)
    return rel


def compare_with_analytic(
    params: OracleParams,
    n,
    grid,
    tolerance: float = 1e-6,
    offsets=range(-6, 7),
) -> dict:
    """Per-offset relative errors between the closed form and the linear solve.

    The report is machine-readable and self-describing; a structured
    discrepancy block is attached whenever the global maximum exceeds the
    tolerance, naming the decoherence model and the known resolution limits
    of the truncation (frozen-ground closure, photon-occupation pathway).
    """
    grid = np.asarray(grid, dtype=float)
    line = params.line_params()
    per_offset = {}
    all_rel = []
    for d in offsets:
        m = n + d
        if m < 0:
            continue
        analytic = np.asarray(steady_state_coherence(m, n, grid, line, use_abs_fc=False))
        numeric = np.asarray(steady_state_solve(params, n, m, grid))
        rel = _rel_err(analytic, numeric)
        per_offset[d] = float(rel.max())
        all_rel.append(rel)
    flat = np.concatenate(all_rel) if all_rel else np.zeros(1)
    global_max = float(flat.max())
    weak_drive = params.omega_rabi <= 0.1 * params.g if params.g > 0 else True
    stable = params.s > params.g
    report = {
        "schema": "xomit.oracle-comparison/1",
        "decoherence_model_id": DECOHERENCE_MODEL_ID,
        "grid": {"points": int(grid.size), "min": float(grid.min()), "max": float(grid.max())},
        "n_phonon": float(n),
        "v_photon": float(params.v),
        "per_offset_max_rel_err": {str(d): v for d, v in sorted(per_offset.items())},
        "global_max": global_max,
        "global_median": float(median(flat.tolist())),
        "tolerance": tolerance,
        "within_tolerance": bool(global_max < tolerance),
        "regime_flags": {
            "stable": bool(stable),
            "weak_drive": bool(weak_drive),
            "regime_violation": bool(not (stable and weak_drive)),
        },
    }
    if not report["within_tolerance"]:
        report["documented_discrepancy"] = {
            "description": (
                "closed-form coherence includes a ground-pathway interference "
                "term (the F^{m-1}_{n-1} sqrt(mn) contribution) and no "
                "photon-occupation dependence, while the frozen-ground "
                "truncated solve splits lines by G*sqrt(m+v+2mv); the two "
                "agree exactly for G=0 or n=0 with v=0"
            ),
            "decoherence_model_id": DECOHERENCE_MODEL_ID,
            "max_rel_err": global_max,
        }
    return report
