"""Built-in validation suite.

Each check is a named, self-contained measurement with an explicit pass/fail
tolerance; the suite returns a machine-readable report and a one-line summary
per check. Definitions used by the phenomenology checks:

* sideband strength: the line's own absorption term evaluated at its center
  d*omega_m, relative to the total absorption at Delta = 0 (tail-subtracted,
  so a shoulder that never becomes a strict local maximum still counts);
* resolvable line: sideband strength >= 1e-2;
* dip at a line center: strict local minimum within |Delta - d*omega_m| <= s;
* line split: distance between the flanking maxima of the central line's own
  profile (the quantity the dressed-state estimate approximates; the
  full-spectrum split is also recorded but carries additive sideband pull).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import oracle as oracle_mod
from .franck_condon import franck_condon, franck_condon_log
from .nuclides import builtin_nuclides, get_nuclide, phonon_bounds
from .optomech import OptomechConfig, derive, zero_point_fluctuation
from .spectrum import (
    DEFAULT_GRID_POINTS,
    DEFAULT_GRID_SPAN,
    LineParams,
    absorption,
    absorption_term,
    default_grid,
    dip_metrics,
    find_peaks,
    peak_positions,
    steady_state_coherence,
)
from .units import TWO_PI

# Published Lamb-Dicke parameters and minimum phonon numbers for the
# reference setup (0.14 ug, 2*pi*0.95 MHz), in table order.
TABLE_ETA = {
    "45Sc": 1.58e-5,
    "67Zn": 11.87e-5,
    "73Ge": 1.69e-5,
    "157Gd": 8.13e-5,
    "181Ta": 0.79e-5,
    "229Th": 9.92e-9,
}
TABLE_NMIN = {
    "45Sc": 4.02e7,
    "67Zn": 0.07e7,
    "73Ge": 3.50e7,
    "157Gd": 0.15e7,
    "181Ta": 15.88e7,
    "229Th": 1.02e14,
}

RESOLVABLE_STRENGTH = 1e-2
ZERO_PHONON_ONLY_STRENGTH = 1e-3


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


@dataclass
class ValidationReport:
    checks: list[CheckResult]
    elapsed_seconds: float

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_names(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "schema": "xomit.validation/1",
            "all_passed": self.all_passed,
            "elapsed_seconds": self.elapsed_seconds,
            "decoherence_model_id": oracle_mod.DECOHERENCE_MODEL_ID,
            "checks": [{"name": c.name, "passed": c.passed, "details": c.details} for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{status}  {c.name}")
        lines.append(f"{'PASS' if self.all_passed else 'FAIL'}  overall ({self.elapsed_seconds:.2f} s)")
        return lines


def _reference_config(power_w: float = 0.0, **overrides) -> OptomechConfig:
    return replace(OptomechConfig(), power_w=power_w, **overrides)


def _system(nuclide_name: str, power_w: float, **overrides):
    config = _reference_config(power_w, **overrides)
    nuc = get_nuclide(nuclide_name)
    derived = derive(config, nuc)
    return config, nuc, derived, LineParams.from_derived(derived)


def check_table_eta() -> CheckResult:
    config = OptomechConfig()
    y_zpf = zero_point_fluctuation(config.mass_kg, config.omega0)
    nuclides = builtin_nuclides()
    start = time.perf_counter()
    etas = {nuc.name: nuc.k_x * y_zpf for nuc in nuclides}
    elapsed = time.perf_counter() - start
    rows = {}
    worst = 0.0
    for name, eta in etas.items():
        rel = abs(eta - TABLE_ETA[name]) / TABLE_ETA[name]
        worst = max(worst, rel)
        rows[name] = {"eta": eta, "published": TABLE_ETA[name], "rel_err": rel}
    passed = worst < 0.01 and elapsed < 1e-3
    return CheckResult("table1-eta", passed, {
        "rows": rows, "max_rel_err": worst, "tolerance": 0.01,
        "elapsed_seconds": elapsed, "runtime_limit_seconds": 1e-3,
    })


def check_table_nmin() -> CheckResult:
    config = OptomechConfig()
    y_zpf = zero_point_fluctuation(config.mass_kg, config.omega0)
    rows = {}
    worst = 0.0
    for nuc in builtin_nuclides():
        bounds = phonon_bounds(nuc.k_x * y_zpf)
        rel = abs(bounds.n_min - TABLE_NMIN[nuc.name]) / TABLE_NMIN[nuc.name]
        worst = max(worst, rel)
        rows[nuc.name] = {"n_min": bounds.n_min, "published": TABLE_NMIN[nuc.name], "rel_err": rel}
    passed = worst < 0.02
    return CheckResult("table1-nmin", passed, {"rows": rows, "max_rel_err": worst, "tolerance": 0.02})


def check_franck_condon_paths() -> CheckResult:
    worst = 0.0
    exact_ok = True
    for n in (0, 1, 10, 10**3, 10**6, 10**9):
        for eta in (1e-8, 1e-5, 1e-4):
            if franck_condon(n, n, eta) != 1.0:
                exact_ok = False
            for d in range(-12, 13):
                m = n + d
                if m < 0:
                    continue
                a = franck_condon(m, n, eta)
                b = franck_condon_log(m, n, eta)
                if d != 0 and franck_condon(m, n, 0.0) != 0.0:
                    exact_ok = False
                scale = max(abs(a), abs(b))
                if scale > 0:
                    worst = max(worst, abs(a - b) / scale)
    passed = worst < 1e-10 and exact_ok
    return CheckResult("franck-condon-paths", passed, {
        "max_rel_err": worst, "tolerance": 1e-10, "exact_identities": exact_ok,
    })


def check_g0_reduction() -> CheckResult:
    # algebraic identity at G = 0 against the reduced closed form
    _, _, derived, p = _system("67Zn", power_w=0.0)
    n = int(OptomechConfig().n_phonon)
    grid = default_grid(p.omega_m, points=1001)
    worst = 0.0
    for d in range(-6, 7):
        m = n + d
        full = np.asarray(steady_state_coherence(m, n, grid, p))
        f1 = franck_condon(m, n, p.eta)
        d_eff = grid - d * p.omega_m
        reduced = p.omega_rabi * f1 * (1j * p.s + d_eff) / (2.0 * (p.s - 1j * d_eff) ** 2)
        scale = np.maximum(np.abs(full), np.abs(reduced))
        worst = max(worst, float((np.abs(full - reduced) / scale).max()))
    identity_ok = worst < 1e-12

    # peak geometry in the resolved-sideband regime (omega_m > 10 s)
    _, _, derived_rs, p_rs = _system("67Zn", power_w=0.0, kappa=TWO_PI * 0.02e6)
    grid_rs = default_grid(p_rs.omega_m, points=1001)
    values = absorption(grid_rs, n, p_rs)
    step = grid_rs[1] - grid_rs[0]
    peaks = find_peaks(grid_rs, values)
    max_pos_err_steps = 0.0
    ratios = []
    for (x, y) in peaks:
        d = round(x / p_rs.omega_m)
        max_pos_err_steps = max(max_pos_err_steps, abs(x - d * p_rs.omega_m) / step)
        tails = sum(
            absorption_term(x, dd, n, p_rs)
            for dd in range(-6, 7)
            if dd != d and n + dd >= 0
        )
        ratios.append((y - tails) / abs(franck_condon(n + d, n, p_rs.eta)))
    height_spread = max(ratios) / min(ratios) - 1.0 if ratios else math.inf
    geometry_ok = len(peaks) >= 5 and max_pos_err_steps < 0.5 and height_spread < 0.01
    return CheckResult("g0-reduction", identity_ok and geometry_ok, {
        "identity_max_rel_err": worst, "identity_tolerance": 1e-12,
        "resolved_regime_omega_m_over_s": p_rs.omega_m / p_rs.s,
        "peak_count": len(peaks),
        "max_position_err_grid_steps": max_pos_err_steps, "position_tolerance_steps": 0.5,
        "height_over_coefficient_spread": height_spread, "height_tolerance": 0.01,
    })


def check_oracle_equivalence() -> CheckResult:
    n = int(OptomechConfig().n_phonon)
    # exact anchor: no coupling
    _, _, derived0, p0 = _system("67Zn", power_w=0.0)
    op0 = oracle_mod.OracleParams.from_derived(derived0)
    grid0 = default_grid(p0.omega_m, points=201)
    anchor = oracle_mod.compare_with_analytic(op0, n, grid0)
    anchor_ok = anchor["global_max"] < 1e-10

    # figure regime: report documents agreement or the structured discrepancy
    _, _, derived2, p2 = _system("67Zn", power_w=2e-9)
    op2 = oracle_mod.OracleParams.from_derived(derived2)
    grid2 = default_grid(p2.omega_m, points=501)
    fig_regime = oracle_mod.compare_with_analytic(op2, n, grid2)
    documented = fig_regime["within_tolerance"] or "documented_discrepancy" in fig_regime
    machine_readable = json.loads(json.dumps(fig_regime)) == fig_regime
    passed = anchor_ok and documented and machine_readable
    return CheckResult("oracle-equivalence", passed, {
        "g0_anchor_max_rel_err": anchor["global_max"], "g0_anchor_tolerance": 1e-10,
        "figure_regime_report": fig_regime,
    })


def check_transparency() -> CheckResult:
    n = int(OptomechConfig().n_phonon)
    powers = np.linspace(0.0, 5e-9, 11)
    contrasts = []
    for p_w in powers:
        _, _, _, p = _system("67Zn", power_w=float(p_w))
        contrasts.append(dip_metrics(n, p, points=3001).contrast)
    monotone = all(b >= a - 1e-12 for a, b in zip(contrasts, contrasts[1:]))
    top = contrasts[-1]

    dips_ok = True
    dip_rows = {}
    for p_w in (2e-9, 5e-9):
        _, _, _, p = _system("67Zn", power_w=p_w)
        for d in (-2, -1, 0, 1, 2):
            center = d * p.omega_m
            local = np.linspace(center - 2 * p.s, center + 2 * p.s, 2001)
            vals = absorption(local, n, p)
            minima = [
                local[i]
                for i in range(1, len(vals) - 1)
                if vals[i] < vals[i - 1] and vals[i] < vals[i + 1]
            ]
            has_dip = any(abs(x - center) <= p.s for x in minima)
            dip_rows[f"P={p_w * 1e9:g}nW,d={d:+d}"] = has_dip
            dips_ok = dips_ok and has_dip
    passed = monotone and top > 0.9 and dips_ok
    return CheckResult("transparency-dip", passed, {
        "powers_w": [float(x) for x in powers],
        "contrasts": contrasts,
        "monotone_nondecreasing": monotone,
        "top_contrast": top, "top_threshold": 0.9,
        "dips_at_line_centers": dip_rows,
    })


def check_peak_positions() -> CheckResult:
    """Dressed-state estimate vs measured central-line split.

    The estimate contains the photon occupation only through the truncated
    model; the closed-form spectrum does not depend on it, so the comparison
    against the spectrum uses v = 0 while the v = n_cav variant is checked
    against the truncated solver's own splitting. The estimate is asymptotic:
    the relative error vs measured split is recorded across the whole sweep
    (it exceeds 5% below ~2 nW where the split is still far above the grid
    guard), and the pass condition measures the figure-regime powers.
    """
    n = int(OptomechConfig().n_phonon)
    guard_steps = 4 * (2 * DEFAULT_GRID_SPAN) / (DEFAULT_GRID_POINTS - 1)  # in omega_m units
    curve = {}
    for p_nw in (0.5, 1.0, 1.5, 2.0, 3.5, 5.0):
        _, _, derived, p = _system("67Zn", power_w=p_nw * 1e-9)
        metrics = dip_metrics(n, p, points=8001)
        pair = peak_positions(p.g, p.s, n, 0)
        row = {"line_split": metrics.line_split, "full_split": metrics.split}
        if pair and metrics.line_split:
            formula = pair[1] - pair[0]
            row["formula_split"] = formula
            row["rel_err"] = abs(metrics.line_split - formula) / formula
            row["exceeds_grid_guard"] = metrics.line_split > guard_steps * p.omega_m
        curve[f"{p_nw:g}nW"] = row

    figure_powers = ("2nW", "3.5nW", "5nW")
    spectrum_ok = all(
        curve[k].get("rel_err", math.inf) <= 0.05 and curve[k]["exceeds_grid_guard"]
        for k in figure_powers
    )

    model_rows = {}
    model_ok = True
    for p_nw in (2.0, 5.0):
        _, _, derived, p = _system("67Zn", power_w=p_nw * 1e-9)
        op = oracle_mod.OracleParams.from_derived(derived)
        pair = peak_positions(p.g, p.s, n, op.v)
        g_eff = p.g * math.sqrt(n + op.v + 2 * n * op.v)
        span = 1.6 * g_eff
        grid = np.linspace(-span, span, 200001)
        vals = np.imag(oracle_mod.steady_state_solve(op, n, n, grid))
        peaks = sorted(find_peaks(grid, vals), key=lambda t: -t[1])[:2]
        measured = abs(peaks[0][0] - peaks[1][0]) if len(peaks) == 2 else None
        rel = abs(measured - (pair[1] - pair[0])) / (pair[1] - pair[0]) if (measured and pair) else math.inf
        model_rows[f"{p_nw:g}nW"] = {"measured": measured, "formula": pair[1] - pair[0] if pair else None, "rel_err": rel}
        model_ok = model_ok and rel <= 0.05

    return CheckResult("peak-position-crosscheck", spectrum_ok and model_ok, {
        "spectrum_vs_formula_v0": curve,
        "figure_powers": list(figure_powers),
        "tolerance": 0.05,
        "truncated_model_vs_formula_vncav": model_rows,
    })


def check_time_evolution() -> CheckResult:
    op = oracle_mod.OracleParams(
        omega_m=4e5, delta_c=-4e5, s=1e5, gamma=3e4,
        g=1e4, omega_rabi=1.0, eta=1e-3, v=1.0,
    )
    n = m = 4
    basis = oracle_mod.TruncatedBasis.build(n, m, op.v)
    rho0 = oracle_mod.prepared_state(basis)
    dt = 0.01 / 4e5
    t_end = 14.0 / op.s
    times, frames = oracle_mod.time_evolve(
        rho0, op, n, m, delta=0.0, t_end=t_end, dt=dt,
        include_ground_bs=False, record_every=10**9,
    )
    rho_end = frames[-1]
    i_e = basis.index("e", op.v, float(m))
    i_g = basis.index("g", op.v, float(n))
    evolved = rho_end[i_e, i_g]
    target = oracle_mod.steady_state_solve(op, n, m, 0.0)
    rel = abs(evolved - target) / abs(target)
    converged = rel < 1e-5

    # zero-decoherence trace conservation over 1e4 RK4 steps
    op_free = oracle_mod.OracleParams(
        omega_m=4e5, delta_c=-4e5, s=0.0, gamma=0.0,
        g=2e4, omega_rabi=5e3, eta=0.05, v=1.0,
    )
    basis_f = oracle_mod.TruncatedBasis.build(3, 3, op_free.v)
    rho0_f = oracle_mod.prepared_state(basis_f)
    dt_f = 0.01 / 4e5
    times_f, frames_f = oracle_mod.time_evolve(
        rho0_f, op_free, 3, 3, delta=0.0, t_end=10_000 * dt_f, dt=dt_f,
        include_ground_bs=True, record_every=1000,
    )
    trace_err = max(abs(np.trace(f).real - 1.0) + abs(np.trace(f).imag) for f in frames_f)
    trace_ok = trace_err < 1e-10
    return CheckResult("time-evolution", converged and trace_ok, {
        "long_time_rel_err": rel, "long_time_tolerance": 1e-5,
        "steps": int(round(t_end / dt)),
        "zero_decoherence_trace_err": trace_err, "trace_tolerance": 1e-10,
        "trace_steps": 10_000,
    })


def check_sideband_counts() -> CheckResult:
    n = int(OptomechConfig().n_phonon)
    rows = {}
    for name in ("229Th", "73Ge", "67Zn"):
        _, _, _, p = _system(name, power_w=0.0)
        grid = default_grid(p.omega_m)
        vals = absorption(grid, n, p)
        peaks = find_peaks(grid, vals)
        a0 = absorption(0.0, n, p)
        strengths = {}
        for d in range(1, 7):
            strengths[d] = absorption_term(d * p.omega_m, d, n, p) / a0
        rows[name] = {"peak_count": len(peaks), "sideband_strengths": strengths}
    th = rows["229Th"]
    ge = rows["73Ge"]
    zn = rows["67Zn"]
    th_ok = th["peak_count"] == 1 and max(th["sideband_strengths"].values()) < ZERO_PHONON_ONLY_STRENGTH
    ge_ok = ge["sideband_strengths"][1] >= RESOLVABLE_STRENGTH
    zn_ok = (
        zn["peak_count"] >= 5
        and zn["sideband_strengths"][1] >= RESOLVABLE_STRENGTH
        and zn["sideband_strengths"][2] >= RESOLVABLE_STRENGTH
    )
    return CheckResult("sideband-count", th_ok and ge_ok and zn_ok, {
        "rows": rows,
        "zero_phonon_only_threshold": ZERO_PHONON_ONLY_STRENGTH,
        "resolvable_threshold": RESOLVABLE_STRENGTH,
    })


def check_performance() -> CheckResult:
    _, _, _, p = _system("67Zn", power_w=2e-9)
    n = int(OptomechConfig().n_phonon)
    grid = default_grid(p.omega_m, points=10001)
    absorption(grid, n, p)  # warm
    start = time.perf_counter()
    absorption(grid, n, p)
    elapsed = time.perf_counter() - start
    return CheckResult("performance", elapsed < 1.0, {
        "spectrum_points": 10001, "elapsed_seconds": elapsed, "limit_seconds": 1.0,
    })


_CHECKS = (
    check_table_eta,
    check_table_nmin,
    check_franck_condon_paths,
    check_g0_reduction,
    check_oracle_equivalence,
    check_transparency,
    check_peak_positions,
    check_time_evolution,
    check_sideband_counts,
    check_performance,
)


def run_validation(inject_failure: str | None = None) -> ValidationReport:
    """Run every check; inject_failure flips the named check (test hook)."""
    start = time.perf_counter()
    results = []
    for fn in _CHECKS:
        result = fn()
        if inject_failure and result.name == inject_failure:
            result.passed = False
            result.details["injected_failure"] = True
        results.append(result)
    known = {r.name for r in results}
    if inject_failure and inject_failure not in known:
        results.append(CheckResult(inject_failure, False, {"injected_failure": True, "unknown_check": True}))
    return ValidationReport(checks=results, elapsed_seconds=time.perf_counter() - start)
