import math

import numpy as np
import pytest

from xomit.errors import DomainError, StepSizeError
from xomit.nuclides import get_nuclide
from xomit.optomech import OptomechConfig, derive
from xomit.oracle import (
    DECOHERENCE_MODEL_ID,
    OracleParams,
    TruncatedBasis,
    build_hamiltonian,
    coherence_offsets,
    compare_with_analytic,
    prepared_state,
    steady_state_solve,
    time_evolve,
)
from xomit.spectrum import LineParams, steady_state_coherence

N = 5_000_000


def _params(power_w=2e-9, **overrides):
    derived = derive(OptomechConfig(power_w=power_w, **overrides), get_nuclide("67Zn"))
    return OracleParams.from_derived(derived)


@pytest.fixture(scope="module")
def fig_params():
    return _params()


def test_basis_construction():
    basis = TruncatedBasis.build(N, N, 662.0)
    assert basis.dim == 6
    labels = [(st.species, st.photon, st.phonon) for st in basis.states]
    assert ("g", 662.0, N) in labels
    assert ("e", 663.0, N - 1) in labels


def test_basis_shrinks_at_boundaries():
    assert TruncatedBasis.build(4, 5, 0.0).dim == 4  # drops the photon -1 pair
    assert TruncatedBasis.build(0, 1, 0.0).dim == 3  # also drops (g, v+1, n-1)
    assert TruncatedBasis.build(0, 0, 0.0).dim == 2  # and (e, v+1, m-1)
    with pytest.raises(DomainError):
        TruncatedBasis.build(-1, 0, 0.0)


def test_hamiltonian_hermitian(fig_params):
    basis = TruncatedBasis.build(N, N + 2, fig_params.v)
    for delta in (0.0, 1e6, -3e6):
        h = build_hamiltonian(basis, fig_params, delta)
        np.testing.assert_array_equal(h, h.conj().T)


def test_hamiltonian_diagonal_when_uncoupled():
    p = OracleParams(omega_m=1e6, delta_c=-1e6, s=1e5, gamma=1e4,
                     g=0.0, omega_rabi=0.0, eta=1e-4, v=2.0)
    basis = TruncatedBasis.build(5, 5, 2.0)
    h = build_hamiltonian(basis, p, delta=0.5e6)
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0


def test_beam_splitter_elements_against_ladder_product():
    # reference: a'b + ab' assembled from dense ladder operators on a small
    # photon x phonon Fock grid
    dim = 10
    a = np.diag(np.sqrt(np.arange(1, dim)), k=1)  # annihilation
    ad = a.T
    b = np.diag(np.sqrt(np.arange(1, dim)), k=1)
    bd = b.T
    bs = np.kron(ad @ np.eye(dim), np.eye(dim)) @ np.kron(np.eye(dim), b)
    bs = np.kron(ad, b) + np.kron(a, bd)

    def ref_element(c2, mu2, c1, mu1):
        return bs[c2 * dim + mu2, c1 * dim + mu1]

    g = 37.0
    p = OracleParams(omega_m=1e6, delta_c=-1e6, s=1e5, gamma=1e4,
                     g=g, omega_rabi=0.0, eta=0.0, v=3.0)
    n, m = 4, 5
    basis = TruncatedBasis.build(n, m, 3.0)
    h = build_hamiltonian(basis, p, delta=0.0)
    i = basis.index("e", 3.0, float(m))
    j = basis.index("e", 4.0, float(m - 1))
    assert h[i, j] == pytest.approx(-g * ref_element(4, m - 1, 3, m), rel=1e-14)
    assert abs(h[i, j]) == pytest.approx(g * math.sqrt((3 + 1) * m), rel=1e-14)
    k = basis.index("e", 2.0, float(m + 1))
    assert h[i, k] == pytest.approx(-g * ref_element(2, m + 1, 3, m), rel=1e-14)


def test_drive_elements_carry_sideband_coefficients(fig_params):
    from xomit.franck_condon import franck_condon

    basis = TruncatedBasis.build(N, N + 1, fig_params.v)
    h = build_hamiltonian(basis, fig_params, delta=0.0)
    i = basis.index("e", fig_params.v, float(N + 1))
    j = basis.index("g", fig_params.v, float(N))
    expected = -(fig_params.omega_rabi / 2.0) * franck_condon(N + 1, N, fig_params.eta)
    assert h[i, j] == pytest.approx(expected, rel=1e-14)
    assert h[j, i] == np.conj(h[i, j])


def test_solve_matches_closed_form_at_zero_coupling():
    params = _params(power_w=0.0)
    line = params.line_params()
    grid = np.linspace(-3 * line.omega_m, 3 * line.omega_m, 101)
    for d in (-3, 0, 2):
        numeric = steady_state_solve(params, N, N + d, grid)
        analytic = steady_state_coherence(N + d, N, grid, line)
        np.testing.assert_allclose(np.abs(numeric - analytic), 0.0, atol=1e-12 * np.abs(analytic).max())


def test_solve_matches_closed_form_at_phonon_vacuum(fig_params):
    # with n = 0 and v = 0 the interference pathway vanishes on both routes
    params = OracleParams(
        omega_m=fig_params.omega_m, delta_c=fig_params.delta_c, s=fig_params.s,
        gamma=fig_params.gamma, g=fig_params.g, omega_rabi=fig_params.omega_rabi,
        eta=fig_params.eta, v=0.0,
    )
    line = params.line_params()
    grid = np.linspace(-3 * line.omega_m, 3 * line.omega_m, 101)
    for m in (0, 1, 4):
        numeric = steady_state_solve(params, 0, m, grid)
        analytic = steady_state_coherence(m, 0, grid, line)
        np.testing.assert_allclose(np.abs(numeric - analytic), 0.0, atol=1e-12 * np.abs(analytic).max())


def test_solve_zero_drive(fig_params):
    silent = OracleParams(
        omega_m=fig_params.omega_m, delta_c=fig_params.delta_c, s=fig_params.s,
        gamma=fig_params.gamma, g=fig_params.g, omega_rabi=0.0,
        eta=fig_params.eta, v=fig_params.v,
    )
    assert steady_state_solve(silent, N, N, 0.0) == 0.0


def test_solve_linear_in_drive(fig_params):
    doubled = OracleParams(
        omega_m=fig_params.omega_m, delta_c=fig_params.delta_c, s=fig_params.s,
        gamma=fig_params.gamma, g=fig_params.g, omega_rabi=2 * fig_params.omega_rabi,
        eta=fig_params.eta, v=fig_params.v,
    )
    grid = np.linspace(-2e6, 2e6, 7)
    one = np.asarray(steady_state_solve(fig_params, N, N, grid))
    two = np.asarray(steady_state_solve(doubled, N, N, grid))
    np.testing.assert_allclose(two, 2.0 * one, rtol=1e-12)


def test_coherence_offsets_window(fig_params):
    out = coherence_offsets(fig_params, N, 0.0)
    assert sorted(out) == list(range(-6, 7))
    shallow = coherence_offsets(fig_params, 2, 0.0)
    assert sorted(shallow) == list(range(-2, 7))


def test_time_evolve_pure_decay():
    p = OracleParams(omega_m=1e5, delta_c=-1e5, s=2e4, gamma=1e4,
                     g=0.0, omega_rabi=0.0, eta=0.0, v=1.0)
    basis = TruncatedBasis.build(2, 2, 1.0)
    rho0 = prepared_state(basis)
    i_e = basis.index("e", 1.0, 2.0)
    i_g = basis.index("g", 1.0, 2.0)
    rho0[i_e, i_g] = 0.3
    rho0[i_g, i_e] = 0.3
    # kill the Hamiltonian so only the dissipator acts
    p_free = OracleParams(omega_m=0.0, delta_c=0.0, s=2e4, gamma=1e4,
                          g=0.0, omega_rabi=0.0, eta=0.0, v=1.0)
    t_end = 8e-5
    times, frames = time_evolve(rho0, p_free, 2, 2, delta=0.0, t_end=t_end, dt=1e-7)
    expected = 0.3 * math.exp(-p_free.s * t_end)
    assert frames[-1][i_e, i_g] == pytest.approx(expected, rel=1e-8)


def test_time_evolve_matches_linear_solve():
    p = OracleParams(omega_m=4e5, delta_c=-4e5, s=1e5, gamma=3e4,
                     g=1e4, omega_rabi=1.0, eta=1e-3, v=1.0)
    basis = TruncatedBasis.build(4, 4, 1.0)
    rho0 = prepared_state(basis)
    dt = 0.01 / 4e5
    times, frames = time_evolve(rho0, p, 4, 4, delta=0.0, t_end=14.0 / p.s, dt=dt,
                                include_ground_bs=False, record_every=10**9)
    evolved = frames[-1][basis.index("e", 1.0, 4.0), basis.index("g", 1.0, 4.0)]
    target = steady_state_solve(p, 4, 4, 0.0)
    assert abs(evolved - target) / abs(target) < 1e-5


def test_time_evolve_ground_rabi_against_matrix_exponential():
    # no drive, no decoherence: population oscillates through the ground
    # beam-splitter chain; reference is the exact eigendecomposition propagator
    p = OracleParams(omega_m=3e5, delta_c=-3e5, s=0.0, gamma=0.0,
                     g=2e4, omega_rabi=0.0, eta=0.0, v=2.0)
    n = m = 3
    basis = TruncatedBasis.build(n, m, 2.0)
    rho0 = prepared_state(basis)
    h = build_hamiltonian(basis, p, delta=0.0)
    t_end = 2.5e-4
    dt = 0.01 / 3e5
    times, frames = time_evolve(rho0, p, n, m, delta=0.0, t_end=t_end, dt=dt, record_every=10**9)
    w, u = np.linalg.eigh(h)
    steps = int(round(t_end / dt))
    propagator = u @ np.diag(np.exp(-1j * w * steps * dt)) @ u.conj().T
    expected = propagator @ rho0 @ propagator.conj().T
    np.testing.assert_allclose(frames[-1], expected, atol=1e-8)
    # energy is conserved without decoherence
    e0 = np.trace(h @ rho0).real
    e1 = np.trace(h @ frames[-1]).real
    assert e1 == pytest.approx(e0, rel=1e-8)


def test_time_evolve_preserves_hermiticity_and_contracts_trace(fig_params):
    basis = TruncatedBasis.build(N, N, fig_params.v)
    rho0 = prepared_state(basis)
    i_e = basis.index("e", fig_params.v, float(N))
    rho0 *= 0.5
    rho0[i_e, i_e] = 0.5
    dt = 0.45e-8
    times, frames = time_evolve(rho0, fig_params, N, N, delta=0.0, t_end=2000 * dt, dt=dt,
                                record_every=100)
    traces = [np.trace(f).real for f in frames]
    assert all(b <= a + 1e-12 for a, b in zip(traces, traces[1:]))
    for f in frames:
        np.testing.assert_allclose(f, f.conj().T, atol=1e-10)


def test_time_evolve_step_size_guard(fig_params):
    basis = TruncatedBasis.build(N, N, fig_params.v)
    rho0 = prepared_state(basis)
    with pytest.raises(StepSizeError):
        time_evolve(rho0, fig_params, N, N, delta=0.0, t_end=1e-6, dt=1e-5)
    with pytest.raises(StepSizeError):
        time_evolve(rho0, fig_params, N, N, delta=0.0, t_end=1e-6, dt=-1.0)


def test_compare_report_exact_at_zero_coupling():
    params = _params(power_w=0.0)
    grid = np.linspace(-1e7, 1e7, 101)
    report = compare_with_analytic(params, N, grid)
    assert report["within_tolerance"] is True
    assert report["global_max"] < 1e-10
    assert report["decoherence_model_id"] == DECOHERENCE_MODEL_ID
    assert "documented_discrepancy" not in report


def test_compare_report_documents_discrepancy(fig_params):
    grid = np.linspace(-1e7, 1e7, 101)
    report = compare_with_analytic(fig_params, N, grid)
    assert report["within_tolerance"] is False
    assert "documented_discrepancy" in report
    assert report["regime_flags"]["regime_violation"] is False
    assert set(report["per_offset_max_rel_err"]) == {str(d) for d in range(-6, 7)}


def test_compare_report_flags_regime_violation(fig_params):
    loud = OracleParams(
        omega_m=fig_params.omega_m, delta_c=fig_params.delta_c, s=fig_params.s,
        gamma=fig_params.gamma, g=fig_params.g, omega_rabi=0.5 * fig_params.g,
        eta=fig_params.eta, v=fig_params.v,
    )
    report = compare_with_analytic(loud, N, np.linspace(-1e6, 1e6, 11))
    assert report["regime_flags"]["weak_drive"] is False
    assert report["regime_flags"]["regime_violation"] is True
