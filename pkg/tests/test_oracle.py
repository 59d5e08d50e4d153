import numpy as np
import pytest
from scipy.linalg import expm

from modlz.dynamics import invariant_matrix, propagator, transfer_probability
from modlz.model import hamiltonian, make_params, spin_operators
from modlz.oracle import (DegenerateSpectrumError, LevelTrackingError,
                          adiabatic_frame, integrate_schrodinger,
                          oracle_propagator, survival_probability,
                          transition_matrix, transition_matrix_series)

P = make_params(1.0, 0.8, 0.5)
OPS = spin_operators(0.5)


def _basis_state(dim, k):
    psi = np.zeros(dim, dtype=complex)
    psi[k] = 1.0
    return psi


def test_norm_drift_within_tolerance_budget():
    tau = 10.0 / P.nu
    traj = integrate_schrodinger(P, OPS, _basis_state(2, 0), -tau, tau,
                                 tol=1e-10, points=401)
    assert traj.norm_drift < 1e-9


def test_rejects_unnormalized_state_and_bad_tol():
    with pytest.raises(ValueError, match="normalized"):
        integrate_schrodinger(P, OPS, np.array([1.0, 1.0]), 0.0, 1.0)
    with pytest.raises(ValueError, match="tol"):
        integrate_schrodinger(P, OPS, _basis_state(2, 0), 0.0, 1.0,
                              tol=1e-3)
    with pytest.raises(ValueError, match="tol"):
        integrate_schrodinger(P, OPS, _basis_state(2, 0), 0.0, 1.0,
                              tol=1e-14)


def test_frozen_hamiltonian_limit():
    """Over a tiny window the result matches the matrix exponential.

    The midpoint Hamiltonian keeps the freeze error at O(dt^3), below
    the comparison tolerance.
    """
    dt = 1e-4
    h = hamiltonian(P, OPS, 0.3 + dt / 2)
    expected = expm(-1j * h * dt) @ _basis_state(2, 0)
    traj = integrate_schrodinger(P, OPS, _basis_state(2, 0), 0.3, 0.3 + dt,
                                 tol=1e-12, points=2)
    assert np.allclose(traj.amplitudes[-1], expected, atol=1e-10)


def test_step_refinement_converges_at_nominal_order():
    """Halving a hard step cap scales the error like a fifth-order rule."""
    tau = 5.0 / P.nu
    ref = propagator(P, -tau, tau)[:, 0]

    def err(h):
        traj = integrate_schrodinger(P, OPS,
                                     _basis_state(2, 0) + 0j, -tau, tau,
                                     tol=9e-5, points=2, max_step=h)
        # remove the global phase before comparing to the closed form
        final = traj.amplitudes[-1]
        phase = np.vdot(ref, final)
        return np.linalg.norm(final - (phase / abs(phase)) * ref)

    e1, e2 = err(tau / 30), err(tau / 60)
    order = np.log2(e1 / e2)
    assert 4.0 < order < 6.0


def test_time_reversal_round_trip():
    tau = 6.0 / P.nu
    tol = 1e-10
    fwd = integrate_schrodinger(P, OPS, _basis_state(2, 0), -tau, tau,
                                tol=tol, points=3)
    back = integrate_schrodinger(P, OPS, fwd.amplitudes[-1]
                                 / np.linalg.norm(fwd.amplitudes[-1]),
                                 tau, -tau, tol=tol, points=3)
    assert np.linalg.norm(back.amplitudes[-1] - _basis_state(2, 0)) \
        < 100 * tol


def test_invariant_expectation_is_conserved():
    for j in (0.5, 1.5):
        params = make_params(1.0, 0.8, j)
        ops = spin_operators(j)
        tau = 8.0 / params.nu
        traj = integrate_schrodinger(params, ops, _basis_state(ops.dim, 0),
                                     -tau, tau, tol=1e-10, points=101)
        values = [np.vdot(a, invariant_matrix(params, ops, t) @ a).real
                  for t, a in zip(traj.times, traj.amplitudes)]
        assert np.max(np.abs(np.array(values) - values[0])) < 1e-8


def test_trajectory_dense_output_accessor():
    traj = integrate_schrodinger(P, OPS, _basis_state(2, 0), -1.0, 1.0,
                                 tol=1e-10, points=11)
    mid = traj.at(0.37)
    assert mid.t == 0.37
    assert np.linalg.norm(mid.amplitudes) == pytest.approx(1.0, abs=1e-9)
    s = traj.state(0)
    assert s.t == -1.0


@pytest.mark.parametrize("j,eta_over_nu,nu_tau", [
    (0.5, 1.25, 5.0), (0.5, 5.0, 10 * np.pi),
    (1.0, 2.0, 10.0), (1.5, 1.25, 10.0), (2.0, 5.0, 5.0),
])
def test_oracle_vs_exact_propagator(j, eta_over_nu, nu_tau):
    """Spot checks of the full grid exercised in the acceptance suite."""
    nu = 0.8
    params = make_params(eta_over_nu * nu, nu, j)
    ops = spin_operators(j)
    tau = nu_tau / nu
    u_num = oracle_propagator(params, ops, -tau, tau, tol=1e-10)
    assert np.linalg.norm(u_num - propagator(params, -tau, tau), 2) < 1e-6


def test_adiabatic_frame_energies_at_zero():
    frame = adiabatic_frame(P, OPS, 0.0)
    assert np.allclose(frame.energies, [-0.5, 0.5], atol=1e-14)


def test_adiabatic_frame_eigen_relation():
    params = make_params(1.0, 0.8, 1.5)
    ops = spin_operators(1.5)
    for t in (-4.0, -0.2, 1.1):
        frame = adiabatic_frame(params, ops, t)
        h = hamiltonian(params, ops, t)
        for k in range(4):
            resid = h @ frame.vectors[:, k] \
                - frame.energies[k] * frame.vectors[:, k]
            assert np.linalg.norm(resid) < 1e-10
        assert np.all(np.diff(frame.energies) > 0)


def test_adiabatic_frame_far_past_is_spin_basis():
    frame = adiabatic_frame(P, OPS, -1e7)
    assert np.allclose(np.abs(frame.vectors), np.eye(2), atol=1e-6)


def test_adiabatic_frame_reference_gauge_deterministic():
    a = adiabatic_frame(P, OPS, 0.4)
    b = adiabatic_frame(P, OPS, 0.4)
    assert np.array_equal(a.vectors, b.vectors)
    # largest component of each column is real positive
    for k in range(2):
        col = a.vectors[:, k]
        top = col[np.argmax(np.abs(col))]
        assert abs(top.imag) < 1e-15 and top.real > 0


def test_adiabatic_frame_continuity_gauge():
    prev = adiabatic_frame(P, OPS, -1.0)
    cur = adiabatic_frame(P, OPS, -0.99, prev=prev)
    for k in range(2):
        ov = np.vdot(prev.vectors[:, k], cur.vectors[:, k])
        assert ov.real > 0
    again = adiabatic_frame(P, OPS, -0.99, prev=prev)
    assert np.array_equal(cur.vectors, again.vectors)


def test_adiabatic_frame_tracking_failure_is_loud():
    prev = adiabatic_frame(P, OPS, -5.0)
    with pytest.raises(LevelTrackingError, match="refine"):
        adiabatic_frame(P, OPS, 5.0, prev=prev)


def test_degenerate_spectrum_guard():
    # with kappa = 0 the whole spectrum collapses like eta/(1+(nu t)^2),
    # so far out the gaps drop below the guard threshold
    flat = make_params(1.0, 1.0, 1.0)
    ops = spin_operators(1.0)
    with pytest.raises(DegenerateSpectrumError):
        adiabatic_frame(flat, ops, 1e7)


def _all_level_trajectories(params, ops, tau, points, tol=1e-10):
    return [integrate_schrodinger(params, ops,
                                  _basis_state(ops.dim, k), -tau, tau,
                                  tol=tol, points=points)
            for k in range(ops.dim)]


def test_transition_matrix_identity_at_start_and_stochastic():
    params = make_params(1.0, 0.8, 1.0)
    ops = spin_operators(1.0)
    tau = 10 * np.pi / params.nu
    trajs = _all_level_trajectories(params, ops, tau, points=201)
    start = transition_matrix(params, ops, trajs, trajs[0].times[0])
    assert np.allclose(start.matrix, np.eye(3), atol=1e-2)
    series = transition_matrix_series(params, ops, trajs)
    for tm in series[:: 40]:
        assert np.all(tm.matrix >= -1e-12)
        assert np.all(tm.matrix <= 1.0 + 1e-12)
        assert np.allclose(tm.matrix.sum(axis=0), 1.0, atol=1e-8)
        assert np.allclose(tm.matrix.sum(axis=1), 1.0, atol=1e-8)


def test_transition_matrix_needs_matching_grids():
    trajs = _all_level_trajectories(P, OPS, 5.0, points=51)
    other = integrate_schrodinger(P, OPS, _basis_state(2, 1), -5.0, 5.0,
                                  tol=1e-10, points=61)
    with pytest.raises(ValueError, match="grid"):
        transition_matrix(P, OPS, [trajs[0], other], 0.0)
    with pytest.raises(ValueError, match="grid"):
        transition_matrix(P, OPS, trajs, 0.123456)


def test_transition_matrix_wrong_trajectory_count():
    trajs = _all_level_trajectories(P, OPS, 5.0, points=51)
    with pytest.raises(ValueError, match="2"):
        transition_matrix(P, OPS, trajs[:1], 0.0)


def test_survival_recovers_transfer_complement():
    """Two-level: the tracked level keeps roughly 1 - P_delta at the end.

    The match to the closed-form P is limited by the residual tilt of
    the adiabatic axis at the window edge, which shrinks as 1/(nu tau),
    so a wider window has to agree better.
    """
    def gap(nu_tau):
        tau = nu_tau / P.nu
        trajs = _all_level_trajectories(P, OPS, tau, points=201)
        rep = transfer_probability(P, tau)
        s_start = survival_probability(P, OPS, trajs, 0.5, -tau)
        assert s_start == pytest.approx(1.0, abs=2e-3)
        return abs(survival_probability(P, OPS, trajs, 0.5, tau) - rep.p)

    near, far = gap(10 * np.pi), gap(40 * np.pi)
    assert near < 2e-3
    assert far < near / 3


def test_mirrored_intermediate_transitions_for_integer_spin():
    """Starting from the middle level, the outer levels fill evenly."""
    params = make_params(1.0, 0.8, 1.0)
    ops = spin_operators(1.0)
    tau = 10 * np.pi / params.nu
    trajs = _all_level_trajectories(params, ops, tau, points=401)
    series = transition_matrix_series(params, ops, trajs)
    idx_t = 200  # t = 0 by symmetry of the grid
    tm = series[idx_t].matrix
    assert tm[0, 1] == pytest.approx(tm[2, 1], abs=1e-6)
