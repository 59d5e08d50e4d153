"""Brute-force verification path: direct integration of the dynamics.

Nothing in this module knows the closed-form solution.  States are
propagated by an adaptive Runge-Kutta 5(4) integrator with dense output,
which makes the module an independent witness for the exact propagator,
the transfer formula, and the transition-probability matrix

    T[m, n](t) = |<v_m(t) | psi_n(t)>|^2,

where v_m are the instantaneous eigenvectors of H(t) (the adiabatic
frame) and psi_n is the trajectory started in the Jz state |n>.  Levels
are indexed m = +j ... -j by ascending instantaneous energy, the order
being time-independent because the spectrum of H(t) never crosses for
any kappa >= 0 at finite t.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .model import hamiltonian

TOL_RANGE = (1e-13, 1e-4)
DEFAULT_POINTS = 2001  # odd, so a symmetric window samples t = 0


class LevelTrackingError(RuntimeError):
    """Adiabatic continuity lost between successive frames (grid too coarse)."""


class DegenerateSpectrumError(RuntimeError):
    """Instantaneous spectrum too close to degenerate to fix a gauge."""


@dataclass(frozen=True)
class QuantumState:
    """Amplitudes over the Jz basis (m = +j ... -j) at one instant."""

    t: float
    amplitudes: np.ndarray


def _check_tol(tol):
    if not (TOL_RANGE[0] <= tol <= TOL_RANGE[1]):
        raise ValueError(f"tol must lie in [{TOL_RANGE[0]:g}, "
                         f"{TOL_RANGE[1]:g}], got {tol!r}")


@dataclass
class Trajectory:
    """Solution samples on a fixed grid, plus the dense interpolant."""

    times: np.ndarray
    amplitudes: np.ndarray   # shape (len(times), dim)
    norm_drift: float        # max | ||psi|| - 1 | over the grid
    sol: object              # scipy dense-output callable

    def state(self, i):
        return QuantumState(t=float(self.times[i]),
                            amplitudes=self.amplitudes[i])

    def at(self, t):
        return QuantumState(t=float(t), amplitudes=self.sol(t))


def integrate_schrodinger(params, ops, psi0, t0, t1, tol=1e-10,
                          points=DEFAULT_POINTS, max_step=None):
    """Integrate i dpsi/dt = H(t) psi from t0 to t1 on a fixed output grid.

    psi0 must be normalized.  A span with t0 > t1 integrates backward in
    time.  Returns a Trajectory; its norm_drift should stay below 10*tol
    for a healthy run.  max_step caps the internal step, which is only
    useful for convergence-order studies; leave it None otherwise.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (ops.dim,):
        raise ValueError(f"psi0 must have shape ({ops.dim},)")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-8:
        raise ValueError("psi0 must be normalized to 1")
    _check_tol(tol)

    def rhs(t, y):
        return -1j * (hamiltonian(params, ops, t) @ y)

    grid = np.linspace(t0, t1, points)
    res = solve_ivp(rhs, (t0, t1), psi0, method="RK45", rtol=tol, atol=tol,
                    dense_output=True, t_eval=grid,
                    max_step=np.inf if max_step is None else max_step)
    if not res.success:
        raise RuntimeError(f"integration failed: {res.message}")
    amps = res.y.T
    drift = float(np.max(np.abs(np.linalg.norm(amps, axis=1) - 1.0)))
    return Trajectory(times=grid, amplitudes=amps, norm_drift=drift,
                      sol=res.sol)


def oracle_propagator(params, ops, t0, t1, tol=1e-10):
    """Evolution operator U(t1, t0) by integrating the matrix equation."""
    _check_tol(tol)
    dim = ops.dim

    def rhs(t, y):
        return (-1j * hamiltonian(params, ops, t) @ y.reshape(dim, dim)).ravel()

    y0 = np.eye(dim, dtype=complex).ravel()
    res = solve_ivp(rhs, (t0, t1), y0, method="RK45", rtol=tol, atol=tol)
    if not res.success:
        raise RuntimeError(f"integration failed: {res.message}")
    return res.y[:, -1].reshape(dim, dim)


@dataclass
class AdiabaticFrame:
    """Instantaneous eigen-decomposition of H(t) with a continuity gauge.

    energies are ascending; column k of vectors belongs to level
    m = j - k, so the lowest level carries the label m = +j.
    """

    t: float
    energies: np.ndarray
    vectors: np.ndarray


def adiabatic_frame(params, ops, t, prev=None):
    """Eigenvectors of H(t), phase-locked to prev when given.

    Without prev, each column's largest-magnitude component is made real
    positive (a deterministic reference gauge).  With prev, each column
    is rotated so the overlap with its predecessor is real positive;
    an overlap magnitude <= 0.5 means the step was too large to track
    levels and raises LevelTrackingError.
    """
    h = hamiltonian(params, ops, t)
    energies, vectors = np.linalg.eigh(h)
    gaps = np.diff(energies)
    if np.any(gaps < 1e-12 * params.eta):
        raise DegenerateSpectrumError(
            f"spectral gap below 1e-12*eta at t = {t}; gauge undefined")
    vectors = vectors.copy()
    if prev is None:
        for k in range(ops.dim):
            lead = np.argmax(np.abs(vectors[:, k]))
            ph = vectors[lead, k]
            vectors[:, k] *= np.conj(ph) / abs(ph)
    else:
        for k in range(ops.dim):
            o = np.vdot(prev.vectors[:, k], vectors[:, k])
            if abs(o) <= 0.5:
                raise LevelTrackingError(
                    f"level {k} overlap {abs(o):.3f} <= 0.5 between "
                    f"t = {prev.t} and t = {t}; refine the grid")
            vectors[:, k] *= np.conj(o) / abs(o)
    return AdiabaticFrame(t=float(t), energies=energies, vectors=vectors)


@dataclass(frozen=True)
class TransitionMatrix:
    """T[m, n] = |<v_m|psi_n>|^2, rows and columns ordered m = +j ... -j."""

    t: float
    matrix: np.ndarray


def _common_grid(trajectories):
    grid = trajectories[0].times
    for traj in trajectories[1:]:
        if traj.times.shape != grid.shape or not np.array_equal(traj.times,
                                                                grid):
            raise ValueError("trajectories sampled on mismatched grids")
    return grid


def transition_matrix(params, ops, trajectories, t):
    """Overlap matrix of the 2j+1 trajectories against the frame at t.

    trajectories must hold one trajectory per level, ordered by starting
    state m = +j ... -j, all on one output grid containing t.
    """
    if len(trajectories) != ops.dim:
        raise ValueError(f"need {ops.dim} trajectories, got "
                         f"{len(trajectories)}")
    grid = _common_grid(trajectories)
    idx = int(np.argmin(np.abs(grid - t)))
    if abs(grid[idx] - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"t = {t} is not on the trajectory grid")
    frame = adiabatic_frame(params, ops, grid[idx])
    psi = np.stack([traj.amplitudes[idx] for traj in trajectories], axis=1)
    # eigh columns ascend in energy, which is the m = +j ... -j order
    t_mat = np.abs(frame.vectors.conj().T @ psi) ** 2
    return TransitionMatrix(t=float(grid[idx]), matrix=t_mat)


def transition_matrix_series(params, ops, trajectories):
    """TransitionMatrix at every grid time, with gauge tracked along the way.

    The squared overlaps do not depend on the gauge; tracking simply
    keeps the frame deterministic and validates level continuity.
    """
    if len(trajectories) != ops.dim:
        raise ValueError(f"need {ops.dim} trajectories, got "
                         f"{len(trajectories)}")
    grid = _common_grid(trajectories)
    out = []
    frame = None
    for i, t in enumerate(grid):
        frame = adiabatic_frame(params, ops, t, prev=frame)
        psi = np.stack([traj.amplitudes[i] for traj in trajectories], axis=1)
        out.append(TransitionMatrix(
            t=float(t), matrix=np.abs(frame.vectors.conj().T @ psi) ** 2))
    return out


def survival_probability(params, ops, trajectories, n, t):
    """Diagonal element T[n, n](t) for the trajectory that started in |n>."""
    two_j = round(2 * params.j)
    two_n = round(2 * n)
    if abs(2 * n - two_n) > 1e-9 or abs(two_n) > two_j \
            or (two_j - two_n) % 2 != 0:
        raise ValueError(f"n = {n!r} is not a level of the spin-{params.j} "
                         "multiplet")
    idx = (two_j - two_n) // 2
    t_mat = transition_matrix(params, ops, trajectories, t)
    return float(t_mat.matrix[idx, idx])
