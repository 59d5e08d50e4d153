"""Markovian noise on the two-level sweep, in Bloch form.

For j = 1/2 the density matrix is the Bloch vector r = (rx, ry, rz),
with rx = rho_+- + rho_-+, ry = -i(rho_+- - rho_-+), rz = rho_++ -
rho_--.  Damping along each spin axis at rates gamma_{x,y,z} turns the
von Neumann equation into the linear system dr/dt = -M(t) r with

    M = [[(gy+gz)/2,  Omega_z,   0        ],
         [-Omega_z,  (gx+gz)/2,  Omega_x  ],
         [0,         -Omega_x,  (gx+gy)/2 ]].

With all rates zero this is a pure precession (|r| conserved); with
equal rates the decay factors out exactly, |r(t)| = e^{-g(t-t0)}|r(0)|,
which doubles as a built-in integrator cross-check.  The fidelity is
measured against the moving frame state |phi_+(t)>, whose Bloch axis
n(t) is obtained by direct Pauli expectations in that state.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import eigenbasis
from .model import field_components, spin_operators
from .oracle import DEFAULT_POINTS, _check_tol


@dataclass(frozen=True)
class DampingRates:
    """Non-negative damping rates along the three spin axes."""

    gamma_x: float = 0.0
    gamma_y: float = 0.0
    gamma_z: float = 0.0

    def __post_init__(self):
        for name in ("gamma_x", "gamma_y", "gamma_z"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def isotropic(cls, gamma):
        return cls(gamma_x=gamma, gamma_y=gamma, gamma_z=gamma)

    @classmethod
    def dephasing(cls, gamma_z):
        return cls(gamma_z=gamma_z)


@dataclass(frozen=True)
class BlochVector:
    t: float
    rx: float
    ry: float
    rz: float

    @property
    def as_array(self):
        return np.array([self.rx, self.ry, self.rz])

    @property
    def norm(self):
        return float(np.linalg.norm(self.as_array))


def _require_two_level(params):
    if params.dim != 2:
        raise ValueError(f"the noise model is two-level only (got j = "
                         f"{params.j}); multi-level damping is out of scope")


def bloch_rhs(params, rates, t, r):
    """Right-hand side -M(t) r of the damped precession equation."""
    _require_two_level(params)
    omega_x, omega_z = field_components(params, t)
    gx, gy, gz = rates.gamma_x, rates.gamma_y, rates.gamma_z
    m = np.array([
        [0.5 * (gy + gz),  omega_z,          0.0],
        [-omega_z,         0.5 * (gx + gz),  omega_x],
        [0.0,              -omega_x,         0.5 * (gx + gy)],
    ])
    return -m @ np.asarray(r, dtype=float)


@dataclass
class BlochTrajectory:
    """Bloch-vector samples on a fixed grid."""

    times: np.ndarray
    vectors: np.ndarray   # shape (len(times), 3)

    def state(self, i):
        rx, ry, rz = self.vectors[i]
        return BlochVector(t=float(self.times[i]), rx=rx, ry=ry, rz=rz)

    @property
    def final(self):
        return self.state(len(self.times) - 1)


def integrate_master(params, rates, r0, t0, t1, tol=1e-10,
                     points=DEFAULT_POINTS):
    """Integrate dr/dt = -M(t) r from t0 to t1 on a fixed output grid."""
    _require_two_level(params)
    _check_tol(tol)
    r0 = np.asarray(r0, dtype=float)
    if r0.shape != (3,):
        raise ValueError("r0 must be a 3-vector")
    if np.linalg.norm(r0) > 1.0 + 1e-9:
        raise ValueError(f"unphysical r0 (|r0| = {np.linalg.norm(r0):.6f} "
                         "> 1)")
    if t0 > t1:
        raise ValueError("t0 must not exceed t1")

    def rhs(t, r):
        return bloch_rhs(params, rates, t, r)

    grid = np.linspace(t0, t1, points)
    # run the stepper well below the requested tolerance: rtol bounds the
    # local error only, and the norm-decay law is promised globally
    inner = max(tol / 50.0, 3e-14)
    res = solve_ivp(rhs, (t0, t1), r0, method="RK45", rtol=inner,
                    atol=inner, t_eval=grid)
    if not res.success:
        raise RuntimeError(f"integration failed: {res.message}")
    return BlochTrajectory(times=grid, vectors=res.y.T)


_TWO_LEVEL_OPS = spin_operators(0.5)


def target_axis(params, t):
    """Bloch axis n(t) of the upper frame state, via Pauli expectations."""
    _require_two_level(params)
    v = eigenbasis(params, t)[:, 0]
    ops = _TWO_LEVEL_OPS
    return 2.0 * np.array([
        (v.conj() @ ops.jx @ v).real,
        (v.conj() @ ops.jy @ v).real,
        (v.conj() @ ops.jz @ v).real,
    ])


def fidelity(params, r):
    """F = |(1 + r . n(t)) / 2| against the moving target state."""
    _require_two_level(params)
    n = target_axis(params, r.t)
    return float(abs((1.0 + r.as_array @ n) / 2.0))


@dataclass
class FidelityCurve:
    """Fidelity samples along a noisy sweep."""

    times: np.ndarray
    values: np.ndarray
    trajectory: BlochTrajectory

    @property
    def final(self):
        return float(self.values[-1])


def _run_scenario(params, rates, tau_c, tol, points):
    if not tau_c > 0:
        raise ValueError("tau_c must be positive")
    # the protocol starts in |+>, i.e. r = (0, 0, 1); at finite tau_c this
    # differs from the ideal frame state by the truncation tilt, so a tiny
    # part of the final infidelity is cutoff-induced rather than noise
    traj = integrate_master(params, rates, np.array([0.0, 0.0, 1.0]),
                            -tau_c, tau_c, tol=tol, points=points)
    values = np.empty(len(traj.times))
    for i in range(len(traj.times)):
        values[i] = fidelity(params, traj.state(i))
    return FidelityCurve(times=traj.times, values=values, trajectory=traj)


def dephasing_scenario(params, gamma_z, tau_c, tol=1e-10,
                       points=DEFAULT_POINTS):
    """Sweep under pure phase damping (gamma_z only)."""
    return _run_scenario(params, DampingRates.dephasing(gamma_z), tau_c,
                         tol, points)


def spin_flip_scenario(params, gamma, tau_c, tol=1e-10,
                       points=DEFAULT_POINTS):
    """Sweep under isotropic spin-flip damping (all rates equal)."""
    return _run_scenario(params, DampingRates.isotropic(gamma), tau_c,
                         tol, points)
