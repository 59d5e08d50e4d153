"""Closed-form dynamics of the modulated sweep.

The model admits a conserved frame: the Hermitian operator

    I(t) = alpha_x(t) Jx + alpha_y(t) Jy + alpha_z(t) Jz,
    alpha(t) = (kappa, nu/eta, nu*t) / sqrt(1 + nu^2 t^2),

satisfies i dI/dt = [H(t), I(t)] for every kappa consistent with
sqrt(1 - (nu/eta)^2), so its spectrum {+j ... -j} never moves.  alpha
traces a great-circle arc from -z (t -> -inf) to +z (t -> +inf).

Writing G(t) = exp(i phi Jz) exp(i theta(t) Jy) with

    theta(t) = arccos(-nu*t / sqrt(1 + nu^2 t^2)),   phi = -arcsin(nu/eta),

the columns of G(t) are the I(t) eigenvectors: I |phi_m> = -m |phi_m>.
Each column, dressed with the accumulated phase

    Phi_m(t0, t1) = m * (eta*kappa/nu) * (asinh(nu*t1) - asinh(nu*t0)),

solves the Schrodinger equation exactly, which yields the propagator in
closed form and, for j = 1/2, the transfer probability of a sweep
truncated to [-tau_c, tau_c].
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import hamiltonian, wigner_d


@dataclass(frozen=True)
class InvariantFrame:
    """Angles and axis of the conserved frame at one instant."""

    t: float
    theta: float      # in [0, pi], monotone increasing with t
    phi: float        # constant, -arcsin(nu/eta)
    alpha: np.ndarray  # real unit 3-vector


def invariant_frame(params, t):
    """Frame angles (theta, phi) and unit axis alpha at time t."""
    nu_t = params.nu * t
    root = math.sqrt(1.0 + nu_t * nu_t)
    theta = math.acos(-nu_t / root)
    phi = -math.asin(params.ratio)
    alpha = np.array([params.kappa, params.ratio, nu_t]) / root
    return InvariantFrame(t=float(t), theta=theta, phi=phi, alpha=alpha)


def invariant_frame_limit(params, sign):
    """Asymptotic frame for t -> +inf (sign > 0) or t -> -inf (sign < 0).

    Provided as an explicit limit because evaluating nu_t/sqrt(1+nu_t^2)
    at huge arguments loses digits to cancellation.
    """
    if sign == 0:
        raise ValueError("sign must be nonzero")
    up = sign > 0
    theta = math.pi if up else 0.0
    phi = -math.asin(params.ratio)
    alpha = np.array([0.0, 0.0, 1.0 if up else -1.0])
    t = math.inf if up else -math.inf
    return InvariantFrame(t=t, theta=theta, phi=phi, alpha=alpha)


def invariant_matrix(params, ops, t):
    """I(t) = alpha . J, the conserved Hermitian operator."""
    ax, ay, az = invariant_frame(params, t).alpha
    return ax * ops.jx + ay * ops.jy + az * ops.jz


def invariant_defect(params, ops, t, dt=None):
    """Residual of the conservation law at time t, by central differences.

    Returns the spectral norm of i*(I(t+dt) - I(t-dt))/(2dt) - [H(t), I(t)].
    Second order in dt; the default step 1e-5/nu balances truncation
    against roundoff in double precision.
    """
    if dt is None:
        dt = 1e-5 / params.nu
    if dt <= 0:
        raise ValueError("dt must be positive")
    di = (invariant_matrix(params, ops, t + dt)
          - invariant_matrix(params, ops, t - dt)) / (2.0 * dt)
    h = hamiltonian(params, ops, t)
    i_now = invariant_matrix(params, ops, t)
    defect = 1j * di - (h @ i_now - i_now @ h)
    return float(np.linalg.norm(defect, 2))


def _phase_column(params, dim):
    # diag of exp(i phi Jz) in the descending basis
    phi = -math.asin(params.ratio)
    m = (dim - 1) / 2.0 - np.arange(dim)
    return np.exp(1j * phi * m)


def eigenbasis(params, t):
    """Columns m = +j ... -j of G(t); column m satisfies I|phi_m> = -m|phi_m>."""
    frame = invariant_frame(params, t)
    rot = wigner_d(params.j, frame.theta).d
    return _phase_column(params, params.dim)[:, None] * rot


def eigenbasis_limit(params, sign):
    """Asymptotic eigenbasis columns for t -> +/- infinity."""
    frame = invariant_frame_limit(params, sign)
    rot = wigner_d(params.j, frame.theta).d
    return _phase_column(params, params.dim)[:, None] * rot


def _check_level(params, m):
    two_m = round(2 * m)
    if abs(2 * m - two_m) > 1e-9 or abs(m) > params.j + 1e-9 \
            or (round(2 * params.j) - two_m) % 2 != 0:
        raise ValueError(f"m = {m!r} is not a level of the spin-{params.j} "
                         "multiplet")
    return two_m / 2.0


def diabatic_energy(params, m, t):
    """E_m(t) = -m * eta * kappa / sqrt(1 + nu^2 t^2).

    Expectation of H(t) in the frame state |phi_m(t)>; distinct from the
    instantaneous eigenvalues of H(t) except in the kappa -> 1 limit.
    """
    m = _check_level(params, m)
    nu_t = params.nu * t
    return -m * params.eta * params.kappa / math.sqrt(1.0 + nu_t * nu_t)


@dataclass(frozen=True)
class LRPhase:
    """Phase accumulated by frame level m between t0 and t1."""

    m: float
    t0: float
    t1: float
    value: float


def lr_phase(params, m, t0, t1):
    """Accumulated phase of level m over [t0, t1], in closed form.

    The geometric part of the phase vanishes identically for this model
    (the frame states have no self-rotation, see geometric_connection),
    leaving minus the time integral of the diabatic energy.  The
    antiderivative is asinh, so no quadrature is involved.
    """
    if t0 > t1:
        raise ValueError("t0 must not exceed t1")
    m = _check_level(params, m)
    span = math.asinh(params.nu * t1) - math.asinh(params.nu * t0)
    return LRPhase(m=m, t0=float(t0), t1=float(t1),
                   value=m * params.eta * params.kappa * span / params.nu)


def geometric_connection(params, m, t, dt=None):
    """Central-difference estimate of <phi_m(t)| i d/dt |phi_m(t)>.

    Vanishes identically here: the only time dependence of the frame is
    the theta rotation, and <m| Jy |m> = 0.  Returned as a number rather
    than asserted, so callers can check the magnitude themselves.
    """
    if dt is None:
        dt = 1e-5 / params.nu
    if dt <= 0:
        raise ValueError("dt must be positive")
    m = _check_level(params, m)
    idx = int(round(params.j - m))
    fwd = eigenbasis(params, t + dt)[:, idx]
    bwd = eigenbasis(params, t - dt)[:, idx]
    mid = eigenbasis(params, t)[:, idx]
    return complex(1j * (mid.conj() @ (fwd - bwd)) / (2.0 * dt))


def propagator(params, t0, t1):
    """Exact evolution operator U(t1, t0) = G(t1) diag(e^{i Phi_m}) G(t0)^dag."""
    if t0 > t1:
        raise ValueError("t0 must not exceed t1")
    dim = params.dim
    m = (dim - 1) / 2.0 - np.arange(dim)
    span = math.asinh(params.nu * t1) - math.asinh(params.nu * t0)
    phases = np.exp(1j * m * params.eta * params.kappa * span / params.nu)
    g1 = eigenbasis(params, t1)
    g0 = eigenbasis(params, t0)
    return (g1 * phases) @ g0.conj().T


@dataclass(frozen=True)
class TransferReport:
    """Transfer outcome of a truncated two-level sweep."""

    tau_c: float
    p: float
    p_delta: float
    phase_plus: float
    bound: float
    warning: str | None = None


def transfer_probability(params, tau_c):
    """Population transfer of a j=1/2 sweep truncated to [-tau_c, tau_c].

    P = 1 - (1 + nu^2 tau_c^2)^(-1) cos^2(Phi_+), with Phi_+ the full
    accumulated phase of the upper level over the window.  The loss
    P_delta = 1 - P is bounded by (1 + nu^2 tau_c^2)^(-1) regardless of
    the phase, which quantifies the cost of truncating the sweep.
    """
    if params.dim != 2:
        raise ValueError(
            f"the closed-form transfer probability is two-level only "
            f"(got j = {params.j}); use propagator() for the multi-level "
            "pathway")
    if not tau_c > 0:
        raise ValueError("tau_c must be positive")
    phase_plus = lr_phase(params, 0.5, -tau_c, tau_c).value
    nu_tau = params.nu * tau_c
    bound = 1.0 / (1.0 + nu_tau * nu_tau)
    p_delta = bound * math.cos(phase_plus) ** 2
    warning = None
    if params.kappa == 0.0:
        warning = ("kappa = 0 (nu = eta): the accumulated phase vanishes, "
                   "so P degenerates to 1 - bound")
    return TransferReport(tau_c=float(tau_c), p=1.0 - p_delta,
                          p_delta=p_delta, phase_plus=phase_plus,
                          bound=bound, warning=warning)
