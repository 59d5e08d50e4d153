"""Self-checks behind the `verify` subcommand.

Each check recomputes one structural fact two independent ways and
compares against a gate.  The gates that depend on integration accuracy
scale with the configured tolerance so that a deliberately loose run
still verifies cleanly, just with larger residuals.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (geometric_connection, invariant_defect,
                       invariant_matrix, propagator, transfer_probability)
from .model import make_params, spin_operators
from .noise import DampingRates, integrate_master
from .oracle import (integrate_schrodinger, oracle_propagator,
                     transition_matrix_series)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    gate: float
    detail: str

    def line(self):
        tag = "pass" if self.passed else "FAIL"
        return (f"[{tag}] {self.name}: {self.value:.3e} "
                f"(gate {self.gate:.1e}) {self.detail}")


@dataclass(frozen=True)
class VerificationReport:
    results: tuple

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def render_text(self):
        lines = [r.line() for r in self.results]
        verdict = "all checks passed" if self.passed else "CHECKS FAILED"
        lines.append(verdict)
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": [{"name": r.name, "passed": r.passed,
                        "value": r.value, "gate": r.gate,
                        "detail": r.detail} for r in self.results],
        }


def _result(name, value, gate, detail=""):
    return CheckResult(name=name, passed=bool(value <= gate),
                       value=float(value), gate=float(gate), detail=detail)


def check_spin_algebra(ops):
    """[Jx, Jy] = i Jz and cyclic, plus the Casimir j(j+1)."""
    j = (ops.dim - 1) / 2
    worst = 0.0
    pairs = [(ops.jx, ops.jy, ops.jz), (ops.jy, ops.jz, ops.jx),
             (ops.jz, ops.jx, ops.jy)]
    for a, b, c in pairs:
        worst = max(worst, np.linalg.norm(a @ b - b @ a - 1j * c, 2))
    casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    worst = max(worst, np.linalg.norm(
        casimir - j * (j + 1) * np.eye(ops.dim), 2))
    return _result("spin_algebra", worst, 1e-12, f"j={j:g}")


def check_invariant_defect(params, ops):
    """The conserved operator obeys its equation of motion."""
    nu_t = np.linspace(-8.0, 8.0, 9)
    worst = max(invariant_defect(params, ops, x / params.nu) for x in nu_t)
    return _result("invariant_defect", worst, 1e-6,
                   "central difference, dt = 1e-5/nu")


def check_invariant_spectrum(params, ops):
    """Eigenvalues of the conserved operator never move."""
    ref = np.sort(np.linalg.eigvalsh(invariant_matrix(params, ops, 0.0)))
    worst = 0.0
    for x in np.linspace(-100.0, 100.0, 41):
        ev = np.sort(np.linalg.eigvalsh(
            invariant_matrix(params, ops, x / params.nu)))
        worst = max(worst, np.max(np.abs(ev - ref)))
    return _result("invariant_spectrum", worst, 1e-10,
                   "nu_t in [-100, 100]")


def check_geometric_connection(params):
    """The frame states carry no geometric phase along the sweep."""
    worst = 0.0
    m_values = params.j - np.arange(params.dim)
    for x in np.linspace(-6.0, 6.0, 7):
        for m in m_values:
            worst = max(worst, abs(geometric_connection(
                params, m, x / params.nu)))
    return _result("geometric_connection", worst, 1e-8, "all levels")


def check_oracle_vs_exact(params, ops, tol):
    """Numerical propagator matches the closed form over a window."""
    tau = 5.0 / params.nu
    u_num = oracle_propagator(params, ops, -tau, tau, tol=tol)
    u_exact = propagator(params, -tau, tau)
    value = np.linalg.norm(u_num - u_exact, 2)
    return _result("oracle_vs_exact", value, 1e4 * tol, "nu_tau = 5")


def check_transfer_formula(tol):
    """Closed-form transfer probability matches the integrated one."""
    params = make_params(1.0, 0.8, 0.5)
    ops = spin_operators(0.5)
    tau = 10.0 / params.nu
    rep = transfer_probability(params, tau)
    psi0 = np.array([1.0, 0.0], dtype=complex)
    traj = integrate_schrodinger(params, ops, psi0, -tau, tau,
                                 tol=tol, points=3)
    p_num = abs(traj.amplitudes[-1, 1]) ** 2
    value = abs(rep.p - p_num)
    return _result("transfer_formula", value, max(1e-8, 100.0 * tol),
                   "j = 1/2, nu_tau = 10")


def check_transition_stochasticity(params, ops, tol):
    """Transition matrices stay doubly stochastic along the sweep."""
    tau = 10.0 / params.nu
    trajs = []
    for k in range(params.dim):
        psi0 = np.zeros(params.dim, dtype=complex)
        psi0[k] = 1.0
        trajs.append(integrate_schrodinger(params, ops, psi0, -tau, tau,
                                           tol=tol, points=201))
    worst = 0.0
    for tm in transition_matrix_series(params, ops, trajs):
        worst = max(worst,
                    np.max(np.abs(tm.matrix.sum(axis=0) - 1.0)),
                    np.max(np.abs(tm.matrix.sum(axis=1) - 1.0)))
    return _result("transition_stochasticity", worst,
                   max(1e-8, 100.0 * tol), "201 output times")


def check_isotropic_decay(params, tol):
    """Isotropic damping shrinks the coherence vector exponentially."""
    two_level = params if params.dim == 2 else make_params(
        params.eta, params.nu, 0.5)
    gamma = 0.01 * two_level.nu
    tau = 8.0 / two_level.nu
    r0 = np.array([0.0, 0.0, 1.0])
    traj = integrate_master(two_level, DampingRates.isotropic(gamma), r0,
                            -tau, tau, tol=tol, points=201)
    norms = np.linalg.norm(traj.vectors, axis=1)
    expected = np.exp(-gamma * (traj.times + tau))
    value = np.max(np.abs(norms - expected))
    return _result("isotropic_decay", value, 10.0 * tol,
                   "gamma = 0.01 nu")


def run_verification(cfg):
    """Run every structural check at the configured parameters."""
    params = make_params(cfg.eta, cfg.nu, cfg.j)
    ops = spin_operators(cfg.j)
    results = (
        check_spin_algebra(ops),
        check_invariant_defect(params, ops),
        check_invariant_spectrum(params, ops),
        check_geometric_connection(params),
        check_oracle_vs_exact(params, ops, cfg.tol),
        check_transfer_formula(cfg.tol),
        check_transition_stochasticity(params, ops, cfg.tol),
        check_isotropic_decay(params, cfg.tol),
    )
    return VerificationReport(results=results)
