"""Dataset-producing commands behind the CLI subcommands.

Every command takes a validated ScenarioConfig and returns a Dataset
whose first column is the dimensionless time nu_t (or the dimensionless
sweep coordinate, for parameter sweeps).  All quantities are emitted in
dimensionless form: energies per eta, rates per nu, windows as
nu*tau_c.
"""

import math

import numpy as np

from . import __version__
from .config import ConfigError, config_meta
from .datasets import Dataset
from .dynamics import eigenbasis, transfer_probability
from .model import make_params, spin_operators
from .noise import dephasing_scenario, spin_flip_scenario
from .oracle import integrate_schrodinger, transition_matrix_series


def level_label(m):
    """Render a level index the way it is spoken: +3/2, -1, 0."""
    two_m = round(2 * m)
    if two_m == 0:
        return "0"
    if two_m % 2 == 0:
        return f"{two_m // 2:+d}"
    return f"{two_m:+d}/2"


def _require_scenario(cfg, *allowed):
    if cfg.scenario not in allowed:
        raise ConfigError(f"scenario {cfg.scenario!r} not valid here; "
                          f"expected one of {', '.join(allowed)}")


def _grid(cfg):
    nu_t = np.linspace(-cfg.nu_tau_c, cfg.nu_tau_c, cfg.points)
    return nu_t, nu_t / cfg.nu


def _params(cfg):
    return make_params(cfg.eta, cfg.nu, cfg.j)


def cmd_fields(cfg):
    """Both drive components over the window, in units of eta."""
    _require_scenario(cfg, "fields")
    params = _params(cfg)
    nu_t, _ = _grid(cfg)
    envelope = 1.0 / (1.0 + nu_t**2)
    rows = np.column_stack([nu_t, envelope, params.kappa * nu_t * envelope])
    return Dataset(columns=["nu_t", "omega_x_over_eta", "omega_z_over_eta"],
                   rows=rows, meta=config_meta(cfg, __version__))


def cmd_levels(cfg):
    """Adiabatic and diabatic energy levels over the window, per eta.

    The adiabatic levels are the instantaneous eigenvalues of H(t),
    -m*|Omega(t)|; the diabatic levels are the expectations of H(t) in
    the conserved frame, -m*eta*kappa/sqrt(1+nu_t^2).  The two families
    coincide in the kappa -> 1 limit.
    """
    _require_scenario(cfg, "levels")
    params = _params(cfg)
    nu_t, _ = _grid(cfg)
    m_values = params.j - np.arange(params.dim)
    omega_norm = np.sqrt(1.0 + (params.kappa * nu_t) ** 2) / (1.0 + nu_t**2)
    dia_norm = params.kappa / np.sqrt(1.0 + nu_t**2)
    cols = [nu_t]
    names = ["nu_t"]
    for m in m_values:
        cols.append(-m * omega_norm)
        names.append(f"e_ad_{level_label(m)}_over_eta")
    for m in m_values:
        cols.append(-m * dia_norm)
        names.append(f"e_dia_{level_label(m)}_over_eta")
    return Dataset(columns=names, rows=np.column_stack(cols),
                   meta=config_meta(cfg, __version__))


def _exact_amplitudes(cfg, params, times, n_idx):
    """Closed-form trajectory from level-basis state |m_n> at -tau_c."""
    dim = params.dim
    m = params.j - np.arange(dim)
    g0 = eigenbasis(params, times[0])
    c0 = g0.conj().T[:, n_idx]  # initial amplitudes in the conserved frame
    out = np.empty((len(times), dim), dtype=complex)
    for i, t in enumerate(times):
        span = math.asinh(params.nu * t) - math.asinh(params.nu * times[0])
        phases = np.exp(1j * m * params.eta * params.kappa * span / params.nu)
        out[i] = eigenbasis(params, t) @ (phases * c0)
    return out


def cmd_populations(cfg):
    """Level populations along one trajectory, by oracle or closed form."""
    _require_scenario(cfg, "oracle", "exact")
    params = _params(cfg)
    nu_t, times = _grid(cfg)
    ops = spin_operators(cfg.j)
    n_idx = int(round(params.j - cfg.initial_level))
    if cfg.scenario == "oracle":
        psi0 = np.zeros(params.dim, dtype=complex)
        psi0[n_idx] = 1.0
        traj = integrate_schrodinger(params, ops, psi0, times[0], times[-1],
                                     tol=cfg.tol, points=cfg.points)
        pops = np.abs(traj.amplitudes) ** 2
    else:
        pops = np.abs(_exact_amplitudes(cfg, params, times, n_idx)) ** 2
    names = ["nu_t"] + [f"p_{level_label(m)}"
                        for m in params.j - np.arange(params.dim)]
    return Dataset(columns=names, rows=np.column_stack([nu_t, pops]),
                   meta=config_meta(cfg, __version__))


def cmd_transitions(cfg):
    """Overlap of one evolved trajectory with every adiabatic level.

    Levels are tracked by energy order (no crossings occur), so the
    labels follow the adiabatic states continuously: the trajectory
    started in |n> keeps T[n, n] near 1 at both ends of a wide window,
    while its Jz character swaps to |-n>.
    """
    _require_scenario(cfg, "transitions")
    params = _params(cfg)
    nu_t, times = _grid(cfg)
    ops = spin_operators(cfg.j)
    trajs = []
    for k in range(params.dim):
        psi0 = np.zeros(params.dim, dtype=complex)
        psi0[k] = 1.0
        trajs.append(integrate_schrodinger(params, ops, psi0, times[0],
                                           times[-1], tol=cfg.tol,
                                           points=cfg.points))
    series = transition_matrix_series(params, ops, trajs)
    n_idx = int(round(params.j - cfg.initial_level))
    t_col = np.stack([tm.matrix[:, n_idx] for tm in series])
    names = ["nu_t"] + [f"T_{level_label(m)}"
                        for m in params.j - np.arange(params.dim)]
    return Dataset(columns=names, rows=np.column_stack([nu_t, t_col]),
                   meta=config_meta(cfg, __version__))


def _noise_rates(cfg):
    given = {k: getattr(cfg, k) for k in ("gamma", "gamma_x", "gamma_y",
                                          "gamma_z")
             if getattr(cfg, k) is not None}
    if cfg.scenario == "dephasing":
        extras = sorted(set(given) - {"gamma_z"})
        if extras:
            raise ConfigError("dephasing uses only gamma_z; remove "
                              + ", ".join(extras))
        if "gamma_z" not in given:
            raise ConfigError("dephasing requires gamma_z (as gamma_z/nu)")
        return given["gamma_z"]
    extras = sorted(set(given) - {"gamma"})
    if extras:
        raise ConfigError("spinflip uses the isotropic gamma; remove "
                          + ", ".join(extras))
    if "gamma" not in given:
        raise ConfigError("spinflip requires gamma (as gamma/nu)")
    return given["gamma"]


def cmd_noise(cfg):
    """Fidelity curve of a noisy sweep, dephasing or isotropic spin flip."""
    _require_scenario(cfg, "dephasing", "spinflip")
    params = _params(cfg)
    if params.dim != 2:
        raise ConfigError("noise scenarios are two-level only (j = 1/2)")
    ratio = _noise_rates(cfg)
    rate = ratio * cfg.nu
    nu_t, times = _grid(cfg)
    runner = (dephasing_scenario if cfg.scenario == "dephasing"
              else spin_flip_scenario)
    curve = runner(params, rate, cfg.tau_c, tol=cfg.tol, points=cfg.points)
    rows = np.column_stack([nu_t, curve.values])
    return Dataset(columns=["nu_t", "fidelity"], rows=rows,
                   meta=config_meta(cfg, __version__))


def cmd_sweep(cfg):
    """One row of endpoint results per swept parameter value."""
    _require_scenario(cfg, "sweep")
    values = cfg.values or ()
    if cfg.axis in ("tau_c", "eta_over_nu") and cfg.j != 0.5:
        raise ConfigError(f"{cfg.axis} sweeps use the two-level closed "
                          "form; set j = 1/2")
    meta = config_meta(cfg, __version__)
    if cfg.axis == "tau_c":
        params = _params(cfg)
        rows = []
        for nu_tau in values:
            rep = transfer_probability(params, nu_tau / cfg.nu)
            rows.append([nu_tau, rep.p, rep.p_delta, rep.bound])
        return Dataset(columns=["nu_tau_c", "p", "p_delta", "bound"],
                       rows=np.array(rows), meta=meta)
    if cfg.axis == "eta_over_nu":
        rows = []
        for ratio in values:
            if ratio < 1.0:
                raise ConfigError(f"eta_over_nu values must be >= 1, got "
                                  f"{ratio}")
            params = make_params(ratio * cfg.nu, cfg.nu, cfg.j)
            rep = transfer_probability(params, cfg.tau_c)
            rows.append([ratio, rep.p, rep.p_delta, rep.bound])
        return Dataset(columns=["eta_over_nu", "p", "p_delta", "bound"],
                       rows=np.array(rows), meta=meta)
    # gamma axis: endpoint fidelity under the chosen noise channel
    params = _params(cfg)
    if params.dim != 2:
        raise ConfigError("gamma sweeps are two-level only (j = 1/2)")
    kind = cfg.noise or "spinflip"
    runner = (dephasing_scenario if kind == "dephasing"
              else spin_flip_scenario)
    rows = []
    for ratio in values:
        if ratio < 0:
            raise ConfigError(f"gamma values must be non-negative, got "
                              f"{ratio}")
        curve = runner(params, ratio * cfg.nu, cfg.tau_c, tol=cfg.tol,
                       points=cfg.points)
        rows.append([ratio, curve.final])
    return Dataset(columns=["gamma_over_nu", "fidelity_end"],
                   rows=np.array(rows), meta=meta)
