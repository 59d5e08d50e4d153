"""Core definitions for the modulated Landau-Zener sweep.

The drive has two components sharing a Lorentzian envelope,

    Omega_x(t) = eta / (1 + nu^2 t^2)
    Omega_z(t) = eta * kappa * nu * t / (1 + nu^2 t^2)

so the ratio Omega_z/Omega_x grows linearly in t (a Landau-Zener-style
sweep of the effective detuning) while the field intensity stays finite
and decays at large |t|.  The modulation depth

    kappa = sqrt(1 - (nu/eta)^2)

ties the sweep rate nu to the amplitude eta.  kappa is always derived
from (eta, nu), never stored independently, so the constraint cannot
drift.  The Hamiltonian H(t) = Omega_x Jx + Omega_z Jz acts on a spin-j
multiplet; the Jz eigenbasis is ordered m = +j, +j-1, ..., -j
everywhere in this package.
"""

import math
from dataclasses import dataclass

import numpy as np

# Factorial-sum rotation elements degrade in conditioning for very large
# spins; far beyond anything this model needs.
J_MAX = 50


def _two_j(j):
    two_j = int(round(2 * j))
    if abs(2 * j - two_j) > 1e-9 or two_j < 1:
        raise ValueError(f"j must be a positive half-integer, got {j!r}")
    if two_j > 2 * J_MAX:
        raise ValueError(f"j = {j} exceeds the supported maximum of {J_MAX}")
    return two_j


@dataclass(frozen=True)
class ModelParams:
    """Sweep parameters. Build through make_params, not directly."""

    eta: float
    nu: float
    kappa: float
    j: float

    @property
    def dim(self):
        return int(round(2 * self.j)) + 1

    @property
    def ratio(self):
        """Dimensionless sweep ratio nu/eta."""
        return self.nu / self.eta


def make_params(eta, nu, j):
    """Validate (eta, nu, j) and derive the modulation depth kappa.

    Parameters
    ----------
    eta : float
        Field amplitude, inverse-time units (hbar = 1). Must be > 0.
    nu : float
        Sweep frequency, same units. Requires 0 < nu <= eta so that
        kappa = sqrt(1 - (nu/eta)^2) is real.
    j : float
        Spin quantum number; 2j must be a positive integer.

    Returns
    -------
    ModelParams
    """
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu!r}")
    if nu > eta:
        raise ValueError(
            f"nu must not exceed eta (nu={nu}, eta={eta}): the modulation "
            "depth sqrt(1 - (nu/eta)^2) would be imaginary")
    two_j = _two_j(j)
    ratio = nu / eta
    kappa = math.sqrt(max(0.0, (1.0 - ratio) * (1.0 + ratio)))
    return ModelParams(eta=float(eta), nu=float(nu), kappa=kappa,
                       j=two_j / 2.0)


@dataclass
class SpinOperators:
    """Dense spin-j matrices in the descending Jz eigenbasis."""

    dim: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    m_values: np.ndarray


def spin_operators(j):
    """Construct Jx, Jy, Jz for spin j via the ladder operators."""
    two_j = _two_j(j)
    j = two_j / 2.0
    dim = two_j + 1
    m = j - np.arange(dim)  # +j, +j-1, ..., -j
    jz = np.diag(m).astype(complex)
    # raising operator: J+|m> = sqrt(j(j+1) - m(m+1)) |m+1>, one step up
    # the descending basis means one row up
    jp = np.zeros((dim, dim), dtype=complex)
    for i in range(dim - 1):
        mm = m[i + 1]
        jp[i, i + 1] = math.sqrt(j * (j + 1) - mm * (mm + 1))
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    return SpinOperators(dim=dim, jx=jx, jy=jy, jz=jz, m_values=m)


def field_components(params, t):
    """Return (Omega_x, Omega_z) at time t; accepts scalar or array t."""
    t = np.asarray(t, dtype=float)
    envelope = params.eta / (1.0 + (params.nu * t) ** 2)
    omega_x = envelope
    omega_z = envelope * params.kappa * params.nu * t
    if omega_x.ndim == 0:
        return float(omega_x), float(omega_z)
    return omega_x, omega_z


def hamiltonian(params, ops, t):
    """H(t) = Omega_x(t) Jx + Omega_z(t) Jz as a dense Hermitian matrix."""
    omega_x, omega_z = field_components(params, t)
    return omega_x * ops.jx + omega_z * ops.jz


@dataclass
class WignerMatrix:
    """Rotation matrix d[m', m] = <m'| exp(+i theta Jy) |m>, all real."""

    j: float
    theta: float
    d: np.ndarray


def _lfact(n):
    return math.lgamma(n + 1)


def wigner_d(j, theta):
    """Spin-j rotation matrix for exp(+i theta Jy), basis m = +j ... -j.

    Evaluated by the factorial sum formula with log-factorials, which
    stays well conditioned for every supported j.  Note the +i sign:
    conventions with exp(-i theta Jy) correspond to negating theta.

    Parameters
    ----------
    j : float
        Half-integer spin.
    theta : float
        Rotation angle in radians.

    Returns
    -------
    WignerMatrix
    """
    two_j = _two_j(j)
    dim = two_j + 1
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    d = np.zeros((dim, dim))
    # integer bookkeeping: row index p gives m' = j - p, so
    # j + m' = two_j - p and j - m' = p; likewise for columns
    for p in range(dim):
        for q in range(dim):
            jpmp, jmmp = two_j - p, p          # j+m', j-m'
            jpm, jmm = two_j - q, q            # j+m,  j-m
            mp_m = q - p                       # m' - m
            lognorm = 0.5 * (_lfact(jpmp) + _lfact(jmmp)
                             + _lfact(jpm) + _lfact(jmm))
            k_lo = max(0, -mp_m)
            k_hi = min(jpm, jmmp)
            acc = 0.0
            for k in range(k_lo, k_hi + 1):
                # exponents: cos^(2j + m - m' - 2k), sin^(m' - m + 2k)
                ec = jpm - k + p - k           # 2j + m - m' - 2k
                es = mp_m + 2 * k
                term = math.exp(lognorm - _lfact(jpm - k) - _lfact(k)
                                - _lfact(jmmp - k) - _lfact(mp_m + k))
                acc += (-1.0) ** k * term * c ** ec * s ** es
            d[p, q] = acc
    return WignerMatrix(j=two_j / 2.0, theta=float(theta), d=d)
