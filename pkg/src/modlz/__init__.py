"""Modulated Landau-Zener sweeps: exact dynamics, numeric cross-checks, noise."""

__version__ = "0.1.0"

from .model import (
    ModelParams,
    SpinOperators,
    WignerMatrix,
    field_components,
    hamiltonian,
    make_params,
    spin_operators,
    wigner_d,
)
from .dynamics import (
    InvariantFrame,
    LRPhase,
    TransferReport,
    diabatic_energy,
    eigenbasis,
    eigenbasis_limit,
    geometric_connection,
    invariant_defect,
    invariant_frame,
    invariant_frame_limit,
    invariant_matrix,
    lr_phase,
    propagator,
    transfer_probability,
)

__all__ = [
    "ModelParams", "SpinOperators", "WignerMatrix",
    "make_params", "spin_operators", "hamiltonian", "field_components",
    "wigner_d",
    "InvariantFrame", "LRPhase", "TransferReport",
    "invariant_frame", "invariant_frame_limit", "invariant_matrix",
    "invariant_defect", "eigenbasis", "eigenbasis_limit", "diabatic_energy",
    "lr_phase", "geometric_connection", "propagator", "transfer_probability",
    "__version__",
]
