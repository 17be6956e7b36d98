"""Numerical workbench for small-amplitude periodic water waves: Stokes
wave continuation, Bloch-Floquet spectra of the linearization, instability
diagnostics (figure-8, isolas, depth threshold), resonance checks, and a
desk-scale nonlinear evolution test bed.
"""

from .dispersion import (
    INFINITE_DEPTH,
    CollisionPoint,
    CollisionReport,
    PhysicalParams,
    find_collisions,
    omega_j,
    omega_sigma,
    symbol_g0,
)
from .dno import (
    ComplexMatrixOp,
    DnoDivergenceError,
    PeriodicFunction,
    dno_apply,
    dno_matrix,
)
from .resonance import (
    MelnikovBudget,
    NWaveReport,
    ResonanceQuery,
    check_melnikov,
    scan_nwave,
    small_divisor,
    wilton_kappa,
)

__version__ = "0.1.0"

__all__ = [
    "INFINITE_DEPTH",
    "CollisionPoint",
    "CollisionReport",
    "PhysicalParams",
    "find_collisions",
    "omega_j",
    "omega_sigma",
    "symbol_g0",
    "ComplexMatrixOp",
    "DnoDivergenceError",
    "PeriodicFunction",
    "dno_apply",
    "dno_matrix",
    "MelnikovBudget",
    "NWaveReport",
    "ResonanceQuery",
    "check_melnikov",
    "scan_nwave",
    "small_divisor",
    "wilton_kappa",
]
