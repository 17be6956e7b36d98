"""Bloch-Floquet slices of the linearized operator at a traveling wave.

The linearization of the moving-frame evolution about a Stokes wave is an
autonomous linear Hamiltonian system; conjugating by e^{i mu x} shifts
every derivative to d_x + i mu and the surface operator to its shifted
matrix, giving a finite matrix per Floquet exponent mu whose eigenvalues
tile the spectrum of the full linearized problem. The operator inherits
two exact structures checked here: it is complex-Hamiltonian (J^{-1} L
Hermitian for the vorticity-modified symplectic form) and reversible
(anticommutes with the antilinear involution (eta, psi)(x) ->
(conj eta, -conj psi)(-x)), forcing the eigenvalue symmetry
lambda -> -conj(lambda).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._linearize import linearization_blocks
from .dno import ComplexMatrixOp
from .stokes import StokesWave

INSTABILITY_CUTOFF_SCALE = 1e-8


@dataclass
class BlochOperator:
    """Dense matrix of one Floquet slice, with its provenance."""

    mu: float
    wave: StokesWave
    matrix: ComplexMatrixOp
    truncation: int
    dno_order: int


@dataclass
class SpectrumSlice:
    """All eigenvalues of one slice, deterministically ordered."""

    mu: float
    eigenvalues: np.ndarray
    max_real_part: float
    unstable_count: int


@dataclass
class SymmetryReport:
    """Relative defects of the structures the operator carries exactly in
    the continuum: Hamiltonian (J^{-1} L Hermitian), reversibility
    (L R + R conj(L) = 0), and the induced eigenvalue pairing."""

    hamiltonian_defect: float
    reversibility_defect: float
    pairing_defect: float


def assemble(wave: StokesWave, mu: float, N: int = 64,
             dno_order: int = 8) -> BlochOperator:
    """Matrix of the linearized moving-frame evolution at Floquet shift
    mu on the stacked basis (eta, psi) x e^{i(k+mu)x}, k = -N..N."""
    if not wave.converged:
        raise ValueError("Bloch assembly requires a converged wave")
    if N < wave.eta.truncation:
        raise ValueError("N must be at least the wave truncation")
    l11, l12, l21, l22 = linearization_blocks(
        wave.eta, wave.psi, wave.speed, wave.params, N, mu, dno_order)
    full = np.block([[l11, l12], [l21, l22]])
    op = ComplexMatrixOp(
        full, 2 * (2 * N + 1),
        f"(eta, psi) stacked on exp(i(k+mu)x), k=-{N}..{N}, "
        f"mu={float(mu)!r}")
    return BlochOperator(mu=float(mu), wave=wave, matrix=op, truncation=N,
                         dno_order=dno_order)


def eigenvalues(op: BlochOperator,
                cutoff_scale: float = INSTABILITY_CUTOFF_SCALE
                ) -> SpectrumSlice:
    """Full spectrum of one slice, sorted by (imag, real); the unstable
    count uses the cutoff Re(lambda) > cutoff_scale*(1+|lambda|)."""
    try:
        lam = scipy.linalg.eig(op.matrix.entries, right=False)
    except scipy.linalg.LinAlgError as err:   # pragma: no cover
        raise RuntimeError(
            f"eigensolver failed at mu={op.mu!r}, "
            f"epsilon={op.wave.amplitude!r}, N={op.truncation}") from err
    lam = lam[np.lexsort((lam.real, lam.imag))]
    unstable = lam.real > cutoff_scale * (1.0 + np.abs(lam))
    return SpectrumSlice(mu=op.mu, eigenvalues=lam,
                         max_real_part=float(lam.real.max()),
                         unstable_count=int(unstable.sum()))


def _pairing_defect(lam: np.ndarray) -> float:
    # distance from the spectrum to its mirror as sets: sorted matching
    # would misalign near-degenerate imaginary parts, so measure the
    # worst nearest-neighbor gap instead
    mirrored = -lam.conj()
    dist = np.abs(lam[:, None] - mirrored[None, :]).min(axis=1)
    scale = max(float(np.abs(lam).max()), 1e-30)
    return float(dist.max()) / scale


def check_symmetries(op: BlochOperator) -> SymmetryReport:
    """Measure the Hamiltonian, reversibility, and pairing defects."""
    L = op.matrix.entries
    N = op.truncation
    dim = 2 * N + 1
    norm = np.linalg.norm(L, 2)

    gam = op.wave.params.vorticity
    xi = np.arange(-N, N + 1) + op.mu
    dxinv = np.zeros(dim, complex)
    live = np.abs(xi) >= 1e-12
    dxinv[live] = 1.0 / (1j * xi[live])
    eye = np.eye(dim)
    j_inv = np.block([[gam * np.diag(dxinv), -eye],
                      [eye, np.zeros((dim, dim))]])
    sym = j_inv @ L
    hamiltonian = np.linalg.norm(sym - sym.conj().T, 2) / norm

    r_sign = np.concatenate([np.ones(dim), -np.ones(dim)])
    rev = np.linalg.norm(L * r_sign[None, :] + r_sign[:, None] * L.conj(),
                         2) / norm

    lam = eigenvalues(op).eigenvalues
    return SymmetryReport(hamiltonian_defect=float(hamiltonian),
                          reversibility_defect=float(rev),
                          pairing_defect=_pairing_defect(lam))
