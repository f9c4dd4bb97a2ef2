"""Hermitian eigendecomposition and exact time evolution in the eigenbasis.

All dynamics in this package is generated by time-independent Hamiltonians of
dimension at most a few thousand, so states are propagated exactly through the
full eigendecomposition rather than by time stepping. Eigenvector gauge is
fixed deterministically so repeated runs produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NumericsError",
    "SpectralDecomposition",
    "diagonalize",
    "ground_state",
    "evolve",
    "evolve_grid",
    "expectation",
]

HERMITICITY_TOL = 1e-12


class NumericsError(RuntimeError):
    """A numerical invariant was violated (non-Hermitian input, failed cross-check)."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def diagonalize(matrix: np.ndarray, hermiticity_tol: float = HERMITICITY_TOL) -> SpectralDecomposition:
    """Eigendecompose a Hermitian matrix with a deterministic eigenvector gauge.

    Non-Hermitian input beyond hermiticity_tol is rejected, never silently
    symmetrized. Each eigenvector is rotated so its largest-magnitude component
    is real and positive, which pins the phase (and sign) reproducibly.
    """
    matrix = np.asarray(matrix)
    defect = np.max(np.abs(matrix - matrix.conj().T))
    if defect > hermiticity_tol:
        raise NumericsError(
            f"Hermiticity violated: max|H - H^dag| = {defect:.3e} exceeds {hermiticity_tol:.1e}"
        )
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)

    anchor = np.argmax(np.abs(eigenvectors), axis=0)
    anchor_values = eigenvectors[anchor, np.arange(eigenvectors.shape[1])]
    if np.iscomplexobj(eigenvectors):
        phases = anchor_values / np.abs(anchor_values)
        eigenvectors = eigenvectors * phases.conj()[None, :]
    else:
        eigenvectors = eigenvectors * np.sign(anchor_values)[None, :]
    return SpectralDecomposition(eigenvalues, eigenvectors)


def ground_state(spec: SpectralDecomposition) -> tuple[float, np.ndarray]:
    """Minimal eigenpair (energy, state vector)."""
    return float(spec.eigenvalues[0]), spec.eigenvectors[:, 0].copy()


def evolve(spec: SpectralDecomposition, psi0: np.ndarray, t: float) -> np.ndarray:
    """exp(-iHt)|psi0> through the eigenbasis (hbar = 1)."""
    coef = spec.eigenvectors.conj().T @ psi0
    return spec.eigenvectors @ (np.exp(-1j * spec.eigenvalues * t) * coef)


def evolve_grid(spec: SpectralDecomposition, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """States at every grid time, stacked as columns of a (dim, len(times)) array."""
    coef = spec.eigenvectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(spec.eigenvalues, np.asarray(times)))
    return spec.eigenvectors @ (phases * coef[:, None])


def expectation(operator: np.ndarray, psi: np.ndarray) -> float:
    """Real expectation value <psi|A|psi> of a Hermitian operator."""
    return float(np.real(np.vdot(psi, operator @ psi)))
