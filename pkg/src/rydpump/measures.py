"""Figures of merit: fidelity, CHSH correlation, negativity, populations."""

from __future__ import annotations

import math

import numpy as np

from .linalg import BipartiteDims, hermitian_eigvals, kron, partial_transpose

SQRT2 = math.sqrt(2.0)


def _pauli_fa() -> tuple[np.ndarray, np.ndarray]:
    """sigma_x and sigma_y acting on the {|f>, |a>} subspace of a 3-level atom
    (|f> -> qubit 0, |a> -> qubit 1; zero row/column on |r>)."""
    sx = np.zeros((3, 3), dtype=complex)
    sx[0, 1] = sx[1, 0] = 1.0
    sy = np.zeros((3, 3), dtype=complex)
    sy[0, 1] = -1j
    sy[1, 0] = 1j
    return sx, sy


def chsh_operator(triplet_frame: bool = False) -> np.ndarray:
    """Four-term Bell operator on the 9-level two-atom space.

    Settings: atom 1 measures sigma_y and sigma_x; atom 2 measures
    (-sigma_y - sigma_x)/sqrt(2) and (sigma_y - sigma_x)/sqrt(2).  The
    singlet attains the maximal violation 2*sqrt(2).  With
    triplet_frame=True the atom-2 operators are conjugated by sigma_z
    (sigma_x -> -sigma_x, sigma_y -> -sigma_y), the settings under which
    the triplet attains 2*sqrt(2) instead.
    """
    sx, sy = _pauli_fa()
    s = -1.0 if triplet_frame else 1.0
    a_plus = s * (-sy - sx) / SQRT2
    a_minus = s * (sy - sx) / SQRT2
    return (
        kron(sy, a_plus) + kron(sx, a_plus) + kron(sx, a_minus) - kron(sy, a_minus)
    )


def fidelity(psi: np.ndarray, rho: np.ndarray) -> float:
    """Overlap <psi|rho|psi> of a pure target with a density matrix."""
    psi = np.asarray(psi, dtype=complex).ravel()
    rho = np.asarray(rho)
    if rho.shape != (psi.size, psi.size):
        raise ValueError(
            f"dimension mismatch: state has {psi.size} components, rho has shape {rho.shape}"
        )
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"target state must be unit norm, got |psi| = {norm:.12g}")
    val = complex(np.vdot(psi, rho @ psi))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"<psi|rho|psi> has imaginary part {val.imag:.2e}; rho not Hermitian?")
    return float(val.real)


def chsh_correlation(rho: np.ndarray, triplet_frame: bool = False) -> float:
    """Tr(O_CHSH rho) for a 9-level Bell-scheme density matrix.

    Values above 2 violate the Bell inequality; 2*sqrt(2) is the quantum
    maximum.  See chsh_operator for the triplet_frame switch.
    """
    rho = np.asarray(rho)
    if rho.shape != (9, 9):
        raise ValueError(f"CHSH correlation needs a 9x9 Bell-scheme state, got shape {rho.shape}")
    val = complex(np.trace(chsh_operator(triplet_frame) @ rho))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"Tr(O rho) has imaginary part {val.imag:.2e}; rho not Hermitian?")
    return float(val.real)


def negativity(rho: np.ndarray, dims: BipartiteDims) -> float:
    """Entanglement negativity (||rho^T_A||_1 - 1) / 2.

    The equivalent form sum_j (|lambda_j| - lambda_j)/2 over the partial
    transpose spectrum is evaluated alongside as a permanent self-check;
    disagreement beyond 1e-10 raises RuntimeError.
    """
    rho_pt = partial_transpose(rho, dims)
    lam = hermitian_eigvals(rho_pt)
    from_norm = (float(np.sum(np.abs(lam))) - 1.0) / 2.0
    from_negatives = float(np.sum((np.abs(lam) - lam) / 2.0))
    if abs(from_norm - from_negatives) > 1e-10:
        raise RuntimeError(
            f"negativity definitions disagree: trace-norm form {from_norm!r} vs "
            f"negative-eigenvalue form {from_negatives!r} (is trace(rho) = 1?)"
        )
    return from_norm


def populations(rho: np.ndarray, basis) -> np.ndarray:
    """Diagonal expectations <b|rho|b> for a list of unit kets."""
    rho = np.asarray(rho)
    out = np.empty(len(basis))
    for k, b in enumerate(basis):
        b = np.asarray(b, dtype=complex).ravel()
        if rho.shape != (b.size, b.size):
            raise ValueError(
                f"dimension mismatch: basis state {k} has {b.size} components, "
                f"rho has shape {rho.shape}"
            )
        out[k] = float(np.real(np.vdot(b, rho @ b)))
    return out
