"""Dense complex linear algebra helpers.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
Everything here is a pure function; inputs are never modified.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

# Validation tolerance for "is this Hermitian / normalized" checks.
INPUT_TOL = 1e-12
# Tolerance for reconstructions and unitarity of derived operators.
RECON_TOL = 1e-10
# Tolerance for products of several derived operators.
PRODUCT_TOL = 1e-9

# Components below this magnitude are skipped when fixing eigenvector phases.
_PHASE_ZERO = 1e-9


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a finite 2-D complex array."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DomainError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix contains NaN or Inf entries")
    return A


def as_state(v, tol: float = INPUT_TOL) -> np.ndarray:
    """Return ``v`` as a finite complex vector of unit norm."""
    x = np.asarray(v, dtype=complex)
    if x.ndim != 1 or x.size < 1:
        raise DomainError(f"expected a non-empty 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("state contains NaN or Inf amplitudes")
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > tol:
        raise DomainError(f"state is not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
    return x


def hermiticity_defect(M: np.ndarray) -> float:
    """Max-entry magnitude of ``M - M^dagger``."""
    return float(np.max(np.abs(M - M.conj().T)))


def _check_hermitian(M) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"matrix must be square, got shape {A.shape}")
    dev = hermiticity_defect(A)
    if dev > INPUT_TOL:
        raise DomainError(f"matrix is not Hermitian: max |M - M^dagger| = {dev:.3e}")
    return A


def fix_phases(V: np.ndarray) -> np.ndarray:
    """Rephase each column so its first non-negligible component is real positive."""
    V = np.array(V, dtype=complex, copy=True)
    for j in range(V.shape[1]):
        col = V[:, j]
        idx = np.flatnonzero(np.abs(col) > _PHASE_ZERO)
        if idx.size:
            c = col[idx[0]]
            V[:, j] = col * (abs(c) / c)
    return V


def hermitian_eig(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns:
        ``(eigenvalues, V)`` with eigenvalues ascending and the columns of
        ``V`` orthonormal eigenvectors, each rephased so that its first
        non-negligible component is real and positive.

    Raises:
        DomainError: if ``M`` is not square or not Hermitian within 1e-12.
    """
    A = _check_hermitian(M)
    # Symmetrize away the sub-tolerance skew part before handing to LAPACK.
    A = 0.5 * (A + A.conj().T)
    w, V = np.linalg.eigh(A)
    return w, fix_phases(V)


def expm_hermitian(M, scale: float) -> np.ndarray:
    """``exp(-i * scale * M)`` for Hermitian ``M``, via its eigendecomposition."""
    if not np.isfinite(scale):
        raise DomainError(f"scale must be finite, got {scale!r}")
    w, V = hermitian_eig(M)
    if scale == 0:
        return np.eye(V.shape[0], dtype=complex)
    return (V * np.exp(-1j * scale * w)) @ V.conj().T


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not factors:
        raise DomainError("kron needs at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def unitarity_defect(U) -> float:
    """Max-entry magnitude of ``U^dagger U - I``."""
    A = as_matrix(U)
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"matrix must be square, got shape {A.shape}")
    return float(np.max(np.abs(A.conj().T @ A - np.eye(A.shape[0]))))


def max_deviation(A, B) -> float:
    """Max-entry magnitude of ``A - B``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DomainError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.max(np.abs(A - B))) if A.size else 0.0
