"""Dense linear-algebra kernels shared by the rest of the package.

Everything here is a thin, contract-checked wrapper around numpy.linalg.
Matrices are plain float64 ndarrays; the helpers below validate shape and
finiteness at the boundaries so downstream modules can assume well-formed
inputs.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "RankDeficientError",
    "as_matrix",
    "as_vector",
    "qr_orthonormalize",
    "svd",
    "sym_eig_min",
    "kron",
    "solve_spd",
    "pinv",
    "spectral_radius",
]

# Relative singular-value cutoff below which pinv treats a direction as null.
PINV_RCOND = 1e-10

_SYM_TOL = 1e-10


class RankDeficientError(ValueError):
    """Raised when an operation requires full column rank and the input lacks it."""


def as_matrix(m, rows: int | None = None, cols: int | None = None, name: str = "matrix") -> np.ndarray:
    """Validate and return `m` as a 2-D float64 array with finite entries."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column, got {a.shape}")
    if rows is not None and a.shape[0] != rows:
        raise ValueError(f"{name} must have {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise ValueError(f"{name} must have {cols} columns, got {a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def as_vector(v, length: int | None = None, name: str = "vector") -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if length is not None and a.size != length:
        raise ValueError(f"{name} must have length {length}, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def qr_orthonormalize(m) -> np.ndarray:
    """Orthonormal basis for the column span of `m` (same shape, QR-based).

    Raises RankDeficientError when the columns are not linearly independent,
    detected from the diagonal of R.
    """
    a = as_matrix(m, name="qr input")
    if a.shape[0] < a.shape[1]:
        raise ValueError(f"need rows >= cols, got {a.shape}")
    q, r = np.linalg.qr(a)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-12 * max(diag.max(), 1e-300):
        raise RankDeficientError(
            f"columns are rank deficient (min |R_ii| = {diag.min():.3e})"
        )
    return q


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD: returns (U, s, V) with m = U @ diag(s) @ V.T."""
    a = as_matrix(m, name="svd input")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u, s, vh.T


def sym_eig_min(m) -> float:
    """Smallest eigenvalue of a symmetric matrix (symmetry validated to 1e-10)."""
    a = as_matrix(m, name="sym_eig_min input")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    scale = max(float(np.abs(a).max()), 1.0)
    if float(np.abs(a - a.T).max()) > _SYM_TOL * scale:
        raise ValueError("matrix is not symmetric within tolerance 1e-10")
    return float(np.linalg.eigvalsh(a)[0])


def kron(a, b) -> np.ndarray:
    """Standard Kronecker product."""
    return np.kron(as_matrix(a, name="kron a"), as_matrix(b, name="kron b"))


def solve_spd(a, b) -> np.ndarray:
    """Solve a @ x = b for symmetric positive-definite `a`.

    SPD is certified via the Cholesky factorization; non-SPD input raises
    numpy's LinAlgError from the factorization attempt.
    """
    am = as_matrix(a, name="solve_spd a")
    if am.shape[0] != am.shape[1]:
        raise ValueError(f"a must be square, got {am.shape}")
    scale = max(float(np.abs(am).max()), 1.0)
    if float(np.abs(am - am.T).max()) > _SYM_TOL * scale:
        raise np.linalg.LinAlgError("solve_spd: matrix is not symmetric")
    np.linalg.cholesky(am)  # raises LinAlgError unless positive definite
    bm = np.asarray(b, dtype=float)
    return np.linalg.solve(am, bm)


def pinv(m) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with relative cutoff PINV_RCOND."""
    return np.linalg.pinv(as_matrix(m, name="pinv input"), rcond=PINV_RCOND)


def spectral_radius(m) -> float:
    a = as_matrix(m, name="spectral_radius input")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    return float(np.max(np.abs(np.linalg.eigvals(a))))
