"""Dense real linear algebra used throughout the package.

Every determinant of a positive-definite matrix goes through a Cholesky
factorization and is returned as a natural logarithm, so ratios of large
determinants can be formed without overflow.
"""

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonConvergence, NotPositiveDefinite

#: Relative pivot threshold for the positive-definiteness test.
PD_RTOL = 1e-12


def symmetrize(m):
    """Return ``m`` as a float array with ``m[i, j] == m[j, i]`` exactly.

    Raises
    ------
    DimensionMismatch
        If ``m`` is not a non-empty square matrix.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


def symplectic_form(modes):
    """Block-diagonal ``2n x 2n`` form with ``[[0, 1], [-1, 0]]`` on each mode."""
    if modes < 1:
        raise ValueError("modes must be positive")
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def cholesky(m):
    """Lower Cholesky factor with a scale-relative pivot check.

    A pivot ``L[i, i]**2`` is rejected when it is not larger than
    ``PD_RTOL * max(diag(m))``.
    """
    a = symmetrize(m)
    scale = np.max(np.abs(np.diag(a)))
    try:
        low = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    pivots = np.diag(low) ** 2
    if scale == 0.0 or np.any(pivots <= PD_RTOL * scale):
        raise NotPositiveDefinite(
            f"pivot {pivots.min():.3e} below tolerance {PD_RTOL * scale:.3e}"
        )
    return low


def cholesky_logdet(m):
    """Natural logarithm of ``det(m)`` for symmetric positive-definite ``m``."""
    low = cholesky(m)
    return float(2.0 * np.sum(np.log(np.diag(low))))


def schur_complement(m, split):
    """Schur complement ``D - C^T A^{-1} C`` of the leading ``split x split`` block.

    With ``m = [[A, C], [C^T, D]]`` the determinant factorizes as
    ``det(m) = det(A) * det(schur_complement(m, split))``.
    """
    a = symmetrize(m)
    dim = a.shape[0]
    if not 0 < split < dim:
        raise DimensionMismatch(f"split must lie strictly between 0 and {dim}, got {split}")
    low = cholesky(a[:split, :split])
    w = scipy.linalg.solve_triangular(low, a[:split, split:], lower=True)
    return symmetrize(a[split:, split:] - w.T @ w)


def symmetric_eigenvalues(m):
    """Ascending eigenvalues of a real symmetric matrix."""
    a = symmetrize(m)
    if not np.all(np.isfinite(a)):
        raise NonConvergence("matrix has non-finite entries")
    try:
        return np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc


def hermitian_min_eigenvalue(real_part, imag_part):
    """Smallest eigenvalue of the Hermitian matrix ``real_part + 1j * imag_part``.

    Uses the real embedding ``[[Re, -Im], [Im, Re]]``, whose spectrum is the
    Hermitian spectrum with every eigenvalue doubled.
    """
    re = symmetrize(real_part)
    im = np.asarray(imag_part, dtype=float)
    if im.shape != re.shape:
        raise DimensionMismatch(f"shapes differ: {re.shape} vs {im.shape}")
    im = 0.5 * (im - im.T)
    embedded = np.block([[re, -im], [im, re]])
    return float(symmetric_eigenvalues(embedded)[0])
