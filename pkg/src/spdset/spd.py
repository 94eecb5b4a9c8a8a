"""Spectral matrix functions on symmetric and SPD matrices.

All functions accept a single matrix of shape ``(n, n)`` or a stack of
shape ``(..., n, n)`` and are pure: inputs are never modified.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import InvalidInput, NotPositiveDefinite, Overflow

# smallest/largest eigenvalue ratio below which a matrix is not accepted as SPD
SPD_RTOL = 1e-12
# clamp level (relative to the largest eigenvalue) under the "clamp" policy
CLAMP_RTOL = 1e-10
EXP_MAX_EIGENVALUE = 700.0


class EigenPair(NamedTuple):
    """Eigenvalues sorted descending, with orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_symmetric(A):
    """Validate a square finite matrix (or stack) and return ``(A + A.T) / 2``."""
    A = np.asarray(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2] or A.shape[-1] < 1:
        raise InvalidInput(f"expected square matrices, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def sym_eig(A):
    """Eigendecomposition of a symmetric matrix.

    Eigenvalues are returned in descending order. Each eigenvector is
    signed so that its first component with magnitude above 1e-12 is
    positive, which makes the output reproducible.
    """
    A = as_symmetric(A)
    values, vectors = np.linalg.eigh(A)
    values = values[..., ::-1]
    vectors = vectors[..., ::-1]
    lead = np.argmax(np.abs(vectors) > 1e-12, axis=-2)[..., None, :]
    signs = np.sign(np.take_along_axis(vectors, lead, axis=-2))
    signs[signs == 0] = 1.0
    return EigenPair(values, vectors * signs)


def _reassemble(vectors, values):
    out = (vectors * values[..., None, :]) @ np.swapaxes(vectors, -1, -2)
    return 0.5 * (out + np.swapaxes(out, -1, -2))


def _positive_spectrum(values, policy):
    top = values[..., :1]
    if policy == "clamp":
        if np.any(top <= 0):
            raise NotPositiveDefinite("matrix has no positive eigenvalue")
        return np.maximum(values, CLAMP_RTOL * top)
    if policy != "reject":
        raise InvalidInput(f"unknown eigenvalue policy {policy!r}")
    low = values[..., -1:]
    if np.any(low <= SPD_RTOL * np.abs(top)) or np.any(top <= 0):
        raise NotPositiveDefinite(
            f"smallest eigenvalue {np.min(low):.3e} is not positive "
            f"relative to largest {np.max(top):.3e}"
        )
    return values


def check_spd(X, policy="reject"):
    """Return ``X`` symmetrized, raising :class:`NotPositiveDefinite` if it is not SPD.

    With ``policy="clamp"`` small or negative eigenvalues are lifted to
    ``1e-10 * max eigenvalue`` instead.
    """
    w, U = sym_eig(X)
    w2 = _positive_spectrum(w, policy)
    if w2 is w:
        return as_symmetric(X)
    return _reassemble(U, w2)


def spd_function(X, func, policy="reject"):
    """Apply a scalar function to the spectrum of SPD matrices."""
    w, U = sym_eig(X)
    return _reassemble(U, func(_positive_spectrum(w, policy)))


def spd_log(X, policy="reject"):
    """Principal matrix logarithm of SPD matrices."""
    return spd_function(X, np.log, policy)


def spd_power(X, p, policy="reject"):
    return spd_function(X, lambda w: w ** p, policy)


def sym_exp(A):
    """Matrix exponential of symmetric matrices; the result is SPD."""
    w, U = sym_eig(A)
    if np.any(w[..., 0] > EXP_MAX_EIGENVALUE):
        raise Overflow(f"eigenvalue {np.max(w[..., 0]):.1f} would overflow exp")
    return _reassemble(U, np.exp(w))


def double_center(M):
    """Subtract row and column means and add back the grand mean."""
    M = np.asarray(M, dtype=float)
    rows = M.mean(axis=-1, keepdims=True)
    cols = M.mean(axis=-2, keepdims=True)
    grand = M.mean(axis=(-2, -1), keepdims=True)
    return M - rows - cols + grand


def mean_centralize(X, policy="reject"):
    """Mean centralization of SPD matrices in the log domain.

    The matrix logarithm is double-centered so that all its row and
    column sums vanish, then mapped back with the matrix exponential.
    """
    return sym_exp(double_center(spd_log(X, policy)))
