"""Dense matrix substrate: economy SVD via the method of snapshots and a
small dense eigensolver.

The SVD here deliberately works through the m x m Gram matrix rather than
bidiagonalizing the full n x m input, because snapshot matrices are tall
(n >> m) and the Gram route keeps every eigenproblem at the snapshot count.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, ZeroMatrix

DEFAULT_TRUNCATION_TOL = 1e-10
EIG_MAX_DIM = 512


@dataclass(frozen=True)
class EconSvd:
    """Economy singular value decomposition X ~ U diag(sigma) V^H.

    Attributes
    ----------
    U : ndarray, shape (n, r)
        Left singular vectors, orthonormal columns.
    sigma : ndarray, shape (r,)
        Singular values, positive and descending.
    V : ndarray, shape (m, r)
        Right singular vectors, orthonormal columns.
    rank : int
        Retained rank r.
    truncation_tol : float
        Relative threshold used to discard trailing singular values.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    rank: int
    truncation_tol: float


def _check_finite(X):
    if not np.all(np.isfinite(X)):
        raise DimensionError("matrix contains NaN or Inf entries")


def svd_econ(X, truncation_tol=DEFAULT_TRUNCATION_TOL):
    """Economy SVD of a (possibly complex) matrix by the method of snapshots.

    Forms the Gram matrix X^H X (or X X^H when the input is wide), solves
    the symmetric eigenproblem, and maps eigenpairs back to singular
    triplets.  Singular values below ``truncation_tol`` times the largest
    are discarded.

    Parameters
    ----------
    X : ndarray, shape (n, m)
        Input matrix, real or complex.
    truncation_tol : float
        Relative cutoff for rank truncation.

    Returns
    -------
    EconSvd

    Raises
    ------
    ZeroMatrix
        If the input has zero Frobenius norm.
    DimensionError
        If the input is not a 2-d matrix of finite values.
    """
    X = np.asarray(X)
    if X.ndim != 2 or X.size == 0:
        raise DimensionError(f"expected a nonempty 2-d matrix, got shape {X.shape}")
    _check_finite(X)
    if not np.any(X):
        raise ZeroMatrix("cannot decompose an all-zero matrix")

    n, m = X.shape
    if m > n:
        # Wide input: decompose the conjugate transpose and swap factors.
        flipped = svd_econ(X.conj().T, truncation_tol)
        return EconSvd(
            U=flipped.V,
            sigma=flipped.sigma,
            V=flipped.U,
            rank=flipped.rank,
            truncation_tol=truncation_tol,
        )

    G = X.conj().T @ X
    evals, V = np.linalg.eigh(G)
    # eigh returns ascending order; flip and clamp tiny negatives from roundoff
    evals = np.clip(evals[::-1], 0.0, None)
    V = V[:, ::-1]
    sigma = np.sqrt(evals)

    r = int(np.sum(sigma > truncation_tol * sigma[0]))
    r = max(r, 1)
    sigma = sigma[:r]
    V = np.ascontiguousarray(V[:, :r])
    U = X @ V / sigma

    # The Gram route loses orthonormality in U for singular values near
    # sqrt(eps) of the largest; one thin-QR pass restores it without
    # disturbing the reconstruction (the drifting columns carry tiny sigma).
    Q, R = np.linalg.qr(U)
    d = np.diagonal(R)
    phase = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    U = Q * phase

    return EconSvd(U=U, sigma=sigma, V=V, rank=r, truncation_tol=truncation_tol)


def canonical_phase(M):
    """Rescale each column so its largest-magnitude entry is real positive.

    Eigenvectors and mode shapes are defined up to a complex scalar; fixing
    the phase makes outputs reproducible across runs and platforms.
    """
    M = np.array(M, dtype=complex, copy=True)
    for j in range(M.shape[1]):
        col = M[:, j]
        k = int(np.argmax(np.abs(col)))
        a = col[k]
        if np.abs(a) > 0:
            M[:, j] = col * (np.abs(a) / a)
    return M


def eig_dense(A, max_dim=EIG_MAX_DIM):
    """Eigendecomposition of a small dense square matrix.

    Eigenvectors are returned unit-norm with canonical phase, ordered by
    descending eigenvalue magnitude.  The per-column residual
    ``|A w - lambda w|`` is verified against ``1e-8 |A|_F``.

    Parameters
    ----------
    A : ndarray, shape (d, d)
        Square matrix with d <= max_dim.
    max_dim : int
        Safety bound on the problem size.

    Returns
    -------
    lambdas : ndarray, shape (d,)
    W : ndarray, shape (d, d)
        Eigenvector columns, so that A @ W ~ W @ diag(lambdas).
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] > max_dim:
        raise DimensionError(f"matrix dimension {A.shape[0]} exceeds max_dim={max_dim}")
    _check_finite(A)

    try:
        lambdas, W = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from None

    order = np.argsort(-np.abs(lambdas))
    lambdas = lambdas[order]
    W = W[:, order]
    W = W / np.linalg.norm(W, axis=0)
    W = canonical_phase(W)

    norm_A = np.linalg.norm(A)
    resid = np.linalg.norm(A @ W - W * lambdas, axis=0)
    if np.any(resid > 1e-8 * max(norm_A, 1e-300)):
        raise ConvergenceError(
            f"eigenpair residual {resid.max():.3e} exceeds 1e-8 * |A|_F"
        )
    return lambdas, W


def pinv_from_svd(svd):
    """Moore-Penrose pseudo-inverse V diag(1/sigma) U^H from an EconSvd."""
    return (svd.V / svd.sigma) @ svd.U.conj().T
