"""Decomposition substrate tests.

The SVD is cross-checked against numpy's LAPACK-backed bidiagonalization
solver, which shares no code with the Gram-matrix route used by the
package.  The eigensolver is checked by independently building the
characteristic polynomial (trace recursion) and evaluating it at the
returned eigenvalues, plus a companion-roots comparison.
"""

import numpy as np
import pytest

from csdmd.errors import ConvergenceError, DimensionError, ZeroMatrix
from csdmd.linalg import eig_dense, pinv_from_svd, svd_econ


def char_poly_coeffs(A):
    """Coefficients of det(lambda I - A), highest power first, by the
    trace recursion c_k = -(1/k) sum_{i=1}^k tr(A^i) c_{k-i}."""
    d = A.shape[0]
    powers = [np.eye(d, dtype=complex)]
    for _ in range(d):
        powers.append(powers[-1] @ A)
    traces = [np.trace(P) for P in powers]
    coeffs = [1.0 + 0j]
    for k in range(1, d + 1):
        s = sum(traces[i] * coeffs[k - i] for i in range(1, k + 1))
        coeffs.append(-s / k)
    return np.array(coeffs)


def polish_roots(coeffs, roots, iters=5):
    """A few Newton steps on each root of the polynomial."""
    deriv = np.polyder(coeffs)
    out = roots.astype(complex)
    for _ in range(iters):
        out = out - np.polyval(coeffs, out) / np.polyval(deriv, out)
    return out


def test_identity_svd():
    svd = svd_econ(np.eye(3))
    np.testing.assert_allclose(svd.sigma, [1.0, 1.0, 1.0], atol=1e-14)
    assert svd.rank == 3
    # degenerate spectrum means U is only determined up to a joint
    # rotation with V; the product pins it down
    np.testing.assert_allclose(svd.U @ svd.V.conj().T, np.eye(3), atol=1e-12)


def test_rank_one_outer_product():
    u = np.array([3.0, 0.0, 4.0])
    v = np.array([1.0, 1.0])
    svd = svd_econ(np.outer(u, v))
    assert svd.rank == 1
    np.testing.assert_allclose(svd.sigma, [5.0 * np.sqrt(2.0)], rtol=1e-13)


def test_against_lapack_svd():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((16, 8))
    svd = svd_econ(X)
    sigma_ref = np.linalg.svd(X, compute_uv=False)
    np.testing.assert_allclose(svd.sigma, sigma_ref, atol=1e-10 * sigma_ref[0])


def test_reconstruction_and_orthonormality():
    rng = np.random.default_rng(1)
    for trial in range(5):
        n, m, r = 40, 15, 6
        A = np.linalg.qr(rng.standard_normal((n, r)))[0]
        B = np.linalg.qr(rng.standard_normal((m, r)))[0]
        sig = np.sort(rng.uniform(0.1, 3.0, r))[::-1]
        X = (A * sig) @ B.T
        # the Gram route sees a noise floor near sqrt(eps) * sigma_0, so
        # a tolerance above that floor recovers the exact rank
        svd = svd_econ(X, truncation_tol=1e-7)
        assert svd.rank == r
        rec = (svd.U * svd.sigma) @ svd.V.conj().T
        assert np.linalg.norm(rec - X) <= 1e-8 * np.linalg.norm(X)
        assert np.linalg.norm(svd.U.conj().T @ svd.U - np.eye(r)) <= 1e-10
        assert np.linalg.norm(svd.V.conj().T @ svd.V - np.eye(r)) <= 1e-10
        # the permissive default keeps junk directions near the noise
        # floor; factors stay orthonormal and reconstruction stays sane,
        # though the tight bound only applies when rank is resolved
        loose = svd_econ(X)
        rec = (loose.U * loose.sigma) @ loose.V.conj().T
        assert np.linalg.norm(rec - X) <= 1e-6 * np.linalg.norm(X)
        eye = np.eye(loose.rank)
        assert np.linalg.norm(loose.U.conj().T @ loose.U - eye) <= 1e-10


def test_orthonormality_with_wide_spectrum():
    # singular values spanning six decades still give orthonormal factors
    rng = np.random.default_rng(3)
    n, m, r = 200, 40, 10
    A = np.linalg.qr(rng.standard_normal((n, r)))[0]
    B = np.linalg.qr(rng.standard_normal((m, r)))[0]
    sig = np.logspace(0, -6, r)
    X = (A * sig) @ B.T
    svd = svd_econ(X, truncation_tol=1e-7)
    assert svd.rank == r
    assert np.linalg.norm(svd.U.conj().T @ svd.U - np.eye(r)) <= 1e-10


def test_wide_matrix_swaps_factors():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((6, 20))
    svd = svd_econ(X)
    sigma_ref = np.linalg.svd(X, compute_uv=False)[: svd.rank]
    np.testing.assert_allclose(svd.sigma, sigma_ref, atol=1e-10 * sigma_ref[0])
    assert svd.U.shape == (6, svd.rank)
    assert svd.V.shape == (20, svd.rank)
    rec = (svd.U * svd.sigma) @ svd.V.conj().T
    assert np.linalg.norm(rec - X) <= 1e-8 * np.linalg.norm(X)


def test_complex_input():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((12, 5)) + 1j * rng.standard_normal((12, 5))
    svd = svd_econ(X)
    sigma_ref = np.linalg.svd(X, compute_uv=False)
    np.testing.assert_allclose(svd.sigma, sigma_ref, atol=1e-10 * sigma_ref[0])
    rec = (svd.U * svd.sigma) @ svd.V.conj().T
    assert np.linalg.norm(rec - X) <= 1e-10 * np.linalg.norm(X)


def test_truncation_rank():
    rng = np.random.default_rng(5)
    A = np.linalg.qr(rng.standard_normal((30, 4)))[0]
    B = np.linalg.qr(rng.standard_normal((10, 4)))[0]
    X = (A * np.array([1.0, 0.5, 1e-6, 1e-7])) @ B.T
    assert svd_econ(X, truncation_tol=1e-4).rank == 2
    assert svd_econ(X, truncation_tol=1e-8).rank == 4


def test_left_unitary_preserves_sigma():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((20, 8))
    Q = np.linalg.qr(rng.standard_normal((20, 20)))[0]
    s1 = svd_econ(X).sigma
    s2 = svd_econ(Q @ X).sigma
    np.testing.assert_allclose(s1, s2, atol=1e-10 * s1[0])


def test_right_unitary_preserves_sigma_and_subspace():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((20, 8))
    P = np.linalg.qr(rng.standard_normal((8, 8)))[0]
    sv1 = svd_econ(X)
    sv2 = svd_econ(X @ P.conj().T)
    np.testing.assert_allclose(sv1.sigma, sv2.sigma, atol=1e-10 * sv1.sigma[0])
    # left subspace unchanged: projectors agree
    P1 = sv1.U @ sv1.U.conj().T
    P2 = sv2.U @ sv2.U.conj().T
    assert np.linalg.norm(P1 - P2) <= 1e-8


def test_zero_matrix_rejected():
    with pytest.raises(ZeroMatrix):
        svd_econ(np.zeros((4, 3)))


def test_nonfinite_rejected():
    X = np.ones((3, 3))
    X[1, 1] = np.nan
    with pytest.raises(DimensionError):
        svd_econ(X)
    with pytest.raises(DimensionError):
        svd_econ(np.ones(5))


def test_eig_diagonal():
    lambdas, W = eig_dense(np.diag([2.0, -1.0]))
    np.testing.assert_allclose(sorted(lambdas.real), [-1.0, 2.0], atol=1e-14)
    np.testing.assert_allclose(np.abs(W), np.eye(2), atol=1e-12)


def test_eig_rotation_spectrum():
    th = 0.3
    A = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    lambdas, _ = eig_dense(A)
    expected = {np.exp(1j * th), np.exp(-1j * th)}
    for lam in lambdas:
        assert min(abs(lam - e) for e in expected) < 1e-12


def test_eig_against_char_poly():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((8, 8))
    lambdas, W = eig_dense(A)
    coeffs = char_poly_coeffs(A)
    # evaluate p at each returned eigenvalue, normalized by the
    # coefficient magnitude at that point
    for lam in lambdas:
        scale = np.polyval(np.abs(coeffs), abs(lam))
        assert abs(np.polyval(coeffs, lam)) <= 1e-10 * scale
    # companion roots, polished, should be the same multiset
    roots = polish_roots(coeffs, np.roots(coeffs))
    for lam in lambdas:
        assert min(abs(lam - r) for r in roots) < 1e-8


def test_eig_residual_and_normalization():
    rng = np.random.default_rng(12)
    for trial in range(5):
        A = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
        lambdas, W = eig_dense(A)
        resid = np.linalg.norm(A @ W - W * lambdas, axis=0)
        assert np.all(resid <= 1e-8 * np.linalg.norm(A))
        np.testing.assert_allclose(np.linalg.norm(W, axis=0), 1.0, atol=1e-12)
        # canonical phase: largest entry of each column real positive
        for j in range(W.shape[1]):
            k = np.argmax(np.abs(W[:, j]))
            assert W[k, j].real > 0
            assert abs(W[k, j].imag) <= 1e-12 * abs(W[k, j])


def test_eig_dimension_guards():
    with pytest.raises(DimensionError):
        eig_dense(np.ones((3, 4)))
    with pytest.raises(DimensionError):
        eig_dense(np.eye(20), max_dim=10)


def test_pinv_identity():
    np.testing.assert_allclose(pinv_from_svd(svd_econ(np.eye(2))), np.eye(2), atol=1e-13)


def test_pinv_truncated_diagonal():
    pinv = pinv_from_svd(svd_econ(np.diag([2.0, 0.0]), truncation_tol=1e-10))
    np.testing.assert_allclose(pinv, np.diag([0.5, 0.0]), atol=1e-13)


def test_pinv_left_inverse():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((10, 4))
    pinv = pinv_from_svd(svd_econ(X))
    np.testing.assert_allclose(pinv @ X, np.eye(4), atol=1e-9)
    # defining property X X+ X = X
    assert np.linalg.norm(X @ pinv @ X - X) <= 1e-8 * np.linalg.norm(X)
