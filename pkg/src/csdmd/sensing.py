"""Measurement operators, the sparse basis, and sampling diagnostics.

Measurements map a length-n state to p << n observations.  Random
Gaussian and Bernoulli ensembles are scaled to near-unit row norm so the
composite operator (measurement after basis synthesis) acts close to an
isometry on sparse vectors; single-pixel measurement is plain row
selection.  The sparse basis is the unitary 2-d discrete Fourier
transform on the state grid.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadDimensions, DimensionError

KINDS = ("gaussian", "bernoulli", "pixel", "identity", "unitary")


@dataclass(frozen=True)
class MeasurementMatrix:
    """A p x n measurement operator.

    Dense kinds carry their entries in ``payload``; the pixel kind stores
    the selected row indices instead and never materializes a matrix.
    """

    kind: str
    p: int
    n: int
    seed: Optional[int] = None
    payload: Optional[np.ndarray] = None
    indices: Optional[np.ndarray] = None

    def as_dense(self) -> np.ndarray:
        """Materialize the operator as a dense array (testing helper)."""
        if self.kind == "pixel":
            C = np.zeros((self.p, self.n))
            C[np.arange(self.p), self.indices] = 1.0
            return C
        if self.kind == "identity":
            return np.eye(self.n)
        return self.payload


def make_measurement(kind, p, n, seed=None, payload=None) -> MeasurementMatrix:
    """Construct a measurement operator, deterministic per (kind, p, n, seed).

    kind is one of gaussian, bernoulli, pixel, identity, unitary.  The
    unitary kind accepts an explicit (possibly complex) payload with
    orthonormal rows; without a payload a random co-isometry is drawn.
    """
    if kind not in KINDS:
        raise BadDimensions(f"unknown measurement kind {kind!r}")
    if not (1 <= p <= n):
        raise BadDimensions(f"need 1 <= p <= n, got p={p}, n={n}")
    if kind == "identity":
        if p != n:
            raise BadDimensions("identity measurement requires p == n")
        return MeasurementMatrix(kind, p, n, seed)
    if kind == "unitary":
        if payload is not None:
            payload = np.asarray(payload)
            if payload.shape != (p, n):
                raise BadDimensions(
                    f"unitary payload shape {payload.shape} != ({p}, {n})"
                )
            return MeasurementMatrix(kind, p, n, seed, payload=payload)
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((n, p)) + 1j * rng.standard_normal((n, p))
        Q, _ = np.linalg.qr(M)
        return MeasurementMatrix(kind, p, n, seed, payload=Q.conj().T)

    rng = np.random.default_rng(seed)
    if kind == "pixel":
        idx = np.sort(rng.choice(n, size=p, replace=False))
        return MeasurementMatrix(kind, p, n, seed, indices=idx)
    if kind == "gaussian":
        C = rng.standard_normal((p, n)) / np.sqrt(p)
    else:  # bernoulli
        C = (rng.integers(0, 2, size=(p, n)) * 2.0 - 1.0) / np.sqrt(p)
    return MeasurementMatrix(kind, p, n, seed, payload=C)


def apply_measurement(C: MeasurementMatrix, X):
    """Compute Y = C X for a matrix or single vector X."""
    X = np.asarray(X)
    rows = X.shape[0]
    if rows != C.n:
        raise DimensionError(f"operand has {rows} rows, measurement expects {C.n}")
    if C.kind == "pixel":
        return X[C.indices]
    if C.kind == "identity":
        return X.copy()
    return C.payload @ X


def adjoint_measurement(C: MeasurementMatrix, Y):
    """Compute C^H Y (scatter for the pixel kind)."""
    Y = np.asarray(Y)
    if Y.shape[0] != C.p:
        raise DimensionError(f"operand has {Y.shape[0]} rows, expected {C.p}")
    if C.kind == "pixel":
        out_shape = (C.n,) + Y.shape[1:]
        out = np.zeros(out_shape, dtype=Y.dtype)
        out[C.indices] = Y
        return out
    if C.kind == "identity":
        return Y.copy()
    return C.payload.conj().T @ Y


@dataclass(frozen=True)
class SparseBasis:
    """Unitary 2-d DFT synthesis basis on an (nx, ny) grid.

    The forward direction maps coefficient vectors to spatial fields
    (x = Psi s); the inverse direction is the analysis transform.  Both
    use the symmetric 1/sqrt(n) normalization, so the basis is unitary.
    """

    grid: tuple

    @property
    def n(self):
        nx, ny = self.grid
        return nx * ny

    def _shape(self, vec):
        nx, ny = self.grid
        v = np.asarray(vec)
        if v.shape[0] != nx * ny:
            raise DimensionError(f"vector length {v.shape[0]} != grid size {nx * ny}")
        return v, (ny, nx)


def apply_basis(psi: SparseBasis, s, direction="forward"):
    """Apply the basis (or its inverse) to one vector or to matrix columns.

    forward: spatial field from coefficients, via the inverse unitary FFT.
    inverse: coefficients from a spatial field, via the forward unitary FFT.
    """
    v, (ny, nx) = psi._shape(s)
    single = v.ndim == 1
    cols = v.reshape(ny, nx, -1)
    cols = np.moveaxis(cols, -1, 0)
    if direction == "forward":
        out = np.fft.ifft2(cols, norm="ortho")
    elif direction == "inverse":
        out = np.fft.fft2(cols, norm="ortho")
    else:
        raise DimensionError(f"direction must be forward or inverse, got {direction!r}")
    out = np.moveaxis(out, 0, -1).reshape(ny * nx, -1)
    return out[:, 0] if single else out


def mutual_coherence(C: MeasurementMatrix, psi: SparseBasis) -> float:
    """Largest normalized inner product between measurement rows and basis
    columns.

    Low values favor sparse recovery.  Computed without materializing the
    basis: because the unitary DFT matrix is symmetric, the i-th row of
    C Psi is the basis synthesis of the i-th (conjugated) measurement row.
    """
    if C.n != psi.n:
        raise DimensionError(f"measurement n={C.n} does not match basis n={psi.n}")
    rows = C.as_dense()
    # products[:, i] = Psi @ conj(row_i); entry j equals <row_i, psi_j>
    products = apply_basis(psi, rows.conj().T, "forward")
    row_norms = np.linalg.norm(rows, axis=1)
    peak = np.max(np.abs(products), axis=0) / row_norms
    return float(np.max(peak))


def recommended_measurements(K, n, safety=1.5) -> int:
    """Sampling-count heuristic ceil(safety * K * ln(n/K))."""
    if K < 1 or n <= K:
        raise BadDimensions(f"need 1 <= K < n, got K={K}, n={n}")
    return max(1, math.ceil(safety * K * math.log(n / K)))
