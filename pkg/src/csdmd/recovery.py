"""Greedy sparse recovery of mode coefficients from few measurements.

The workhorse is a complex-valued CoSaMP: identify candidate support from
the adjoint proxy, solve least squares on the merged support, prune to the
K largest coefficients, repeat until the residual is small or stalls.
An iterative-shrinkage basis-pursuit solver is provided as an optional
cross-check for exactly sparse instances.
"""

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, NoProgress, ZeroInput
from .sensing import (
    MeasurementMatrix,
    SparseBasis,
    adjoint_measurement,
    apply_basis,
    apply_measurement,
)

STALL_WINDOW = 3
STALL_REL_DECREASE = 1e-4
TIKHONOV_FLOOR = 1e-12
FAILURE_RESIDUAL = 0.5


@dataclass(frozen=True)
class RecoveryConfig:
    sparsity_K: int
    max_iters: int = 50
    residual_tol: float = 1e-6

    def __post_init__(self):
        if self.sparsity_K < 1:
            raise DimensionError("sparsity_K must be >= 1")
        if self.max_iters < 1:
            raise DimensionError("max_iters must be >= 1")


@dataclass(frozen=True)
class RecoveredMode:
    """Sparse coefficients, their spatial synthesis, and solver diagnostics."""

    coeffs: np.ndarray
    spatial: np.ndarray
    residual: float
    iters: int


class DenseOperator:
    """Wrap an explicit matrix as a recovery operator (mainly for tests)."""

    def __init__(self, A):
        self.A = np.asarray(A)
        self.shape = self.A.shape

    def apply(self, s):
        return self.A @ s

    def adjoint(self, y):
        return self.A.conj().T @ y

    def columns(self, idx):
        return self.A[:, idx]

    def synthesize(self, coeffs):
        return coeffs


class SensingOperator:
    """The composite operator (measure after basis synthesis).

    Never materialized: applications go through the FFT, and dense columns
    are extracted only on the small candidate supports CoSaMP works with.
    """

    def __init__(self, C: MeasurementMatrix, psi: SparseBasis):
        if C.n != psi.n:
            raise DimensionError(f"measurement n={C.n} != basis n={psi.n}")
        self.C = C
        self.psi = psi
        self.shape = (C.p, C.n)

    def apply(self, s):
        return apply_measurement(self.C, apply_basis(self.psi, s, "forward"))

    def adjoint(self, y):
        return apply_basis(self.psi, adjoint_measurement(self.C, y), "inverse")

    def columns(self, idx):
        idx = np.asarray(idx)
        one_hots = np.zeros((self.C.n, len(idx)), dtype=complex)
        one_hots[idx, np.arange(len(idx))] = 1.0
        atoms = apply_basis(self.psi, one_hots, "forward")
        return apply_measurement(self.C, atoms)

    def synthesize(self, coeffs):
        return apply_basis(self.psi, coeffs, "forward")


def cosamp(A_apply, y, cfg: RecoveryConfig) -> RecoveredMode:
    """Recover a K-sparse coefficient vector from y ~ A s.

    Keeps the best iterate seen so far, so the reported residual is
    non-increasing over accepted iterations.  Halts at ``residual_tol``,
    on stall (relative residual decrease below 1e-4 across 3 iterations),
    or at the iteration cap.

    Raises
    ------
    ZeroInput
        If y is numerically zero.
    NoProgress
        If the solver halts with relative residual above 0.5.
    """
    p, n = A_apply.shape
    K = cfg.sparsity_K
    y = np.asarray(y, dtype=complex)
    ynorm = np.linalg.norm(y)
    if ynorm < 1e-150:
        raise ZeroInput("measurement vector is numerically zero")
    if p < 2 * K:
        warnings.warn(
            f"only p={p} measurements for sparsity K={K}; recovery may fail",
            RuntimeWarning,
            stacklevel=2,
        )

    support = np.array([], dtype=int)
    best_res = np.inf
    best_x = np.zeros(n, dtype=complex)
    history = []
    residual = y.copy()
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        proxy = A_apply.adjoint(residual)
        candidates = np.argsort(np.abs(proxy))[-2 * K:]
        merged = np.union1d(support, candidates)
        AT = A_apply.columns(merged)
        G = AT.conj().T @ AT + TIKHONOV_FLOOR * np.eye(len(merged))
        coef = np.linalg.solve(G, AT.conj().T @ y)
        keep = np.argsort(np.abs(coef))[-K:]
        support = merged[keep]
        x = np.zeros(n, dtype=complex)
        x[support] = coef[keep]
        residual = y - A_apply.apply(x)
        rel = np.linalg.norm(residual) / ynorm
        if rel < best_res:
            best_res = rel
            best_x = x
        history.append(best_res)
        if best_res <= cfg.residual_tol:
            break
        if len(history) > STALL_WINDOW:
            prev = history[-1 - STALL_WINDOW]
            if prev - history[-1] < STALL_REL_DECREASE * prev:
                break

    if best_res > FAILURE_RESIDUAL:
        raise NoProgress(
            f"residual {best_res:.3f} after {iters} iterations; "
            "too few measurements or target not sparse"
        )
    return RecoveredMode(
        coeffs=best_x,
        spatial=A_apply.synthesize(best_x),
        residual=float(best_res),
        iters=iters,
    )


def _worker_count(n_tasks):
    raw = os.environ.get("CSDMD_THREADS", "0")
    try:
        requested = int(raw)
    except ValueError:
        requested = 0
    if requested <= 0:
        requested = os.cpu_count() or 1
    return max(1, min(requested, n_tasks))


def recover_modes(projected, C: MeasurementMatrix, psi: SparseBasis, cfg):
    """Recover full-state spatial modes from projected DMD modes.

    Each column of the projected mode matrix is an independent sparse
    recovery problem; failures are recorded per mode and do not abort the
    remaining columns.  Returns the n x r matrix of recovered spatial
    modes (zero columns where recovery failed) and a per-mode diagnostics
    list holding RecoveredMode instances or error strings.
    """
    op = SensingOperator(C, psi)
    Phi_y = projected.Phi
    r = Phi_y.shape[1]

    def one(j):
        try:
            return cosamp(op, Phi_y[:, j], cfg)
        except (ZeroInput, NoProgress) as exc:
            return f"mode {j}: {type(exc).__name__}: {exc}"

    workers = _worker_count(r)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            diagnostics = list(pool.map(one, range(r)))
    else:
        diagnostics = [one(j) for j in range(r)]

    full_modes = np.zeros((C.n, r), dtype=complex)
    for j, diag in enumerate(diagnostics):
        if isinstance(diag, RecoveredMode):
            full_modes[:, j] = diag.spatial
    return full_modes, diagnostics


def l1_reconstruct(A_apply, y, tol=1e-8, max_iters=4000):
    """Basis-pursuit style solve by iterative shrinkage with continuation.

    Minimizes the l1 norm subject to A s ~ y by running FISTA on a
    sequence of shrinking penalty weights, then debiasing with a least
    squares solve on the detected support.  Agrees with cosamp on
    noiseless exactly sparse instances.
    """
    p, n = A_apply.shape
    y = np.asarray(y, dtype=complex)
    ynorm = np.linalg.norm(y)
    if ynorm < 1e-150:
        raise ZeroInput("measurement vector is numerically zero")

    # power iteration for the step size
    rng = np.random.default_rng(0)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    z /= np.linalg.norm(z)
    for _ in range(30):
        z = A_apply.adjoint(A_apply.apply(z))
        z /= np.linalg.norm(z)
    L = np.linalg.norm(A_apply.adjoint(A_apply.apply(z)))
    step = 1.0 / max(L, 1e-12)

    def shrink(v, thresh):
        mag = np.abs(v)
        scale = np.maximum(mag - thresh, 0.0) / np.maximum(mag, 1e-300)
        return v * scale

    x = np.zeros(n, dtype=complex)
    lam = 0.1 * np.max(np.abs(A_apply.adjoint(y)))
    lam_min = 1e-10 * lam
    spent = 0
    while lam > lam_min and spent < max_iters:
        zv = x.copy()
        t = 1.0
        x_prev = x.copy()
        for _ in range(60):
            spent += 1
            grad = A_apply.adjoint(A_apply.apply(zv) - y)
            x_new = shrink(zv - step * grad, step * lam)
            t_new = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
            zv = x_new + ((t - 1.0) / t_new) * (x_new - x_prev)
            x_prev, x, t = x_new, x_new, t_new
        lam *= 0.3
        rel = np.linalg.norm(y - A_apply.apply(x)) / ynorm
        if rel <= tol:
            break

    # debias: least squares on the surviving support
    mags = np.abs(x)
    if mags.max() > 0:
        keep = np.flatnonzero(mags > 1e-4 * mags.max())
        AT = A_apply.columns(keep)
        G = AT.conj().T @ AT + TIKHONOV_FLOOR * np.eye(len(keep))
        coef = np.linalg.solve(G, AT.conj().T @ y)
        x = np.zeros(n, dtype=complex)
        x[keep] = coef

    rel = np.linalg.norm(y - A_apply.apply(x)) / ynorm
    if rel > np.sqrt(tol):
        raise ConvergenceError(
            f"basis pursuit stalled at relative residual {rel:.3e}"
        )
    return x
