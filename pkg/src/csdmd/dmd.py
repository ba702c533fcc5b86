"""Dynamic mode decomposition of snapshot pairs, in full state space or
through a measurement operator.

The decomposition finds the best-fit linear operator A with X' ~ A X and
returns its leading eigenstructure: eigenvalues (discrete and continuous
time), spatial modes, and initial amplitudes.  The compressed variant runs
the decomposition on projected data Y = C X and lifts the modes back to
full state space using the full shifted snapshots.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DimensionError, RankCollapse, RankZero
from .linalg import DEFAULT_TRUNCATION_TOL, EconSvd, eig_dense, svd_econ
from .sensing import MeasurementMatrix, apply_measurement

ZERO_EIG_REL = 1e-12


@dataclass(frozen=True)
class SnapshotPair:
    """Snapshot matrix X and its one-step-shifted counterpart X'.

    Columns are state vectors at successive, evenly spaced times.  The
    optional grid records the 2-d spatial shape (nx, ny) with nx*ny rows.
    """

    X: np.ndarray
    Xp: np.ndarray
    dt: float
    grid: Optional[tuple] = None

    def __post_init__(self):
        X = np.asarray(self.X)
        Xp = np.asarray(self.Xp)
        if X.ndim != 2 or X.shape != Xp.shape:
            raise DimensionError(
                f"snapshot matrices must share shape, got {X.shape} and {Xp.shape}"
            )
        if self.grid is not None:
            nx, ny = self.grid
            if nx * ny != X.shape[0]:
                raise DimensionError(
                    f"grid {self.grid} does not match row count {X.shape[0]}"
                )
        if self.dt <= 0:
            raise DimensionError("dt must be positive")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class DmdResult:
    """Eigenstructure of the best-fit linear snapshot propagator.

    lambdas are discrete-time eigenvalues; omegas = log(lambdas)/dt their
    continuous-time counterparts on the principal branch.  Phi columns are
    the spatial modes, amplitudes the least-squares coefficients against
    the first snapshot.
    """

    lambdas: np.ndarray
    omegas: np.ndarray
    W: np.ndarray
    Phi: np.ndarray
    Atilde: np.ndarray
    amplitudes: np.ndarray
    svd_used: EconSvd
    rank: int
    dt: float


@dataclass(frozen=True)
class PipelinePath:
    """Tag naming one of the four processing pathways."""

    tag: str

    VALID = ("1A", "1B", "2A", "2B")

    def __post_init__(self):
        if self.tag not in self.VALID:
            raise DimensionError(f"unknown pipeline path {self.tag!r}")


def _modes_from_reduced(Xp, svd, W, lambdas):
    """Spatial modes X' V sigma^-1 W, with the propagated-basis fallback
    U W for eigenvalues that are numerically zero."""
    Phi = (Xp @ (svd.V / svd.sigma)) @ W
    lam_max = np.max(np.abs(lambdas)) if len(lambdas) else 0.0
    # <= so a fully zero spectrum (lam_max = 0) still takes the fallback
    dead = np.abs(lambdas) <= ZERO_EIG_REL * lam_max
    if np.any(dead):
        UW = svd.U @ W
        Phi[:, dead] = UW[:, dead]
    return Phi


def _continuous_rates(lambdas, dt):
    """Principal-branch log of the discrete eigenvalues over dt; zero
    eigenvalues map to -inf without warning noise."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(lambdas.astype(complex)) / dt


def _amplitudes(Phi, x0):
    b, *_ = np.linalg.lstsq(Phi, x0.astype(complex), rcond=None)
    return b


def exact_dmd(data: SnapshotPair, truncation_tol=DEFAULT_TRUNCATION_TOL) -> DmdResult:
    """Exact DMD of a full-state snapshot pair.

    The four steps: economy SVD of X, least-squares reduced propagator
    Atilde = U^H X' V sigma^-1, eigendecomposition of Atilde, and mode
    reconstruction from the shifted snapshots.

    Parameters
    ----------
    data : SnapshotPair
    truncation_tol : float
        Relative SVD truncation threshold; controls the retained rank.

    Raises
    ------
    RankZero
        If every singular value fell below the threshold.
    """
    if data.m < 2:
        raise DimensionError("need at least 2 snapshot columns")
    svd = svd_econ(data.X, truncation_tol)
    if svd.rank == 0:
        raise RankZero("all singular values truncated")
    Atilde = svd.U.conj().T @ (data.Xp @ (svd.V / svd.sigma))
    lambdas, W = eig_dense(Atilde)
    Phi = _modes_from_reduced(data.Xp, svd, W, lambdas)
    omegas = _continuous_rates(lambdas, data.dt)
    b = _amplitudes(Phi, data.X[:, 0])
    return DmdResult(
        lambdas=lambdas,
        omegas=omegas,
        W=W,
        Phi=Phi,
        Atilde=Atilde,
        amplitudes=b,
        svd_used=svd,
        rank=svd.rank,
        dt=data.dt,
    )


def compressed_dmd(
    full: SnapshotPair,
    C: MeasurementMatrix,
    truncation_tol=DEFAULT_TRUNCATION_TOL,
    full_svd: Optional[EconSvd] = None,
) -> DmdResult:
    """DMD through a measurement operator, with full-state modes.

    Projects the snapshots to Y = C X, Y' = C X', decomposes the projected
    pair, and rebuilds spatial modes from the full shifted snapshots as
    X' V_Y sigma_Y^-1 W_Y.  Eigenvalues come entirely from the projected
    data, so the expensive eigenproblem is p x p instead of n x n.

    Parameters
    ----------
    full : SnapshotPair
        Full-state data (needed for the mode reconstruction).
    C : MeasurementMatrix
    truncation_tol : float
    full_svd : EconSvd, optional
        Precomputed decomposition of X, reused for the rank check.  When
        omitted it is computed here.

    Raises
    ------
    RankCollapse
        If the projected data has lower rank than the full data and the
        lost direction carries a significant singular value.  This signals
        a measurement operator whose null space intersects the mode
        subspace.
    """
    if full.m < 2:
        raise DimensionError("need at least 2 snapshot columns")
    Y = apply_measurement(C, full.X)
    Yp = apply_measurement(C, full.Xp)
    svd_y = svd_econ(Y, truncation_tol)
    if svd_y.rank == 0:
        raise RankZero("all singular values truncated")

    if full_svd is None:
        full_svd = svd_econ(full.X, truncation_tol)
    if svd_y.rank < full_svd.rank:
        # Only complain when the dropped direction is well above the
        # truncation noise floor; tail wobble near the cutoff is benign.
        lost = full_svd.sigma[svd_y.rank]
        if lost > np.sqrt(truncation_tol) * full_svd.sigma[0]:
            raise RankCollapse(
                f"projected rank {svd_y.rank} < full rank {full_svd.rank}; "
                f"dropped relative singular value {lost / full_svd.sigma[0]:.3e}"
            )

    Atilde = svd_y.U.conj().T @ (Yp @ (svd_y.V / svd_y.sigma))
    lambdas, W = eig_dense(Atilde)
    Phi = _modes_from_reduced(full.Xp, svd_y, W, lambdas)
    omegas = _continuous_rates(lambdas, full.dt)
    b = _amplitudes(Phi, full.X[:, 0])
    return DmdResult(
        lambdas=lambdas,
        omegas=omegas,
        W=W,
        Phi=Phi,
        Atilde=Atilde,
        amplitudes=b,
        svd_used=svd_y,
        rank=svd_y.rank,
        dt=full.dt,
    )


def advance_modes(result: DmdResult, t: float) -> np.ndarray:
    """Evaluate the DMD model state Phi diag(exp(omega t)) b at time t."""
    return result.Phi @ (np.exp(result.omegas * t) * result.amplitudes)


def project_dmd_result(result: DmdResult, C: MeasurementMatrix) -> DmdResult:
    """Apply a measurement operator to the modes, keeping eigenvalues.

    Useful for stating the covariance property: measuring the data and
    measuring the modes commute for rank-preserving operators.
    """
    if C.n != result.Phi.shape[0]:
        raise DimensionError(
            f"measurement expects {C.n} rows, modes have {result.Phi.shape[0]}"
        )
    return replace(result, Phi=apply_measurement(C, result.Phi))


def mode_alignment(phi, psi) -> float:
    """Scale- and phase-invariant similarity |phi^H psi| / (|phi| |psi|)."""
    na = np.linalg.norm(phi)
    nb = np.linalg.norm(psi)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.abs(np.vdot(phi, psi)) / (na * nb))


def pair_eigenvalues(lambdas_a, lambdas_b, amplitudes_a=None):
    """Greedy nearest-neighbor pairing of two eigenvalue sets.

    Reference eigenvalues are processed in order of decreasing amplitude
    magnitude (when amplitudes are given) so dominant modes claim their
    nearest counterpart first.  Returns a list of (i, j, distance) for
    matched pairs plus the indices of unmatched entries on each side.
    """
    lambdas_a = np.asarray(lambdas_a)
    lambdas_b = np.asarray(lambdas_b)
    if amplitudes_a is not None and len(amplitudes_a) == len(lambdas_a):
        order = np.argsort(-np.abs(np.asarray(amplitudes_a)))
    else:
        order = np.argsort(-np.abs(lambdas_a))
    taken = set()
    pairs = []
    for i in order:
        if len(taken) == len(lambdas_b):
            break
        dist = np.abs(lambdas_b - lambdas_a[i])
        for j in np.argsort(dist):
            if j not in taken:
                taken.add(int(j))
                pairs.append((int(i), int(j), float(dist[j])))
                break
    matched_a = {p[0] for p in pairs}
    unmatched_a = [i for i in range(len(lambdas_a)) if i not in matched_a]
    unmatched_b = [j for j in range(len(lambdas_b)) if j not in taken]
    pairs.sort(key=lambda p: p[0])
    return pairs, unmatched_a, unmatched_b
