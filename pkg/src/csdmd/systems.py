"""Synthetic snapshot generators with retained ground truth.

Two families: a linear system whose state is a sum of a few spatial
Fourier waves, each oscillating and decaying at its own rate, and the
time-periodic double gyre flow on [0, 2] x [0, 1].
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dmd import SnapshotPair
from .errors import BadWavenumber, DimensionError

FREQ_RANGE = (2.0 * np.pi * 0.5, 2.0 * np.pi * 5.0)
DAMP_RANGE = (-0.2, 0.0)
AMP_RANGE = (0.5, 1.5)


@dataclass(frozen=True)
class FourierLtiSystem:
    """A linear system carried by K planted 2-d Fourier waves.

    Each planted wave occupies a conjugate pair of grid wavenumbers so the
    spatial field stays real.  mu holds the continuous-time eigenvalue
    (damping + i * frequency) of each wave; init_amps the complex initial
    coefficient.
    """

    grid: tuple
    K: int
    wavenumbers: tuple
    mu: np.ndarray
    init_amps: np.ndarray
    dt: float
    m: int
    seed: Optional[int] = None

    def __post_init__(self):
        nx, ny = self.grid
        seen = set()
        for kx, ky in self.wavenumbers:
            if not (0 <= kx < nx and 0 <= ky < ny):
                raise BadWavenumber(f"wavenumber ({kx}, {ky}) outside {nx}x{ny} grid")
            neg = ((-kx) % nx, (-ky) % ny)
            if (kx, ky) == neg:
                raise BadWavenumber(
                    f"wavenumber ({kx}, {ky}) is self-conjugate; cannot carry a "
                    "complex eigenvalue on a real field"
                )
            if (kx, ky) in seen or neg in seen:
                raise BadWavenumber(f"wavenumber ({kx}, {ky}) collides with another")
            seen.add((kx, ky))
            seen.add(neg)
        if len(self.wavenumbers) != self.K:
            raise DimensionError("wavenumber count must equal K")
        if np.any(np.real(self.mu) > 1e-12):
            raise DimensionError("plant only neutrally stable or decaying waves")


@dataclass(frozen=True)
class FourierTruth:
    """Ground truth for a generated system: discrete eigenvalues and the
    unit-norm spatial atoms, stored as conjugate pairs (columns 2j, 2j+1
    belong to planted wave j)."""

    lambdas: np.ndarray
    atoms: np.ndarray
    mu: np.ndarray
    wavenumbers: tuple


def make_fourier_lti(nx=128, ny=128, K=5, dt=0.01, m=200, seed=0) -> FourierLtiSystem:
    """Draw a random system: distinct wavenumber pairs, frequencies in
    [pi, 10 pi], small stable dampings, order-one initial coefficients."""
    rng = np.random.default_rng(seed)
    chosen = []
    seen = set()
    while len(chosen) < K:
        kx = int(rng.integers(0, nx))
        ky = int(rng.integers(0, ny))
        neg = ((-kx) % nx, (-ky) % ny)
        if (kx, ky) == neg or (kx, ky) in seen or neg in seen:
            continue
        seen.add((kx, ky))
        seen.add(neg)
        chosen.append((kx, ky))
    freq = rng.uniform(*FREQ_RANGE, size=K)
    damp = rng.uniform(*DAMP_RANGE, size=K)
    mu = damp + 1j * freq
    amps = rng.uniform(*AMP_RANGE, size=K) * np.exp(2j * np.pi * rng.uniform(0, 1, K))
    return FourierLtiSystem(
        grid=(nx, ny),
        K=K,
        wavenumbers=tuple(chosen),
        mu=mu,
        init_amps=amps,
        dt=dt,
        m=m,
        seed=seed,
    )


def _atom(nx, ny, kx, ky):
    coef = np.zeros((ny, nx), dtype=complex)
    coef[ky, kx] = 1.0
    return np.fft.ifft2(coef, norm="ortho").reshape(-1)


def generate_fourier_lti(sys: FourierLtiSystem):
    """Generate the snapshot pair and ground truth of a planted system.

    Coefficients evolve as init_amps * exp(mu t); the spatial field is the
    unitary inverse DFT of the coefficient grid with conjugate-symmetric
    placement, so every snapshot is real.

    Returns
    -------
    (SnapshotPair, FourierTruth)
    """
    nx, ny = sys.grid
    n = nx * ny
    t = np.arange(sys.m + 1) * sys.dt
    values = sys.init_amps[:, None] * np.exp(sys.mu[:, None] * t[None, :])

    snaps = np.empty((n, sys.m + 1))
    coef = np.zeros((ny, nx), dtype=complex)
    for k in range(sys.m + 1):
        coef[:] = 0.0
        for j, (kx, ky) in enumerate(sys.wavenumbers):
            coef[ky, kx] = values[j, k]
            coef[(-ky) % ny, (-kx) % nx] = np.conj(values[j, k])
        snaps[:, k] = np.fft.ifft2(coef, norm="ortho").real.reshape(-1)

    lambdas = np.empty(2 * sys.K, dtype=complex)
    atoms = np.empty((n, 2 * sys.K), dtype=complex)
    for j, (kx, ky) in enumerate(sys.wavenumbers):
        lambdas[2 * j] = np.exp(sys.mu[j] * sys.dt)
        lambdas[2 * j + 1] = np.exp(np.conj(sys.mu[j]) * sys.dt)
        atoms[:, 2 * j] = _atom(nx, ny, kx, ky)
        atoms[:, 2 * j + 1] = _atom(nx, ny, (-kx) % nx, (-ky) % ny)

    pair = SnapshotPair(X=snaps[:, :-1], Xp=snaps[:, 1:], dt=sys.dt, grid=sys.grid)
    truth = FourierTruth(
        lambdas=lambdas, atoms=atoms, mu=sys.mu.copy(), wavenumbers=sys.wavenumbers
    )
    return pair, truth


def add_fourier_noise(data: SnapshotPair, rms_fraction, seed=None) -> SnapshotPair:
    """Add white Fourier-domain noise outside the active coefficients.

    Active bins are detected from the mean spectral power of the data and
    left untouched; every other bin receives complex white noise, scaled
    per snapshot so the added field has rms_fraction times the snapshot
    norm.  Realness is preserved because the noise is synthesized from a
    real white field.  When X' is the one-step shift of X, the overlapping
    snapshots are noised coherently.
    """
    if not (0.0 <= rms_fraction <= 1.0):
        raise DimensionError("rms_fraction must lie in [0, 1]")
    if rms_fraction == 0.0:
        return data
    if data.grid is None:
        raise DimensionError("need grid metadata to synthesize spatial noise")
    nx, ny = data.grid
    rng = np.random.default_rng(seed)

    shifted = data.m > 1 and np.array_equal(data.X[:, 1:], data.Xp[:, :-1])
    if shifted:
        snaps = np.column_stack([data.X, data.Xp[:, -1]])
    else:
        snaps = np.column_stack([data.X, data.Xp])

    power = np.zeros((ny, nx))
    for k in range(snaps.shape[1]):
        power += np.abs(np.fft.fft2(snaps[:, k].reshape(ny, nx), norm="ortho")) ** 2
    power /= snaps.shape[1]
    active = power > 1e-8 * power.max()

    noised = np.empty_like(snaps)
    for k in range(snaps.shape[1]):
        field = rng.standard_normal((ny, nx))
        spectrum = np.fft.fft2(field, norm="ortho")
        spectrum[active] = 0.0
        level = np.linalg.norm(spectrum)
        target = rms_fraction * np.linalg.norm(snaps[:, k])
        if level > 0:
            spectrum *= target / level
        noise = np.fft.ifft2(spectrum, norm="ortho").real.reshape(-1)
        noised[:, k] = snaps[:, k] + noise

    if shifted:
        return SnapshotPair(
            X=noised[:, :-1], Xp=noised[:, 1:], dt=data.dt, grid=data.grid
        )
    m = data.m
    return SnapshotPair(
        X=noised[:, :m], Xp=noised[:, m:], dt=data.dt, grid=data.grid
    )


@dataclass(frozen=True)
class DoubleGyreParams:
    """Parameters of the periodically perturbed double gyre flow."""

    A: float = 0.1
    omega: float = 2.0 * np.pi / 10.0
    eps: float = 0.25
    grid: tuple = (512, 256)
    t0: float = 0.0
    t1: float = 15.0
    dt: float = 0.1

    def __post_init__(self):
        nx, ny = self.grid
        if nx < 2 or ny < 2:
            raise DimensionError("grid must be at least 2x2")
        if self.dt <= 0:
            raise DimensionError("dt must be positive")


def double_gyre_field(params: DoubleGyreParams, t):
    """Velocity components and vorticity of the flow at time t.

    Arrays have shape (ny, nx) over the domain [0, 2] x [0, 1] sampled at
    the grid points, x varying along columns.  Vorticity is dv/dx - du/dy
    by second-order central differences (one-sided at the boundary).
    """
    nx, ny = params.grid
    x = np.linspace(0.0, 2.0, nx)
    y = np.linspace(0.0, 1.0, ny)
    XX, YY = np.meshgrid(x, y)
    st = np.sin(params.omega * t)
    f = params.eps * st * XX**2 + XX - 2.0 * params.eps * st * XX
    dfdx = 2.0 * params.eps * st * XX + 1.0 - 2.0 * params.eps * st
    u = -np.pi * params.A * np.sin(np.pi * f) * np.cos(np.pi * YY)
    v = np.pi * params.A * np.cos(np.pi * f) * np.sin(np.pi * YY) * dfdx
    vorticity = np.gradient(v, x, axis=1) - np.gradient(u, y, axis=0)
    return u, v, vorticity


def generate_gyre_snapshots(params: DoubleGyreParams, observable="vorticity"):
    """Stack flow snapshots over [t0, t1] into a shift pair.

    The default observable is the vorticity field; "velocity" stacks u
    over v into 2n rows instead (grid metadata is dropped in that case
    since rows no longer form a single field).
    """
    if observable not in ("vorticity", "velocity"):
        raise DimensionError(f"unknown observable {observable!r}")
    nx, ny = params.grid
    steps = int(round((params.t1 - params.t0) / params.dt))
    times = params.t0 + params.dt * np.arange(steps + 1)
    cols = []
    for t in times:
        u, v, vort = double_gyre_field(params, t)
        if observable == "vorticity":
            cols.append(vort.reshape(-1))
        else:
            cols.append(np.concatenate([u.reshape(-1), v.reshape(-1)]))
    snaps = np.column_stack(cols)
    grid = params.grid if observable == "vorticity" else None
    return SnapshotPair(X=snaps[:, :-1], Xp=snaps[:, 1:], dt=params.dt, grid=grid)
