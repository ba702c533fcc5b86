"""Modal decomposition of snapshot data, with compressed and subsampled
variants plus sparse mode recovery."""

from .dmd import (
    DmdResult,
    PipelinePath,
    SnapshotPair,
    advance_modes,
    compressed_dmd,
    exact_dmd,
    mode_alignment,
    pair_eigenvalues,
    project_dmd_result,
)
from .errors import (
    BadDimensions,
    BadWavenumber,
    ConvergenceError,
    CsdmdError,
    DimensionError,
    NoProgress,
    RankCollapse,
    RankZero,
    ZeroInput,
    ZeroMatrix,
)
from .linalg import EconSvd, eig_dense, pinv_from_svd, svd_econ
from .pipelines import (
    ExperimentConfig,
    ExperimentReport,
    match_eigen,
    run_path,
    time_dmd_stage,
    verify_invariance_suite,
)
from .recovery import (
    DenseOperator,
    RecoveredMode,
    RecoveryConfig,
    SensingOperator,
    cosamp,
    l1_reconstruct,
    recover_modes,
)
from .sensing import (
    MeasurementMatrix,
    SparseBasis,
    apply_basis,
    apply_measurement,
    make_measurement,
    mutual_coherence,
    recommended_measurements,
)
from .systems import (
    DoubleGyreParams,
    FourierLtiSystem,
    FourierTruth,
    add_fourier_noise,
    double_gyre_field,
    generate_fourier_lti,
    generate_gyre_snapshots,
    make_fourier_lti,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
