"""Exception types shared across the package."""


class CsdmdError(Exception):
    """Base class for all package-specific failures."""


class DimensionError(CsdmdError):
    """Shapes of the operands do not agree, or a limit was exceeded."""


class BadDimensions(CsdmdError):
    """A size parameter is out of its allowed range."""


class ZeroMatrix(CsdmdError):
    """An all-zero matrix was passed where a nonzero one is required."""


class RankZero(CsdmdError):
    """Every singular value fell below the truncation threshold."""


class RankCollapse(CsdmdError):
    """Measured data lost rank relative to the full data.

    Raised by the compressed pipeline when the measurement operator
    annihilates directions that carry signal, which makes eigenvalue
    recovery unreliable.
    """


class ConvergenceError(CsdmdError):
    """An iterative solver exhausted its budget without converging."""


class BadWavenumber(CsdmdError):
    """A planted wavenumber index lies outside the grid."""


class NoProgress(CsdmdError):
    """Sparse recovery halted while the residual was still large."""


class ZeroInput(CsdmdError):
    """Sparse recovery was asked to explain a numerically zero vector."""
