"""Spectra of tridiagonal k-Toeplitz operators and their finite open and periodic truncations."""

from __future__ import annotations

from .errors import (
    ConfluentModeError,
    ConsistencyError,
    ConvergenceError,
    DegenerateEquationError,
    ExteriorPointError,
    GBZError,
    OnBoundaryError,
    OverflowGuardError,
    ReciprocalDegenerateError,
)
from .gbz import (
    GeneralisedBrillouinZone,
    SpectralClassification,
    SpectralTag,
    classify,
    locate_quasiperiodicities,
    toeplitz_spectrum_sample,
    winding_number,
)
from .lattice import (
    BoundaryKind,
    FiniteLattice,
    circulant_matrix,
    collapsed_symbol,
    symmetrizer,
    toeplitz_matrix,
)
from .limits import (
    PseudospectrumGrid,
    convergence_study,
    finite_obc_spectrum,
    laurent_spectrum_sample,
    obc_limit_set,
    pbc_limit_sample,
    pbc_spectrum,
    pseudospectrum_grid,
)
from .linalg import EigenResult, eig_dense, smallest_singular_value, solve_quadratic
from .modes import (
    decay_rate,
    eigenspace_dimension_check,
    quasiperiodic_extension,
    symbolic_eigenvector,
)
from .sets import SpectralSet, Table, directed_distance, hausdorff_distance, matching_distance
from .symbol import (
    EllipseGeometry,
    Membership,
    Quasiperiodicity,
    SymbolCoefficients,
    ellipse_geometry,
    ellipse_membership,
    evaluate,
    g_polynomial,
    is_collapsed,
    prototype_symbol,
    psi,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
