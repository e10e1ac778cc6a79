"""Eigenmodes: quasiperiodic extensions, operator eigenvectors and decay rates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfluentModeError
from .gbz import locate_quasiperiodicities
from .lattice import collapsed_symbol, toeplitz_matrix
from .linalg import as_matrix, eig_dense, inverse_iteration
from .sets import Table
from .symbol import SymbolCoefficients, evaluate

CONFLUENT_RTOL = 1e-8
COLLINEARITY_TOL = 1e-8


@dataclass(frozen=True)
class QuasiperiodicMode:
    base: np.ndarray
    z: complex
    length: int
    samples: np.ndarray

    @property
    def k(self) -> int:
        return self.base.size


def quasiperiodic_extension(base, z: complex, m: int) -> QuasiperiodicMode:
    """Blocks ``z**-j * base`` for ``j = 0..m-1``."""
    base = np.asarray(base, dtype=complex).ravel()
    z = complex(z)
    if z == 0:
        raise ValueError("quasiperiodic extension needs z != 0")
    if m < 1:
        raise ValueError(f"need m >= 1 cells, got {m}")
    factors = z ** (-np.arange(m, dtype=float))
    samples = (factors[:, None] * base[None, :]).ravel()
    return QuasiperiodicMode(base, z, m, samples)


@dataclass(frozen=True)
class SymbolicEigenvector:
    lam: complex
    modes: tuple[QuasiperiodicMode, QuasiperiodicMode]
    gammas: tuple[complex, complex]
    vector: np.ndarray
    residual: float


def _null_vector(A: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(A)
    return vh[-1].conj()


def _first_row(s: SymbolCoefficients, u: np.ndarray, lam: complex, corner: complex) -> complex:
    return (s.diag[0] + corner - lam) * u[0] + s.upper[0] * u[1]


def relative_residual(T: np.ndarray, lam: complex, u: np.ndarray, rows=slice(None)) -> float:
    """``max |((T - lam) u)_i| / (||T - lam||_inf * max |u|)`` over the selected rows."""
    M = T - lam * np.eye(T.shape[0])
    r = (M @ u)[rows]
    scale = np.max(np.abs(M).sum(axis=1)) * np.max(np.abs(u))
    return float(np.max(np.abs(r)) / scale) if scale > 0 else 0.0


def symbolic_eigenvector(
    s: SymbolCoefficients, lam: complex, m_render: int = 40, corner: complex = 0.0
) -> SymbolicEigenvector:
    """Eigenvector of the semi-infinite operator combined from two quasiperiodic modes.

    Both extensions solve every row except the first; the coefficients are
    chosen to cancel the first-row residual.  ``corner`` perturbs the top-left
    entry of the operator, which only changes the coefficients.  The rendered
    vector has ``m_render`` cells; its residual is measured on all rows except
    the last, which couples to the truncated tail.

    Raises:
        ConfluentModeError: the two quasiperiodicities coincide.
    """
    if m_render < 2:
        raise ValueError("m_render must be >= 2")
    lam = complex(lam)
    q1, q2 = locate_quasiperiodicities(s, lam)
    z1, z2 = q1.z, q2.z
    if abs(z1 - z2) <= CONFLUENT_RTOL * max(abs(z1), abs(z2)):
        raise ConfluentModeError(
            f"confluent mode: the quasiperiodicities of lambda={lam} coincide (z={z1})"
        )
    eye = np.eye(s.k)
    modes = tuple(
        quasiperiodic_extension(_null_vector(evaluate(s, z) - lam * eye), z, m_render)
        for z in (z1, z2)
    )
    r1, r2 = (_first_row(s, md.samples, lam, corner) for md in modes)
    g = np.array([r2, -r1])
    nrm = np.linalg.norm(g)
    gammas = (1.0 + 0j, 0j) if nrm == 0 else (complex(g[0] / nrm), complex(g[1] / nrm))
    u = gammas[0] * modes[0].samples + gammas[1] * modes[1].samples
    T = toeplitz_matrix(s, m_render).matrix
    T[0, 0] += corner
    res = relative_residual(T, lam, u, slice(0, -1))
    return SymbolicEigenvector(lam, modes, gammas, u, res)


@dataclass(frozen=True)
class DecayFit:
    beta: float
    residual: float
    cells: tuple[int, int]


def decay_rate(u, k: int) -> DecayFit:
    """Per-cell exponential decay rate of ``u``.

    Least-squares slope of ``log(max |u| over the cell)`` against the cell
    index, fitted on the middle half of the cells.  A decaying vector gives a
    positive rate.
    """
    u = np.asarray(u, dtype=complex).ravel()
    if k < 1 or u.size % k:
        raise ValueError(f"vector length {u.size} is not a multiple of k={k}")
    m = u.size // k
    if m < 4:
        raise ValueError("decay fit needs at least 4 cells")
    mags = np.abs(u).reshape(m, k).max(axis=1)
    lo, hi = m // 4, m - m // 4
    window = mags[lo:hi]
    if np.any(window == 0):
        raise ValueError("zero cell inside the fitting window")
    cells = np.arange(lo, hi, dtype=float)
    y = np.log(window)
    slope, intercept = np.polyfit(cells, y, 1)
    fit_res = float(np.sqrt(np.mean((y - (slope * cells + intercept)) ** 2)))
    return DecayFit(float(-slope), fit_res, (lo, hi))


def finite_obc_modes(s: SymbolCoefficients, m: int) -> list[tuple[complex, np.ndarray]]:
    """Eigenpairs of the open chain for decay studies.

    Eigenvalues come from the collapsed chain; each eigenvector is obtained by
    inverse iteration on ``T_{mk}(a)`` itself, which stays well conditioned
    for the chain lengths used here (``m <= 40``).
    """
    T = toeplitz_matrix(s, m).matrix
    lams = eig_dense(toeplitz_matrix(collapsed_symbol(s), m).matrix).eigenvalues
    return [(complex(lam), inverse_iteration(T, lam)) for lam in lams]


def decay_table(s: SymbolCoefficients, m: int) -> Table:
    rows = []
    for lam, u in finite_obc_modes(s, m):
        fit = decay_rate(u, s.k)
        rows.append((lam.real, lam.imag, fit.beta, fit.residual))
    return Table(["re", "im", "beta_hat", "fit_residual"], rows)


def _require_tridiagonal(M: np.ndarray) -> None:
    n = M.shape[0]
    off = np.abs(np.triu(M, 2)).max(initial=0.0) + np.abs(np.tril(M, -2)).max(initial=0.0)
    if off != 0:
        raise ValueError("matrix is not tridiagonal")
    if n > 1 and (np.any(np.diagonal(M, 1) == 0) or np.any(np.diagonal(M, -1) == 0)):
        raise ValueError("tridiagonal matrix has a zero off-diagonal entry")


def recursion_eigenvector(M, lam: complex) -> np.ndarray:
    """Eigenvector candidate from ``u_1 = 1`` and the three-term recursion of rows ``1..n-1``."""
    M = as_matrix(M)
    _require_tridiagonal(M)
    n = M.shape[0]
    u = np.zeros(n, dtype=complex)
    u[0] = 1.0
    if n > 1:
        u[1] = -(M[0, 0] - lam) * u[0] / M[0, 1]
    for i in range(1, n - 1):
        u[i + 1] = -(M[i, i - 1] * u[i - 1] + (M[i, i] - lam) * u[i]) / M[i, i + 1]
    return u


def eigenspace_dimension_check(M, lam: complex) -> bool:
    """Check that the computed eigenvector for ``lam`` is a multiple of the recursion solution."""
    M = as_matrix(M)
    _require_tridiagonal(M)
    smin = np.linalg.svd(M - lam * np.eye(M.shape[0]), compute_uv=False)[-1]
    if smin > 1e-8 * max(1.0, np.linalg.norm(M)):
        raise ValueError(f"lambda={lam} is not an eigenvalue (sigma_min={smin:.2e})")
    u = recursion_eigenvector(M, lam)
    v = inverse_iteration(M, lam)
    col = abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    return bool(col > 1 - COLLINEARITY_TOL)
