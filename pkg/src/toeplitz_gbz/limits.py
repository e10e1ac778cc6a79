"""The open, periodic and pseudospectral limits of finite lattices, and convergence studies."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .gbz import alpha_grid, sample_on_levels
from .lattice import circulant_matrix, collapsed_symbol, toeplitz_matrix
from .linalg import eig_dense, smallest_singular_values
from .sets import (
    HausdorffResult,
    SpectralSet,
    Table,
    branch_steps,
    directed_distance,
    hausdorff_distance,
    matching_distance,
)
from .symbol import SymbolCoefficients, ellipse_geometry, symbol_spectra

__all__ = [
    "HausdorffResult",
    "PseudospectrumGrid",
    "SpectralSet",
    "convergence_study",
    "curve_sampling_bound",
    "finite_obc_spectrum",
    "hausdorff_distance",
    "laurent_spectrum_sample",
    "matching_distance",
    "obc_limit_set",
    "obc_phase",
    "pbc_limit_sample",
    "pbc_spectrum",
    "pseudospectrum_grid",
]

DEFAULT_LIMIT_SAMPLES = 4001
COLLAPSE_THRESHOLD = 20
THREADS_ENV = "GBZ_NUM_THREADS"


def _level_set(s: SymbolCoefficients, n_alpha: int, beta: float, source: str) -> SpectralSet:
    pts, params = sample_on_levels(s, alpha_grid(n_alpha), np.array([beta]))
    return SpectralSet(pts, source, params / s.spatial_period, ("alpha", "beta"))


def obc_limit_set(s: SymbolCoefficients, n_alpha: int = DEFAULT_LIMIT_SAMPLES) -> SpectralSet:
    """Sample of the open-boundary limit: symbol spectra on the level ``beta = Delta/2``."""
    if n_alpha < 16:
        raise ValueError("n_alpha must be >= 16")
    delta = ellipse_geometry(s).delta
    return _level_set(s, n_alpha, delta / 2, "OBCLimit")


def laurent_spectrum_sample(s: SymbolCoefficients, n_alpha: int = DEFAULT_LIMIT_SAMPLES) -> SpectralSet:
    """Sample of the Laurent-operator spectrum (real quasimomenta)."""
    if n_alpha < 16:
        raise ValueError("n_alpha must be >= 16")
    return _level_set(s, n_alpha, 0.0, "LaurentSample")


def obc_phase(s: SymbolCoefficients) -> float:
    """Phase ``phi`` with ``D^{-1} a~(e^{-i alpha}) D = a(e^{-i(alpha - phi + i Delta/2)})``.

    Here ``a~`` is the collapsed symbol and ``D`` the one-cell symmetrizer.
    ``phi`` equals ``zeta/2`` modulo ``pi`` and vanishes for symbols whose
    coefficient ratios are positive.
    """
    prods = np.array(s.upper) * np.array(s.lower)
    return float(np.angle(np.prod(np.sqrt(prods)) / s.prod_lower))


def pbc_spectrum(s: SymbolCoefficients, m: int) -> SpectralSet:
    """Spectrum of the k-circulant ring of ``m`` cells as the union of ``sigma(a(w^j))``."""
    if m < 2:
        raise ValueError("periodic lattice needs m >= 2")
    j = np.arange(m)
    pts = symbol_spectra(s, np.exp(2j * np.pi * j / m))
    params = np.column_stack([np.full(pts.size, m), np.repeat(j, s.k)])
    return SpectralSet(pts.ravel(), "FinitePBC", params, ("m", "j"))


def pbc_limit_sample(s: SymbolCoefficients, n_alpha: int = DEFAULT_LIMIT_SAMPLES) -> SpectralSet:
    """Sample of the periodic limit: the block union at the ``n_alpha``-th roots of unity.

    As ``m`` grows the ring spectra fill out the Laurent spectrum, so this is
    the same curve as :func:`laurent_spectrum_sample` on a shifted grid.
    """
    if n_alpha < 16:
        raise ValueError("n_alpha must be >= 16")
    j = np.arange(n_alpha)
    theta = 2 * np.pi * j / n_alpha
    pts = symbol_spectra(s, np.exp(1j * theta))
    params = np.column_stack([np.repeat(-theta, s.k), np.zeros(pts.size)])
    return SpectralSet(pts.ravel(), "PBCLimit", params / s.spatial_period, ("alpha", "beta"))


def finite_obc_spectrum(s: SymbolCoefficients, m: int, via_collapse: bool | None = None) -> SpectralSet:
    """Eigenvalues of the open chain ``T_{mk}(a)``.

    With ``via_collapse`` (the default once ``m*k > 20``) the eigenvalues are
    those of the similar symmetric chain built from the collapsed symbol,
    which avoids the extreme non-normality of the original matrix.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if via_collapse is None:
        via_collapse = m * s.k > COLLAPSE_THRESHOLD and not s.reciprocal_degenerate
    source = collapsed_symbol(s) if via_collapse else s
    eigs = eig_dense(toeplitz_matrix(source, m).matrix).eigenvalues
    params = np.column_stack([np.full(eigs.size, m), np.full(eigs.size, float(via_collapse))])
    return SpectralSet(eigs, "FiniteOBC", params, ("m", "via_collapse"))


def curve_sampling_bound(s: SymbolCoefficients, n_alpha: int, beta: float) -> float:
    """Largest step between consecutive samples of a symbol-spectrum level.

    Every point of the continuous level curve lies within one step of a
    sample (for sampling fine enough that arcs are close to their chords),
    so directed distances to the sample overestimate the true ones by
    at most this much.
    """
    spectra = symbol_spectra(s, np.exp(beta - 1j * alpha_grid(n_alpha)))
    return float(np.max(branch_steps(spectra)))


@dataclass(frozen=True)
class PseudospectrumGrid:
    rectangle: tuple[float, float, float, float]
    resolution: tuple[int, int]
    values: np.ndarray
    m: int

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.rectangle[0], self.rectangle[1], self.resolution[0])

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.rectangle[2], self.rectangle[3], self.resolution[1])

    def sublevel(self, eps: float) -> np.ndarray:
        """Mask of grid nodes in the ``eps``-pseudospectrum."""
        return self.values <= eps


def _thread_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def pseudospectrum_grid(
    s: SymbolCoefficients,
    m: int,
    rectangle: tuple[float, float, float, float],
    resolution: tuple[int, int],
    workers: int | None = None,
) -> PseudospectrumGrid:
    """``sigma_min(T_{mk}(a) - lam)`` on a rectangular grid, ``values[i, j]`` at ``(x_i, y_j)``."""
    x0, x1, y0, y1 = map(float, rectangle)
    nx, ny = map(int, resolution)
    if nx < 16 or ny < 16:
        raise ValueError("resolution must be at least 16x16")
    if not (x1 > x0 and y1 > y0):
        raise ValueError("rectangle must have x0 < x1 and y0 < y1")
    T = toeplitz_matrix(s, m).matrix
    n = T.shape[0]
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    eye = np.eye(n)

    def column(i: int) -> np.ndarray:
        lam = xs[i] + 1j * ys
        try:
            return smallest_singular_values(T[None, :, :] - lam[:, None, None] * eye)
        except ConvergenceError as exc:
            raise ConvergenceError(f"sigma_min failed on grid column x={xs[i]:.6g}: {exc}") from exc

    nthreads = _thread_count(workers)
    if nthreads == 1:
        cols = [column(i) for i in range(nx)]
    else:
        with ThreadPoolExecutor(nthreads) as pool:
            cols = list(pool.map(column, range(nx)))
    return PseudospectrumGrid((x0, x1, y0, y1), (nx, ny), np.vstack(cols), m)


CONVERGENCE_COLUMNS = [
    "m",
    "d_obc_directed",
    "d_obc_sampling_bound",
    "d_pbc",
    "d_pbc_laurent",
    "d_pbc_sampling_bound",
]


def convergence_study(
    s: SymbolCoefficients,
    m_list,
    targets=("OBC", "PBC"),
    n_alpha: int = DEFAULT_LIMIT_SAMPLES,
) -> Table:
    """Distances from finite spectra to their limits for each ``m``.

    ``d_obc_directed`` is the directed distance from the (collapsed) open-chain
    spectrum to the sampled open limit.  ``d_pbc`` compares the dense ring
    eigenvalues with the exact block union at the same ``m`` and
    ``d_pbc_laurent`` measures the block union against the sampled Laurent
    spectrum.  Sampling bounds are reported next to each sampled distance.
    """
    m_list = [int(m) for m in m_list]
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ValueError("m_list must be strictly increasing")
    targets = {t.upper() for t in targets}
    unknown = targets - {"OBC", "PBC"}
    if unknown:
        raise ValueError(f"unknown convergence targets {sorted(unknown)}")
    delta = ellipse_geometry(s).delta
    nan = math.nan
    if "OBC" in targets:
        obc_limit = obc_limit_set(s, n_alpha)
        obc_bound = curve_sampling_bound(s, n_alpha, delta / 2)
    if "PBC" in targets:
        laurent = laurent_spectrum_sample(s, n_alpha)
        pbc_bound = curve_sampling_bound(s, n_alpha, 0.0)
    rows = []
    for m in m_list:
        d_obc = b_obc = d_pbc = d_lau = b_pbc = nan
        if "OBC" in targets:
            finite = finite_obc_spectrum(s, m, via_collapse=not s.reciprocal_degenerate)
            d_obc = directed_distance(finite, obc_limit)
            b_obc = obc_bound
        if "PBC" in targets and m >= 2:
            blocks = pbc_spectrum(s, m)
            dense = eig_dense(circulant_matrix(s, m).matrix).eigenvalues
            d_pbc = directed_distance(dense, blocks)
            d_lau = directed_distance(blocks, laurent)
            b_pbc = pbc_bound
        rows.append((m, d_obc, b_obc, d_pbc, d_lau, b_pbc))
    return Table(list(CONVERGENCE_COLUMNS), rows)
