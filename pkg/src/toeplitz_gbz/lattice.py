"""Finite matrices assembled from a symbol: open chains, rings and the collapsed form."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import OverflowGuardError, ReciprocalDegenerateError
from .symbol import SymbolCoefficients, ellipse_geometry

# ln-scale beyond which cumulative symmetrizer products leave double range
OVERFLOW_LOG_LIMIT = 600.0


class BoundaryKind(enum.Enum):
    OPEN = "OpenBoundary"
    PERIODIC = "PeriodicBoundary"


@dataclass(frozen=True)
class FiniteLattice:
    m: int
    k: int
    matrix: np.ndarray
    kind: BoundaryKind

    @property
    def order(self) -> int:
        return self.m * self.k


def _band(s: SymbolCoefficients, m: int) -> np.ndarray:
    n = m * s.k
    idx = np.arange(n)
    T = np.zeros((n, n), dtype=complex)
    T[idx, idx] = np.resize(np.array(s.diag), n)
    T[idx[:-1], idx[1:]] = np.resize(np.array(s.upper), n)[:-1]
    T[idx[1:], idx[:-1]] = np.resize(np.array(s.lower), n)[:-1]
    return T


def toeplitz_matrix(s: SymbolCoefficients, m: int) -> FiniteLattice:
    """Open-boundary truncation ``T_{mk}(a)`` of order ``m*k``."""
    if m < 1:
        raise ValueError(f"need m >= 1 unit cells, got {m}")
    return FiniteLattice(m, s.k, _band(s, m), BoundaryKind.OPEN)


def circulant_matrix(s: SymbolCoefficients, m: int) -> FiniteLattice:
    """Periodic closure ``C_{mk}(a)``: the open chain plus corners ``c_k`` and ``b_k``."""
    if m < 2:
        raise ValueError("corner collision: circulant assembly needs m >= 2")
    C = _band(s, m)
    n = m * s.k
    C[0, n - 1] += s.lower[-1]
    C[n - 1, 0] += s.upper[-1]
    return FiniteLattice(m, s.k, C, BoundaryKind.PERIODIC)


def collapsed_symbol(s: SymbolCoefficients) -> SymbolCoefficients:
    """Symbol with both off-diagonals replaced by the principal ``sqrt(b_i c_i)``."""
    prods = np.array(s.upper) * np.array(s.lower)
    if np.any(prods == 0):
        raise ReciprocalDegenerateError("collapsed symbol needs b_i * c_i != 0")
    root = tuple(np.sqrt(prods))
    return SymbolCoefficients(s.diag, root, root, s.spatial_period)


def link_ratios(s: SymbolCoefficients) -> np.ndarray:
    """Per-link growth ``r_i = sqrt(b_i c_i) / c_i`` of the symmetrizing basis.

    ``r_i**2 == b_i / c_i``; the branch is tied to :func:`collapsed_symbol` so
    that conjugation by the symmetrizer produces exactly ``T_{mk}`` of the
    collapsed symbol.
    """
    c = np.array(s.lower)
    prods = np.array(s.upper) * c
    if np.any(prods == 0):
        raise ReciprocalDegenerateError("symmetrizer needs b_i * c_i != 0")
    return np.sqrt(prods) / c


def symmetrizer(s: SymbolCoefficients, m: int) -> np.ndarray:
    """Diagonal of ``D_{mk}`` with ``D T_{mk}(a) D^{-1} = T_{mk}(collapsed_symbol(s))``."""
    if m < 1:
        raise ValueError(f"need m >= 1 unit cells, got {m}")
    r = link_ratios(s)
    delta = ellipse_geometry(s).delta
    if abs(m * delta / 2) > OVERFLOW_LOG_LIMIT:
        raise OverflowGuardError(
            f"overflow guard: symmetrizer entries reach e^{abs(m * delta / 2):.0f}; "
            "assemble from collapsed_symbol instead"
        )
    n = m * s.k
    steps = np.resize(r, n - 1)
    return np.concatenate([[1.0 + 0j], np.cumprod(steps)])
