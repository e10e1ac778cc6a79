"""Tagged point sets and set distances used to compare spectra."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial import cKDTree

SOURCES = (
    "FiniteOBC",
    "FinitePBC",
    "OBCLimit",
    "PBCLimit",
    "LaurentSample",
    "ToeplitzSample",
    "PseudoGrid",
)


@dataclass(frozen=True)
class SpectralSet:
    """Finite set of complex spectral points.

    Every point carries the set's ``source`` tag and two numeric parameters
    (``m`` and a block index, ``(alpha, beta)``, ``epsilon``...; NaN when unused).
    """

    points: np.ndarray
    source: str
    params: np.ndarray = field(default=None)
    param_names: tuple[str, str] = ("", "")

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if not np.all(np.isfinite(pts)):
            raise ValueError("spectral set contains non-finite points")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source tag {self.source!r}")
        if self.params is None:
            params = np.full((pts.size, 2), np.nan)
        else:
            params = np.asarray(self.params, dtype=float).reshape(pts.size, 2)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "params", params)

    def __len__(self) -> int:
        return self.points.size


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


def _as_points(S) -> np.ndarray:
    pts = S.points if isinstance(S, SpectralSet) else np.asarray(S, dtype=complex).ravel()
    if pts.size == 0:
        raise ValueError("distance to an empty set is undefined")
    return pts


def directed_distance(S1, S2) -> float:
    """``sup_{x in S1} min_{y in S2} |x - y|``."""
    a = _as_points(S1)
    b = _as_points(S2)
    tree = cKDTree(np.column_stack([b.real, b.imag]))
    d, _ = tree.query(np.column_stack([a.real, a.imag]))
    return float(np.max(d))


@dataclass(frozen=True)
class HausdorffResult:
    distance: float
    forward: float
    backward: float


def hausdorff_distance(S1, S2) -> HausdorffResult:
    """Hausdorff distance with both directed components (``S1 -> S2``, ``S2 -> S1``)."""
    fwd = directed_distance(S1, S2)
    bwd = directed_distance(S2, S1)
    return HausdorffResult(max(fwd, bwd), fwd, bwd)


def matching_distance(x: Sequence[complex], y: Sequence[complex]) -> float:
    """Bottleneck distance between two multisets of equal size.

    Smallest ``t`` such that a perfect matching pairs every point of ``x`` with
    a point of ``y`` no farther than ``t``.
    """
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.size != y.size:
        raise ValueError(f"multisets differ in size ({x.size} vs {y.size})")
    if x.size == 0:
        return 0.0
    D = np.abs(x[:, None] - y[None, :])
    cand = np.unique(D)
    # the answer is at least the largest nearest-neighbour distance either way
    lower = max(D.min(axis=1).max(), D.min(axis=0).max())
    cand = cand[cand >= lower]
    lo, hi = 0, cand.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        graph = csr_matrix(D <= cand[mid])
        match = maximum_bipartite_matching(graph, perm_type="column")
        if np.all(match >= 0):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def branch_steps(spectra: np.ndarray) -> np.ndarray:
    """Bottleneck distance between consecutive rows of a ``(n, k)`` eigenvalue array.

    Row ``n-1`` is compared with row ``0`` (closed curves).  Uses brute force
    over permutations, so ``k`` should be small.
    """
    A = spectra
    B = np.roll(spectra, -1, axis=0)
    k = A.shape[1]
    if k > 6:
        return np.array([matching_distance(a, b) for a, b in zip(A, B)])
    best = np.full(A.shape[0], np.inf)
    for perm in itertools.permutations(range(k)):
        d = np.max(np.abs(A - B[:, perm]), axis=1)
        best = np.minimum(best, d)
    return best
