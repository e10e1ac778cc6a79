"""Generalised Brillouin zone: classification, winding and quasiperiodicities.

A point ``lam`` belongs to the Toeplitz-operator spectrum (up to finitely many
exceptional points, which are not computed) exactly when ``-g(lam)`` lies in
the filled ellipse ``psi(S^1)``.  Such a point has two quasimomenta
``alpha + i beta`` and ``(-zeta - alpha) + i(Delta - beta)``, the two roots of
the quadratic ``psi(z) + g(lam) = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ConvergenceError, ExteriorPointError, OnBoundaryError
from .linalg import solve_quadratic
from .sets import SpectralSet
from .symbol import (
    EllipseGeometry,
    Membership,
    Quasiperiodicity,
    SymbolCoefficients,
    angle_distance,
    ellipse_geometry,
    ellipse_membership,
    evaluate,
    evaluate_many,
    g_polynomial,
    reduce_angle,
    symbol_spectra,
)

MIN_WINDING_POINTS = 64
MAX_WINDING_POINTS = 2 ** 22
VIETA_TOL = 1e-9
EIGEN_MEMBERSHIP_TOL = 1e-8


@dataclass(frozen=True)
class GeneralisedBrillouinZone:
    alpha_range: tuple[float, float]
    beta_range: tuple[float, float]
    source: EllipseGeometry

    @classmethod
    def from_symbol(cls, s: SymbolCoefficients) -> "GeneralisedBrillouinZone":
        e = ellipse_geometry(s)
        L = s.spatial_period
        lo, hi = sorted((0.0, e.delta / L))
        return cls((-math.pi / L, math.pi / L), (lo, hi), e)

    @property
    def is_classical(self) -> bool:
        return self.source.degenerate

    def contains(self, q: Quasiperiodicity, tol: float = 1e-12) -> bool:
        a0, a1 = self.alpha_range
        b0, b1 = self.beta_range
        return a0 - tol <= q.alpha < a1 + tol and b0 - tol <= q.beta <= b1 + tol


class SpectralTag(enum.Enum):
    DET_BOUNDARY = "DetBoundary"
    WINDING_INTERIOR = "WindingInterior"
    EXTERIOR = "Exterior"


@dataclass(frozen=True)
class SpectralClassification:
    tag: SpectralTag
    winding: int


def _det_curve(s: SymbolCoefficients, lam: complex, n: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n
    mats = evaluate_many(s, np.exp(1j * theta)) - lam * np.eye(s.k)
    return np.linalg.det(mats)


def winding_number(s: SymbolCoefficients, lam: complex, n_points: int = 256) -> int:
    """Winding number of ``theta -> det(a(e^{i theta}) - lam)`` around zero.

    Phases are accumulated step by step; the sampling is doubled until every
    step is below ``pi/2``.

    Raises:
        OnBoundaryError: ``lam`` lies on the determinant curve.
        ConvergenceError: refinement exceeded ``MAX_WINDING_POINTS`` samples or the
            accumulated phase is not close to a multiple of ``2 pi``.
    """
    if n_points < MIN_WINDING_POINTS:
        raise ValueError(f"n_points must be >= {MIN_WINDING_POINTS}")
    lam = complex(lam)
    if not s.reciprocal_degenerate:
        e = ellipse_geometry(s)
        if ellipse_membership(e, -g_polynomial(s, lam)) is Membership.BOUNDARY:
            raise OnBoundaryError(f"on-boundary: lambda={lam} lies on the determinant curve")
    n = n_points
    while n <= MAX_WINDING_POINTS:
        f = _det_curve(s, lam, n)
        if np.any(f == 0):
            raise OnBoundaryError(f"on-boundary: lambda={lam} lies on the determinant curve")
        steps = np.angle(np.roll(f, -1) / f)
        if np.max(np.abs(steps)) < np.pi / 2:
            w = float(np.sum(steps)) / (2 * np.pi)
            r = round(w)
            if abs(w - r) >= 0.01:
                raise ConvergenceError(f"winding residue {abs(w - r):.3g} for lambda={lam}")
            return int(r)
        n *= 2
    raise ConvergenceError(
        f"winding refinement exceeded {MAX_WINDING_POINTS} samples for lambda={lam}"
    )


def classify(s: SymbolCoefficients, lam: complex) -> SpectralClassification:
    """Place ``lam`` in the determinant boundary, the winding region or outside."""
    e = ellipse_geometry(s)
    where = ellipse_membership(e, -g_polynomial(s, lam))
    if where is Membership.BOUNDARY:
        return SpectralClassification(SpectralTag.DET_BOUNDARY, 0)
    if where is Membership.EXTERIOR:
        return SpectralClassification(SpectralTag.EXTERIOR, 0)
    w = winding_number(s, lam)
    if w == 0:
        raise ConsistencyError(
            f"internal-consistency failure: -g({lam}) is inside the ellipse but the winding number is 0"
        )
    return SpectralClassification(SpectralTag.WINDING_INTERIOR, w)


def quadratic_roots(s: SymbolCoefficients, lam: complex) -> tuple[complex, complex]:
    """Roots of ``psi(z) + g(lam) = 0`` written as ``A z^2 + g z + B = 0``."""
    sign = -1.0 if s.k % 2 == 0 else 1.0
    return solve_quadratic(sign * s.prod_lower, g_polynomial(s, lam), sign * s.prod_upper)


def _residual_in_symbol(s: SymbolCoefficients, z: complex, lam: complex) -> float:
    A = evaluate(s, z)
    smin = np.linalg.svd(A - lam * np.eye(s.k), compute_uv=False)[-1]
    return float(smin / max(1.0, np.linalg.norm(A)))


def locate_quasiperiodicities(
    s: SymbolCoefficients, lam: complex
) -> tuple[Quasiperiodicity, Quasiperiodicity]:
    """The two quasimomenta of ``lam``, the one with smaller decay first.

    Raises:
        ExteriorPointError: ``lam`` is not in the operator spectrum.
        ConsistencyError: the two roots violate the conjugacy relations.
    """
    lam = complex(lam)
    e = ellipse_geometry(s)
    if ellipse_membership(e, -g_polynomial(s, lam)) is Membership.EXTERIOR:
        raise ExteriorPointError(f"lambda={lam} is exterior; it has no quasiperiodicities")
    roots = quadratic_roots(s, lam)
    betas = [math.log(abs(z)) for z in roots]
    alphas = [reduce_angle(-np.angle(z)) for z in roots]
    direction = 1.0 if e.delta >= 0 else -1.0
    order = sorted(range(2), key=lambda i: (direction * betas[i], alphas[i]))
    (b1, b2), (a1, a2) = [betas[i] for i in order], [alphas[i] for i in order]

    if abs(b1 + b2 - e.delta) > VIETA_TOL * max(1.0, abs(e.delta)):
        raise ConsistencyError(f"beta sum {b1 + b2} differs from Delta={e.delta}")
    if angle_distance(a1 + a2, -e.zeta) > VIETA_TOL:
        raise ConsistencyError(f"alpha sum {a1 + a2} is not -zeta={-e.zeta} mod 2pi")
    lo, hi = sorted((0.0, e.delta))
    for b in (b1, b2):
        if not lo - VIETA_TOL <= b <= hi + VIETA_TOL:
            raise ConsistencyError(f"beta={b} outside the zone [{lo}, {hi}]")
    for z in roots:
        res = _residual_in_symbol(s, z, lam)
        if res > EIGEN_MEMBERSHIP_TOL:
            raise ConsistencyError(f"lambda={lam} is not an eigenvalue of a(z) for z={z} ({res:.2e})")

    L = s.spatial_period
    return (
        Quasiperiodicity(a1 / L, b1 / L, L),
        Quasiperiodicity(a2 / L, b2 / L, L),
    )


def alpha_grid(n_alpha: int) -> np.ndarray:
    """Uniform grid on ``[-pi, pi)`` (per-cell units)."""
    return -np.pi + 2 * np.pi * np.arange(n_alpha) / n_alpha


def beta_grid(delta: float, n_beta: int) -> np.ndarray:
    """``n_beta`` levels from 0 to ``delta/2`` inclusive (just 0 when ``n_beta == 1``)."""
    if n_beta == 1:
        return np.zeros(1)
    return np.linspace(0.0, delta / 2, n_beta)


def sample_on_levels(s: SymbolCoefficients, alphas: np.ndarray, betas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symbol spectra on the (beta, alpha) grid; returns points and per-point (alpha, beta)."""
    A, B = np.meshgrid(alphas, betas)
    zs = np.exp(B.ravel() - 1j * A.ravel())
    pts = symbol_spectra(s, zs)
    k = s.k
    params = np.column_stack([np.repeat(A.ravel(), k), np.repeat(B.ravel(), k)])
    return pts.ravel(), params


def toeplitz_spectrum_sample(
    s: SymbolCoefficients, n_alpha: int, n_beta: int, full_zone: bool = False
) -> SpectralSet:
    """Union of ``sigma(a(e^{-i(alpha + i beta)}))`` over a grid of the zone.

    The beta grid covers ``[0, Delta/2]``; with ``full_zone`` the conjugate half
    ``[Delta/2, Delta]`` is added at the reflected quasimomenta.  The at most
    ``k - 1`` exceptional spectral points of the operator are not produced.
    """
    if n_alpha < 8 or n_beta < 1:
        raise ValueError("need n_alpha >= 8 and n_beta >= 1")
    e = ellipse_geometry(s)
    alphas = alpha_grid(n_alpha)
    betas = beta_grid(e.delta, n_beta)
    pts, params = sample_on_levels(s, alphas, betas)
    if full_zone:
        A, B = np.meshgrid(alphas, betas)
        ca = reduce_angle(-e.zeta - A.ravel())
        cb = e.delta - B.ravel()
        zs = np.exp(cb - 1j * ca)
        extra = symbol_spectra(s, zs).ravel()
        pts = np.concatenate([pts, extra])
        params = np.vstack([params, np.column_stack([np.repeat(ca, s.k), np.repeat(cb, s.k)])])
    L = s.spatial_period
    return SpectralSet(pts, "ToeplitzSample", params / L, ("alpha", "beta"))
