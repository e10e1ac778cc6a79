"""Tridiagonal k-Toeplitz symbols and the ellipse traced by their determinant.

A symbol is fixed by its period ``k`` and three coefficient lists: the main
diagonal ``a_1..a_k``, the upper diagonal ``b_1..b_k`` and the lower diagonal
``c_1..c_k``.  Its value at ``z`` is the k-by-k matrix

    [[a_1,      b_1,  ...,        c_k z],
     [c_1,      a_2,  b_2,  ...        ],
     ...
     [b_k / z,  ...,  c_{k-1},    a_k  ]]

and ``det(a(z) - lam) = psi(z) + g(lam)`` with ``psi`` a two-term Laurent
polynomial in ``z``.  The image of a circle under ``psi`` is an ellipse whose
geometry is summarised by :class:`EllipseGeometry`.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ReciprocalDegenerateError

COLLAPSE_TOL = 1e-12
BOUNDARY_RTOL = 1e-9


def _reduce_angle(theta: float) -> float:
    """Representative of ``theta`` modulo 2*pi in ``[-pi, pi)``."""
    r = math.fmod(theta + math.pi, 2 * math.pi)
    if r < 0:
        r += 2 * math.pi
    r -= math.pi
    if r >= math.pi:
        r -= 2 * math.pi
    return r


def reduce_angle(theta):
    """Vectorised :func:`_reduce_angle`; accepts scalars or arrays."""
    if np.ndim(theta) == 0:
        return _reduce_angle(float(theta))
    t = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(t >= np.pi, t - 2 * np.pi, t)


def angle_distance(a, b):
    """Distance between angles modulo 2*pi."""
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2 * np.pi) - np.pi)
    return float(d) if np.ndim(d) == 0 else d


@dataclass(frozen=True)
class SymbolCoefficients:
    diag: tuple[complex, ...]
    upper: tuple[complex, ...]
    lower: tuple[complex, ...]
    spatial_period: float = 1.0

    def __post_init__(self):
        diag = tuple(complex(v) for v in self.diag)
        upper = tuple(complex(v) for v in self.upper)
        lower = tuple(complex(v) for v in self.lower)
        if not diag:
            raise ValueError("symbol needs at least one unit-cell site (k >= 1)")
        if not (len(diag) == len(upper) == len(lower)):
            raise ValueError(
                f"coefficient lists must all have length k; got diag={len(diag)}, "
                f"upper={len(upper)}, lower={len(lower)}"
            )
        for name, vals in (("diag", diag), ("upper", upper), ("lower", lower)):
            if not all(cmath.isfinite(v) for v in vals):
                raise ValueError(f"{name} has non-finite entries")
        if not (self.spatial_period > 0 and math.isfinite(self.spatial_period)):
            raise ValueError("spatial_period must be a positive real")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "spatial_period", float(self.spatial_period))

    @property
    def k(self) -> int:
        return len(self.diag)

    @property
    def reciprocal_degenerate(self) -> bool:
        """True when some off-diagonal coefficient vanishes."""
        return any(v == 0 for v in self.upper + self.lower)

    @property
    def prod_upper(self) -> complex:
        return complex(np.prod(self.upper))

    @property
    def prod_lower(self) -> complex:
        return complex(np.prod(self.lower))

    def require_nondegenerate(self) -> None:
        if self.reciprocal_degenerate:
            raise ReciprocalDegenerateError(
                "reciprocal-degenerate symbol: all upper and lower coefficients must be nonzero"
            )


def prototype_symbol() -> SymbolCoefficients:
    """The 2-periodic example ``[[0, -2 - z/10], [-9/10 + 1/z, 0]]``."""
    return SymbolCoefficients(diag=(0, 0), upper=(-2, 1), lower=(-0.9, -0.1))


def evaluate(s: SymbolCoefficients, z: complex) -> np.ndarray:
    """The k-by-k symbol matrix ``a(z)``."""
    z = complex(z)
    if z == 0:
        raise ValueError("symbol is undefined at z = 0")
    return evaluate_many(s, np.array([z]))[0]


def evaluate_many(s: SymbolCoefficients, zs) -> np.ndarray:
    """Stack of symbol matrices, shape ``(len(zs), k, k)``."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    if np.any(zs == 0):
        raise ValueError("symbol is undefined at z = 0")
    k = s.k
    base = np.diag(np.array(s.diag, dtype=complex))
    for i in range(k - 1):
        base[i, i + 1] = s.upper[i]
        base[i + 1, i] = s.lower[i]
    out = np.broadcast_to(base, (zs.size, k, k)).copy()
    out[:, 0, k - 1] += s.lower[-1] * zs
    out[:, k - 1, 0] += s.upper[-1] / zs
    return out


def symbol_spectra(s: SymbolCoefficients, zs) -> np.ndarray:
    """Eigenvalues of ``a(z)`` for every ``z``; shape ``(len(zs), k)``."""
    return np.linalg.eigvals(evaluate_many(s, zs))


def psi(s: SymbolCoefficients, z):
    """``(-1)**(k+1) * (prod(c) z + prod(b) / z)``."""
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr == 0):
        raise ValueError("psi is undefined at z = 0")
    sign = -1.0 if s.k % 2 == 0 else 1.0
    val = sign * (s.prod_lower * z_arr + s.prod_upper / z_arr)
    return complex(val) if val.ndim == 0 else val


def g_polynomial(s: SymbolCoefficients, lam, z0: complex = 1.0):
    """``det(a(z0) - lam) - psi(z0)``; the result does not depend on ``z0``."""
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    A = evaluate(s, z0)
    eye = np.eye(s.k)
    dets = np.linalg.det(A[None, :, :] - lam_arr[:, None, None] * eye)
    val = dets - psi(s, z0)
    return complex(val[0]) if np.ndim(lam) == 0 else val


class Membership(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


@dataclass(frozen=True)
class EllipseGeometry:
    """Geometry of ``psi`` on circles ``|z| = e**beta``.

    ``psi(z) = K * (A_minus * w + A_plus / w)`` with ``w = z * exp(-i zeta/2)``,
    so after dividing by ``K`` the curve at level ``beta`` is an axis-aligned
    ellipse with semi-axes ``A_plus e**-beta + A_minus e**beta`` (real axis)
    and ``|A_plus e**-beta - A_minus e**beta|`` (imaginary axis).
    """

    A_plus: float
    A_minus: float
    K: complex
    zeta: float
    delta: float

    def semi_axes(self, beta: float = 0.0) -> tuple[float, float]:
        p = self.A_plus * math.exp(-beta)
        q = self.A_minus * math.exp(beta)
        return p + q, abs(p - q)

    @property
    def degenerate(self) -> bool:
        return abs(self.delta) <= COLLAPSE_TOL


def ellipse_geometry(s: SymbolCoefficients) -> EllipseGeometry:
    s.require_nondegenerate()
    b = np.array(s.upper)
    c = np.array(s.lower)
    log_ratio = float(np.sum(np.log(np.abs(b))) - np.sum(np.log(np.abs(c))))
    bc = b * c
    K = (-1.0) ** (s.k + 1) * complex(np.prod(np.sqrt(bc / np.abs(bc))))
    zeta = _reduce_angle(float(np.sum(np.angle(b)) - np.sum(np.angle(c))))
    return EllipseGeometry(
        A_plus=float(np.prod(np.abs(b))),
        A_minus=float(np.prod(np.abs(c))),
        K=K,
        zeta=zeta,
        delta=log_ratio,
    )


def is_collapsed(s: SymbolCoefficients) -> bool:
    return abs(ellipse_geometry(s).delta) <= COLLAPSE_TOL


def membership_codes(e: EllipseGeometry, xi, beta: float = 0.0, tol: float | None = None) -> np.ndarray:
    """Vectorised membership: 1 interior, 0 boundary, -1 exterior."""
    w = np.atleast_1d(np.asarray(xi, dtype=complex)) / e.K
    ax, ay = e.semi_axes(beta)
    if tol is None:
        tol = BOUNDARY_RTOL * (ax + ay)
    x, y = w.real, w.imag
    codes = np.empty(w.shape, dtype=int)
    if ay <= COLLAPSE_TOL * ax:
        # flat ellipse: the segment [-ax, ax]
        dx = np.maximum(np.abs(x) - ax, 0.0)
        dist = np.hypot(dx, y)
        codes[:] = np.where(dist <= tol, 0, -1)
        return codes
    rho = np.hypot(x / ax, y / ay)
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.where(rho > 0, np.abs(w) * np.abs(1.0 - 1.0 / rho), ay)
    codes[:] = np.where(dist <= tol, 0, np.where(rho < 1.0, 1, -1))
    return codes


def ellipse_membership(e: EllipseGeometry, xi: complex, beta: float = 0.0,
                       tol: float | None = None) -> Membership:
    """Classify ``xi`` against the filled ellipse traced by ``psi`` at level ``beta``."""
    code = int(membership_codes(e, xi, beta, tol)[0])
    return {1: Membership.INTERIOR, 0: Membership.BOUNDARY, -1: Membership.EXTERIOR}[code]


@dataclass(frozen=True)
class Quasiperiodicity:
    """Complex quasimomentum ``alpha + i beta`` (physical units, scaled by ``1/L``)."""

    alpha: float
    beta: float
    spatial_period: float = 1.0

    @property
    def z(self) -> complex:
        L = self.spatial_period
        return cmath.exp(-1j * L * complex(self.alpha, self.beta))

    @classmethod
    def from_z(cls, z: complex, spatial_period: float = 1.0) -> "Quasiperiodicity":
        if z == 0:
            raise ValueError("z = 0 has no quasiperiodicity")
        L = spatial_period
        alpha = _reduce_angle(-cmath.phase(z))
        beta = math.log(abs(z))
        return cls(alpha / L, beta / L, L)


def coefficients_from_pairs(pairs: Sequence) -> list[complex]:
    """Parse ``[[re, im], ...]`` (or plain numbers) into complex values."""
    out = []
    for p in pairs:
        if isinstance(p, (list, tuple)):
            if len(p) != 2:
                raise ValueError(f"complex entry must be [re, im], got {p!r}")
            out.append(complex(float(p[0]), float(p[1])))
        else:
            out.append(complex(p))
    return out
