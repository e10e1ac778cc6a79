"""Dense complex linear algebra kernel.

Eigenvalues come from a Householder reduction to Hessenberg form followed by
single-shift complex QR iteration with Wilkinson shifts. Eigenvectors are
recovered afterwards by a few steps of inverse iteration, which is enough
because the matrices handled here have one-dimensional eigenspaces.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DegenerateEquationError

_EPS = np.finfo(float).eps

EIGVEC_TOL = 1e-10
INVERSE_ITERATIONS = 3


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    backward_error: float


def as_matrix(A) -> np.ndarray:
    """Validate and copy ``A`` into a square complex array with finite entries."""
    M = np.array(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] < 1:
        raise ValueError("matrix order must be at least 1")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def hessenberg(A) -> np.ndarray:
    """Unitarily similar upper Hessenberg form of ``A`` (Householder reflections)."""
    H = as_matrix(A)
    n = H.shape[0]
    for j in range(n - 2):
        x = H[j + 1:, j]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[j + 1:, j:] -= 2.0 * np.outer(v, v.conj() @ H[j + 1:, j:])
        H[:, j + 1:] -= 2.0 * np.outer(H[:, j + 1:] @ v, v.conj())
        H[j + 2:, j] = 0.0
    return H


def _eig2(a, b, c, d):
    """Eigenvalues of [[a, b], [c, d]], stable against cancellation."""
    half_tr = 0.5 * (a + d)
    root = cmath.sqrt(0.25 * (a - d) ** 2 + b * c)
    l1 = half_tr + root
    l2 = half_tr - root
    big = l1 if abs(l1) >= abs(l2) else l2
    det = a * d - b * c
    small = det / big if big != 0 else 0j
    return big, small


def _wilkinson_shift(W):
    a, b, c, d = W[-2, -2], W[-2, -1], W[-1, -2], W[-1, -1]
    l1, l2 = _eig2(a, b, c, d)
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def _qr_step(W, mu):
    """One explicitly shifted QR step on the Hessenberg block ``W`` (in place)."""
    p = W.shape[0]
    idx = np.arange(p)
    W[idx, idx] -= mu
    rotations = []
    for i in range(p - 1):
        a = W[i, i]
        b = W[i + 1, i]
        r = np.hypot(abs(a), abs(b))
        if r == 0.0:
            G = np.eye(2, dtype=complex)
        else:
            c = a / r
            s = b / r
            G = np.array([[c.conjugate(), s.conjugate()], [-s, c]])
        W[i:i + 2, i:] = G @ W[i:i + 2, i:]
        rotations.append(G)
    for i, G in enumerate(rotations):
        W[:i + 2, i:i + 2] = W[:i + 2, i:i + 2] @ G.conj().T
    W[idx, idx] += mu


def _hqr(H: np.ndarray, scale: float) -> tuple[np.ndarray, float]:
    """Eigenvalues of a Hessenberg matrix; also returns the largest dropped subdiagonal."""
    n = H.shape[0]
    eigs = np.zeros(n, dtype=complex)
    max_iter = 100 * n
    total = 0
    its = 0
    dropped = 0.0
    hi = n - 1
    while hi >= 0:
        if hi == 0:
            eigs[0] = H[0, 0]
            break
        d = np.abs(np.diagonal(H)[: hi + 1])
        sd = np.abs(np.diagonal(H, -1)[:hi])
        ref = d[:-1] + d[1:]
        ref[ref == 0.0] = scale
        small = np.nonzero(sd <= _EPS * ref)[0]
        lo = int(small[-1]) + 1 if small.size else 0
        if lo > 0:
            dropped = max(dropped, float(sd[lo - 1]))
            H[lo, lo - 1] = 0.0
        if lo == hi:
            eigs[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            eigs[hi - 1], eigs[hi] = _eig2(H[lo, lo], H[lo, hi], H[hi, lo], H[hi, hi])
            hi -= 2
            its = 0
            continue
        total += 1
        its += 1
        if total > max_iter:
            raise ConvergenceError(
                f"QR iteration did not converge for matrix of order {n}; "
                f"residual subdiagonal {sd[-1]:.3e}",
                order=n,
                residual=float(sd[-1]),
            )
        W = H[lo:hi + 1, lo:hi + 1]
        if its % 11 == 0:
            # exceptional shift breaks cycles of the Wilkinson shift
            mu = W[-1, -1] + 0.75 * abs(W[-1, -2]) * cmath.exp(1j * its)
        else:
            mu = _wilkinson_shift(W)
        _qr_step(W, mu)
    return eigs, dropped


def inverse_iteration(A, lam: complex, iterations: int = INVERSE_ITERATIONS) -> np.ndarray:
    """Unit eigenvector estimate for the eigenvalue ``lam`` of ``A``."""
    M = as_matrix(A)
    n = M.shape[0]
    normA = max(np.linalg.norm(M), 1.0)
    shift = lam + 10 * _EPS * normA
    lu = scipy.linalg.lu_factor(M - shift * np.eye(n), check_finite=False)
    # fixed deterministic start vector
    x = np.exp(1j * 0.61803398875 * np.arange(n) ** 2) / np.sqrt(n)
    for _ in range(iterations):
        y = scipy.linalg.lu_solve(lu, x, check_finite=False)
        nrm = np.linalg.norm(y)
        if not np.isfinite(nrm) or nrm == 0.0:
            break
        x = y / nrm
    return x


def eig_dense(A, want_vectors: bool = False) -> EigenResult:
    """All eigenvalues of a general complex matrix, optionally with unit eigenvectors.

    Raises:
        ConvergenceError: the QR iteration exceeded ``100 * n`` iterations, or an
            eigenvector failed the residual bound ``1e-10 * n * ||A||_F``.
    """
    M = as_matrix(A)
    n = M.shape[0]
    normA = float(np.linalg.norm(M))
    scale = normA if normA > 0 else 1.0
    H = hessenberg(M)
    eigs, dropped = _hqr(H, scale)
    backward = dropped / scale
    vectors = None
    if want_vectors:
        vectors = np.empty((n, n), dtype=complex)
        worst = 0.0
        for i, lam in enumerate(eigs):
            v = inverse_iteration(M, lam)
            vectors[:, i] = v
            worst = max(worst, float(np.linalg.norm(M @ v - lam * v)))
        if worst > EIGVEC_TOL * n * scale:
            raise ConvergenceError(
                f"inverse iteration did not converge for matrix of order {n}; "
                f"residual {worst:.3e}",
                order=n,
                residual=worst,
            )
        backward = max(backward, worst / scale)
    return EigenResult(eigs, vectors, backward)


def eigvals(A) -> np.ndarray:
    return eig_dense(A).eigenvalues


def smallest_singular_value(A) -> float:
    """Smallest singular value of ``A`` (LAPACK divide-and-conquer SVD)."""
    M = as_matrix(A)
    try:
        s = np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD failed for matrix of order {M.shape[0]}: {exc}",
                               order=M.shape[0]) from exc
    return float(s[-1])


def smallest_singular_values(stack: np.ndarray) -> np.ndarray:
    """Batched variant of :func:`smallest_singular_value` over a ``(..., n, n)`` stack."""
    try:
        s = np.linalg.svd(stack, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"batched SVD failed: {exc}") from exc
    return s[..., -1]


def solve_quadratic(c2: complex, c1: complex, c0: complex) -> tuple[complex, complex]:
    """Both roots of ``c2 z**2 + c1 z + c0 = 0``.

    The larger-magnitude root is formed without cancellation and the other one
    from the product of roots, so ``r1 * r2 == c0 / c2`` to working precision.
    """
    c2, c1, c0 = complex(c2), complex(c1), complex(c0)
    if c2 == 0:
        raise DegenerateEquationError("leading coefficient is zero; equation is linear")
    root = cmath.sqrt(c1 * c1 - 4 * c2 * c0)
    if (c1.conjugate() * root).real < 0:
        root = -root
    q = -0.5 * (c1 + root)
    if q == 0:
        return 0j, 0j
    return q / c2, c0 / q
