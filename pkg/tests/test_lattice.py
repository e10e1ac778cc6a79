from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from toeplitz_gbz import (
    BoundaryKind,
    OverflowGuardError,
    ReciprocalDegenerateError,
    SymbolCoefficients,
    circulant_matrix,
    collapsed_symbol,
    eig_dense,
    evaluate,
    is_collapsed,
    matching_distance,
    symmetrizer,
    toeplitz_matrix,
)

from .conftest import symbols


def test_prototype_open_chain(proto):
    T = toeplitz_matrix(proto, 2)
    expected = [[0, -2, 0, 0], [-0.9, 0, 1, 0], [0, -0.1, 0, -2], [0, 0, -0.9, 0]]
    assert np.array_equal(T.matrix, np.array(expected, dtype=complex))
    assert T.kind is BoundaryKind.OPEN and T.m == 2 and T.k == 2


def test_single_cell():
    s = SymbolCoefficients((5,), (1,), (1,))
    assert np.array_equal(toeplitz_matrix(s, 1).matrix, [[5]])
    s3 = SymbolCoefficients((1, 2, 3), (4, 5, 6), (7, 8, 9))
    M = toeplitz_matrix(s3, 1).matrix
    assert np.array_equal(M, [[1, 4, 0], [7, 2, 5], [0, 8, 3]])


def test_prototype_ring(proto):
    C = circulant_matrix(proto, 2).matrix
    expected = toeplitz_matrix(proto, 2).matrix
    expected[0, 3] = -0.1
    expected[3, 0] = 1
    assert np.array_equal(C, expected)


def test_scalar_ring():
    s = SymbolCoefficients((0,), (1,), (1,))
    C = circulant_matrix(s, 3).matrix
    assert np.array_equal(C, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])


def test_ring_needs_two_cells(proto):
    with pytest.raises(ValueError, match="corner collision"):
        circulant_matrix(proto, 1)


@pytest.mark.parametrize("m", [2, 3, 7, 16])
def test_scalar_ring_fourier_oracle(m):
    a, b, c = 0.3 + 0.1j, 2.0 - 1j, 0.5j
    s = SymbolCoefficients((a,), (b,), (c,))
    C = circulant_matrix(s, m).matrix
    # DFT columns diagonalize any circulant; eigenvalue j is the symbol at w^j
    w = np.exp(2j * np.pi / m)
    F = w ** -np.outer(np.arange(m), np.arange(m))
    lam = a + c * w ** np.arange(m) + b * w ** -np.arange(m)
    assert np.allclose(C @ F, F * lam[None, :], atol=1e-12)
    assert matching_distance(eig_dense(C).eigenvalues, lam) < 1e-10


@given(s=symbols(), m=st.integers(1, 6))
def test_structure(s, m):
    T = toeplitz_matrix(s, m).matrix
    n = m * s.k
    assert T.shape == (n, n)
    assert np.all(np.triu(T, 2) == 0) and np.all(np.tril(T, -2) == 0)
    for i in range(n):
        assert T[i, i] == s.diag[i % s.k]
        if i + 1 < n:
            assert T[i, i + 1] == s.upper[i % s.k]
            assert T[i + 1, i] == s.lower[i % s.k]
    bigger = toeplitz_matrix(s, m + 1).matrix
    assert np.array_equal(bigger[:n, :n], T)
    if m >= 2:
        C = circulant_matrix(s, m).matrix
        diff = C - T
        diff[0, n - 1] -= s.lower[-1]
        diff[n - 1, 0] -= s.upper[-1]
        assert np.allclose(diff, 0, atol=1e-14)


def test_collapsed_examples(proto, scalar_chain):
    ct = collapsed_symbol(proto)
    assert np.allclose(ct.upper, [np.sqrt(1.8), 1j * np.sqrt(0.1)])
    assert ct.upper == ct.lower and ct.diag == proto.diag
    sym = SymbolCoefficients((1, 2), (3, 1j), (3, 1j))
    assert np.allclose(collapsed_symbol(sym).upper, sym.upper)
    assert np.allclose(collapsed_symbol(scalar_chain).upper, [1.0])
    with pytest.raises(ReciprocalDegenerateError):
        collapsed_symbol(SymbolCoefficients((0,), (0,), (1,)))


def test_symmetrizer_examples(scalar_chain, proto):
    assert np.allclose(symmetrizer(scalar_chain, 3), [1, 2, 4])
    sym = SymbolCoefficients((0, 1), (2, 3), (2, 3))
    assert np.allclose(symmetrizer(sym, 4), 1)
    d = symmetrizer(proto, 2)
    assert np.allclose(np.abs(d[:3]), [1, np.sqrt(20 / 9), np.sqrt(20 / 9) * np.sqrt(10)])
    assert np.allclose(d[1:] ** 2 / d[:-1] ** 2, [2 / 0.9, -10, 2 / 0.9])


def test_symmetrizer_overflow_guard(scalar_chain):
    with pytest.raises(OverflowGuardError, match="overflow guard"):
        symmetrizer(scalar_chain, 1000)


@given(s=symbols(), m=st.integers(1, 10))
def test_similarity_to_collapsed_chain(s, m):
    T = toeplitz_matrix(s, m).matrix
    d = symmetrizer(s, m)
    S = d[:, None] * T / d[None, :]
    assert np.linalg.norm(S - S.T) <= 1e-10 * np.linalg.norm(T) * np.max(np.abs(d)) / np.min(np.abs(d))
    Tc = toeplitz_matrix(collapsed_symbol(s), m).matrix
    assert np.allclose(S, Tc, rtol=1e-10, atol=1e-12 * np.linalg.norm(Tc))
    assert is_collapsed(collapsed_symbol(s))


@given(s=symbols(max_k=3), m=st.integers(1, 10))
def test_spectrum_preserved_by_collapse(s, m):
    direct = eig_dense(toeplitz_matrix(s, m).matrix).eigenvalues
    collapsed = eig_dense(toeplitz_matrix(collapsed_symbol(s), m).matrix).eigenvalues
    # the open chain is non-normal; allow for its eigenvalue condition number
    assert matching_distance(direct, collapsed) < 1e-7 * max(1.0, np.abs(collapsed).max())


@given(s=symbols(max_k=3), m=st.integers(2, 12))
def test_ring_block_identity(s, m):
    dense = eig_dense(circulant_matrix(s, m).matrix).eigenvalues
    blocks = np.concatenate(
        [np.linalg.eigvals(evaluate(s, np.exp(2j * np.pi * j / m))) for j in range(m)]
    )
    assert matching_distance(dense, blocks) < 1e-8
