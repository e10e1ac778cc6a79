from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from toeplitz_gbz import SymbolCoefficients, prototype_symbol

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def proto() -> SymbolCoefficients:
    return prototype_symbol()


@pytest.fixture(scope="session")
def hermitian() -> SymbolCoefficients:
    return SymbolCoefficients(diag=(0, 0), upper=(1 + 1j, 2), lower=(1 - 1j, 2))


@pytest.fixture(scope="session")
def scalar_chain() -> SymbolCoefficients:
    """k = 1 chain with hopping 2 to the right and 1/2 to the left."""
    return SymbolCoefficients(diag=(0,), upper=(2,), lower=(0.5,))


def random_symbol(rng: np.random.Generator, k: int, spread: float = 1.0) -> SymbolCoefficients:
    """Symbol with off-diagonal moduli in ``[0.3, 0.3 + 2 spread]`` and random phases."""

    def nonzero(n):
        r = 0.3 + 2 * spread * rng.random(n)
        return r * np.exp(2j * np.pi * rng.random(n))

    diag = rng.normal(size=k) + 1j * rng.normal(size=k)
    return SymbolCoefficients(tuple(diag), tuple(nonzero(k)), tuple(nonzero(k)))


@st.composite
def symbols(draw, max_k: int = 4):
    k = draw(st.integers(1, max_k))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_symbol(np.random.default_rng(seed), k)


def pytest_terminal_summary(terminalreporter):
    try:
        from . import test_acceptance
    except ImportError:
        return
    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in test_acceptance.summary_lines():
        terminalreporter.write_line(line)
