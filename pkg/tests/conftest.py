"""Shared helpers: seeded random matrices with numpy as the independent
randomness/oracle source (production code never uses numpy's eigensolver)."""

from __future__ import annotations

import numpy as np
import pytest


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (g + g.conj().T) / 2.0


def random_positive(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g @ g.conj().T) / dim


def random_positive_contraction(rng: np.random.Generator, dim: int,
                                full_rank: bool = True) -> np.ndarray:
    """Positive contraction with eigenvalues drawn uniformly in (0.02, 0.98)."""
    lam = rng.uniform(0.02, 0.98, dim)
    if not full_rank and dim > 1:
        lam[rng.integers(0, dim)] = 0.0
    u = random_unitary(rng, dim)
    m = (u * lam) @ u.conj().T
    return (m + m.conj().T) / 2.0


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
