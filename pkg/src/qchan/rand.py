"""Seeded random states, unitaries and channels for sweeps and tests."""
from __future__ import annotations

import numpy as np

from .linalg import dag, hermitize


def rng_from(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rows: int, cols: int, rng) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar unitary via QR with the phase fix."""
    rng = rng_from(rng)
    q, r = np.linalg.qr(ginibre(dim, dim, rng))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_isometry(rows: int, cols: int, rng=None) -> np.ndarray:
    rng = rng_from(rng)
    q, _ = np.linalg.qr(ginibre(rows, cols, rng))
    return q


def random_pure(dim: int, rng=None) -> np.ndarray:
    rng = rng_from(rng)
    v = ginibre(dim, 1, rng)[:, 0]
    return v / np.linalg.norm(v)


def random_density(dim: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Induced-measure density matrix; full rank unless ``rank`` is given."""
    rng = rng_from(rng)
    g = ginibre(dim, rank or dim, rng)
    m = g @ dag(g)
    return hermitize(m / np.trace(m).real)


def random_hermitian(dim: int, rng=None) -> np.ndarray:
    rng = rng_from(rng)
    return hermitize(ginibre(dim, dim, rng))


def random_kraus(dim_in: int, dim_out: int | None = None, n_kraus: int = 3, rng=None):
    """Kraus operators cut from a Haar isometry ``C^dim_in -> C^(n_kraus*dim_out)``."""
    rng = rng_from(rng)
    dim_out = dim_out or dim_in
    v = random_isometry(n_kraus * dim_out, dim_in, rng)
    return [v[a * dim_out:(a + 1) * dim_out] for a in range(n_kraus)]


def random_mixed_unitary(dim: int, n_terms: int = 3, rng=None):
    """Kraus operators of a random bistochastic (mixed-unitary) channel."""
    rng = rng_from(rng)
    p = rng.dirichlet(np.ones(n_terms))
    return [np.sqrt(pi) * random_unitary(dim, rng) for pi in p]
