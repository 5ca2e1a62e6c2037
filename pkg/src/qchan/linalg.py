"""Small dense Hermitian linear algebra shared by every module.

All spectral work goes through :func:`numpy.linalg.eigh`.  Eigenvalues that
are negative only by roundoff (within ``clamp_tol``) are set to zero before
square roots and logarithms; anything more negative is left for the caller to
reject.
"""
from __future__ import annotations

import numpy as np

#: validation tolerance for state axioms
ATOL = 1e-9
#: tolerance used when comparing two computations of the same quantity
ORACLE_TOL = 1e-10
#: channel-level tolerance (trace preservation, Choi positivity)
CHANNEL_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SX, SY, SZ)


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dag(a))


def hermiticity_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - dag(a)))) if a.size else 0.0


def eigh_clamped(a: np.ndarray, clamp_tol: float = ATOL):
    """Eigen-decompose a Hermitian PSD matrix, zeroing roundoff negatives.

    Returns ``(w, v)`` in ascending order.  Eigenvalues below ``-clamp_tol``
    are kept as they are.
    """
    w, v = np.linalg.eigh(hermitize(a))
    w = np.where((w < 0) & (w >= -clamp_tol), 0.0, w)
    return w, v


def sqrtm_psd(a: np.ndarray, clamp_tol: float = ATOL) -> np.ndarray:
    w, v = eigh_clamped(a, clamp_tol)
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ dag(v)


def logm_pd(a: np.ndarray) -> np.ndarray:
    """Matrix logarithm of a Hermitian positive definite matrix."""
    w, v = np.linalg.eigh(hermitize(a))
    return (v * np.log(w)) @ dag(v)


def expm_herm(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(a))
    return (v * np.exp(w)) @ dag(v)


def trace_norm_herm(a: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(a)))))


def positive_projector(a: np.ndarray, tie_tol: float = 1e-12) -> np.ndarray:
    """Projector onto the nonnegative eigenspace; near-zero ties count as positive."""
    w, v = np.linalg.eigh(hermitize(a))
    keep = v[:, w >= -tie_tol]
    return keep @ dag(keep)


def is_unitary(u: np.ndarray, tol: float = ATOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(dag(u) @ u - np.eye(u.shape[0]))) <= tol)


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def proj(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def vec(a: np.ndarray) -> np.ndarray:
    """Row-major vectorisation: ``|A>> = (A (x) 1)|I>>`` with ``|I>> = sum_i e_i (x) e_i``."""
    return np.asarray(a).reshape(-1)


def kron_all(*ops: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def null_space(a: np.ndarray, tol: float = CHANNEL_TOL):
    """Orthonormal null-space basis by singular-value thresholding.

    Returns ``(basis, singular_values)`` with basis vectors as columns.
    """
    a = np.atleast_2d(a)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    s_full = np.zeros(vh.shape[0])
    s_full[: s.size] = s
    basis = dag(vh[s_full <= tol])
    return basis, s_full
