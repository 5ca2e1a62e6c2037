"""Density operators, composite systems and entropy functionals.

Composite indices are left-factor major: the pair ``(i, mu)`` of a
``dA x dB`` system maps to ``i * dB + mu``.  Entropies are in nats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (BlochOutOfBall, DimensionMismatch, NotHermitian,
                     NotNormalized, NotPositive, TraceNotOne)
from .linalg import (ATOL, PAULIS, dag, eigh_clamped, hermiticity_defect,
                     hermitize, proj)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state.  Build with :func:`make_density`."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_pure(self, tol: float = ATOL) -> bool:
        return bool(self.eigenvalues[-1] >= 1 - tol)

    def to_json(self) -> dict:
        return matrix_to_json(self.matrix) | {"dim": self.dim}

    @classmethod
    def from_json(cls, data: dict, tol: float = ATOL) -> "DensityMatrix":
        m = matrix_from_json(data)
        if "dim" in data and m.shape != (data["dim"], data["dim"]):
            raise DimensionMismatch(f"declared dim {data['dim']} but matrix is {m.shape}")
        return make_density(m, tol=tol)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def density(self) -> DensityMatrix:
        return DensityMatrix(_readonly(proj(self.amplitudes)))


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: np.ndarray   # columns
    right_vectors: np.ndarray  # columns

    @property
    def schmidt_number(self) -> int:
        return int(self.coefficients.size)

    def reconstruct(self) -> np.ndarray:
        return sum(c * np.kron(self.left_vectors[:, i], self.right_vectors[:, i])
                   for i, c in enumerate(self.coefficients))


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(data: dict) -> np.ndarray:
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape:
        raise DimensionMismatch(f"re/im shapes differ: {re.shape} vs {im.shape}")
    return re + 1j * im


def as_matrix(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex)


def make_density(matrix, tol: float = ATOL) -> DensityMatrix:
    """Validate ``matrix`` against the state axioms and wrap it.

    Eigenvalues in ``[-tol, 0)`` are treated as roundoff and clamped to zero.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got shape {m.shape}")
    herm = hermiticity_defect(m)
    if herm > tol:
        raise NotHermitian(f"max |M - M^dag| = {herm:.3e} exceeds {tol:.1e}")
    m = hermitize(m)
    tr = float(np.trace(m).real)
    if abs(tr - 1) > tol:
        raise TraceNotOne(f"|tr M - 1| = {abs(tr - 1):.3e} exceeds {tol:.1e}")
    w, v = np.linalg.eigh(m)
    if w[0] < -tol:
        raise NotPositive(f"min eigenvalue {w[0]:.3e} below -{tol:.1e}")
    if w[0] < 0:
        m = hermitize((v * np.clip(w, 0, None)) @ dag(v))
    return DensityMatrix(_readonly(m))


def make_pure(amplitudes, tol: float = ATOL) -> PureState:
    a = np.asarray(amplitudes, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(a))
    if abs(norm - 1) > tol:
        raise NotNormalized(f"| |psi| - 1 | = {abs(norm - 1):.3e} exceeds {tol:.1e}")
    return PureState(_readonly(a))


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(_readonly(np.eye(dim) / dim))


def basis_state(index: int, dim: int) -> DensityMatrix:
    m = np.zeros((dim, dim), dtype=complex)
    m[index, index] = 1
    return DensityMatrix(_readonly(m))


def tensor_states(rho, sigma) -> DensityMatrix:
    return DensityMatrix(_readonly(np.kron(as_matrix(rho), as_matrix(sigma))))


def _keep_index(keep) -> int:
    if keep in (0, "A", "a", "first", "left"):
        return 0
    if keep in (1, "B", "b", "second", "right"):
        return 1
    raise ValueError(f"keep must name subsystem A/0 or B/1, got {keep!r}")


def partial_trace_matrix(m, dims: Sequence[int], keep=0) -> np.ndarray:
    """Partial trace of any ``dA*dB`` square matrix (not only states)."""
    m = np.asarray(m)
    d_a, d_b = dims
    if m.shape != (d_a * d_b, d_a * d_b):
        raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {dims}")
    t = m.reshape(d_a, d_b, d_a, d_b)
    if _keep_index(keep) == 0:
        return np.einsum("ikjk->ij", t)
    return np.einsum("kikj->ij", t)


def partial_trace(rho, dims: Sequence[int], keep=0) -> DensityMatrix:
    return DensityMatrix(_readonly(hermitize(partial_trace_matrix(as_matrix(rho), dims, keep))))


def purify(rho, tol: float = ATOL) -> PureState:
    """Purification on ``dim * rank``; the ancilla is the right factor."""
    w, v = eigh_clamped(as_matrix(rho), tol)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    keep = w > tol
    w, v = w[keep], v[:, keep]
    rank = w.size
    psi = sum(np.sqrt(q) * np.kron(v[:, i], np.eye(rank)[i]) for i, q in enumerate(w))
    psi = psi / np.linalg.norm(psi)
    return PureState(_readonly(psi))


def schmidt(psi, dims: Sequence[int], tol: float = ATOL) -> SchmidtDecomposition:
    """Schmidt decomposition from the SVD of the ``dA x dB`` reshaping."""
    a = np.asarray(psi, dtype=complex).reshape(-1)
    d_a, d_b = dims
    if a.size != d_a * d_b:
        raise DimensionMismatch(f"vector of length {a.size} does not match dims {dims}")
    u, s, vh = np.linalg.svd(a.reshape(d_a, d_b), full_matrices=False)
    keep = s > tol
    return SchmidtDecomposition(coefficients=s[keep], left_vectors=u[:, keep],
                                right_vectors=vh[keep].T)


def is_maximally_entangled(psi, dims: Sequence[int], tol: float = 1e-8):
    """Return ``(flag, U)`` where ``psi = |U>> / sqrt(d)`` when ``flag`` holds."""
    d_a, d_b = dims
    if d_a != d_b:
        raise DimensionMismatch(f"maximal entanglement needs a square bipartition, got {dims}")
    a = np.asarray(psi, dtype=complex).reshape(-1)
    if a.size != d_a * d_b:
        raise DimensionMismatch(f"vector of length {a.size} does not match dims {dims}")
    d = d_a
    p = proj(a)
    target = np.eye(d) / d
    ok = all(np.max(np.abs(partial_trace_matrix(p, dims, keep) - target)) <= tol
             for keep in (0, 1))
    if not ok:
        return False, None
    return True, np.sqrt(d) * a.reshape(d, d)


def bloch_from_density(rho) -> np.ndarray:
    m = as_matrix(rho)
    if m.shape != (2, 2):
        raise DimensionMismatch(f"Bloch vectors need a qubit, got shape {m.shape}")
    return np.array([np.trace(m @ s).real for s in PAULIS[1:]])


def density_from_bloch(r, tol: float = ATOL) -> DensityMatrix:
    r = np.asarray(r, dtype=float).reshape(-1)
    if r.size != 3:
        raise DimensionMismatch(f"Bloch vector must have 3 components, got {r.size}")
    length = float(np.linalg.norm(r))
    if length > 1 + tol:
        raise BlochOutOfBall(f"|r| = {length:.6f} exceeds 1")
    m = 0.5 * (PAULIS[0] + sum(c * s for c, s in zip(r, PAULIS[1:])))
    return DensityMatrix(_readonly(m))


def _xlogx_sum(w: np.ndarray) -> float:
    w = w[w > 0]
    return float(np.sum(w * np.log(w)))


def von_neumann_entropy(rho, tol: float = ATOL) -> float:
    w, _ = eigh_clamped(as_matrix(rho), tol)
    return max(0.0, -_xlogx_sum(np.clip(w, 0, None)))


def relative_entropy(rho, sigma, support_tol: float = 1e-12, weight_tol: float = 1e-9) -> float:
    """``tr(rho ln rho - rho ln sigma)``; ``inf`` if supp(rho) is not inside supp(sigma)."""
    r, s = as_matrix(rho), as_matrix(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"shapes differ: {r.shape} vs {s.shape}")
    ws, vs = np.linalg.eigh(hermitize(s))
    # weight of rho in each eigendirection of sigma
    weights = np.einsum("ji,jk,ki->i", vs.conj(), r, vs).real
    kernel = ws < support_tol
    if np.any(weights[kernel] > weight_tol):
        return math.inf
    wr, _ = eigh_clamped(r)
    log_s = np.log(np.where(kernel, 1.0, ws))
    cross = float(np.sum(weights[~kernel] * log_s[~kernel]))
    return max(0.0, _xlogx_sum(np.clip(wr, 0, None)) - cross)


__all__ = [
    "DensityMatrix", "PureState", "SchmidtDecomposition", "make_density", "make_pure",
    "maximally_mixed", "basis_state", "tensor_states", "partial_trace",
    "partial_trace_matrix", "purify", "schmidt", "is_maximally_entangled",
    "bloch_from_density", "density_from_bloch", "von_neumann_entropy",
    "relative_entropy", "matrix_to_json", "matrix_from_json",
]
