"""Contraction moduli, fixed points, spectra, irreducibility and Knill-Laflamme checks.

The trace-norm contractivity modulus of a channel is

    k(T) = sup ||T(rho) - T(sigma)||_1 / ||rho - sigma||_1,

and the supremum is attained on pairs of orthogonal pure states.  For qubits
it is the largest singular value of the 3x3 block of the Pauli transfer
matrix.  In higher dimension we only report a sampled lower bound together
with the pair that attains it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channel as chmod
from .channel import Channel, as_channel
from .errors import (CodeNotOrthonormal, DimensionMismatch, NoFixedPointFound, ParameterOutOfRange,
                     NotBistochastic)
from .linalg import CHANNEL_TOL, dag, hermitize, null_space, positive_projector, proj
from .qstate import DensityMatrix, make_density, matrix_to_json
from .rand import rng_from


# modulus

def modulus_qubit(channel) -> float:
    ch = as_channel(channel)
    if (ch.dim_in, ch.dim_out) != (2, 2):
        raise DimensionMismatch("exact modulus is available for qubit channels only")
    return float(np.linalg.svd(ch.ptm.T_tilde, compute_uv=False)[0])


@dataclass
class ContractivityReport:
    k_lower: float
    certificate: tuple[np.ndarray, np.ndarray]
    method: str
    seed: int | None
    samples: int
    refine_steps: int
    k_exact: float | None = None

    def certificate_ratio(self, channel) -> float:
        return pair_contraction(channel, *self.certificate)

    def to_json(self) -> dict:
        psi, phi = self.certificate
        return {"k_exact": self.k_exact, "k_lower": self.k_lower, "method": self.method,
                "seed": self.seed, "samples": self.samples, "refine_steps": self.refine_steps,
                "certificate": {"psi": matrix_to_json(psi[:, None]),
                                "phi": matrix_to_json(phi[:, None])}}


def pair_contraction(channel, psi, phi) -> float:
    """``||T(psi) - T(phi)||_1 / ||psi - phi||_1`` for orthonormal pure ``psi, phi``."""
    ch = as_channel(channel)
    out = ch.apply_matrix(proj(psi) - proj(phi))
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(out)))))


def _batched_ratios(ch: Channel, psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    x = (np.einsum("ni,nj->nij", psi, psi.conj())
         - np.einsum("ni,nj->nij", phi, phi.conj()))
    y = ch.apply_matrix(x)
    y = 0.5 * (y + np.conj(np.swapaxes(y, 1, 2)))
    return 0.5 * np.sum(np.abs(np.linalg.eigvalsh(y)), axis=1)


def _ascend(ch: Channel, psi, phi, steps: int):
    """Alternating maximisation of ``tr[P T(psi psi^* - phi phi^*)]``.

    For fixed (psi, phi) the best P is the positive spectral projector of the
    output; for fixed P the best orthonormal pair is the top and bottom
    eigenvectors of the dual ``T^*(P)``.  Neither step can decrease the value.
    """
    value = pair_contraction(ch, psi, phi)
    for _ in range(steps):
        p = positive_projector(ch.apply_matrix(proj(psi) - proj(phi)))
        w, v = np.linalg.eigh(hermitize(ch.dual_matrix(p)))
        new_psi, new_phi = v[:, -1], v[:, 0]
        new_value = pair_contraction(ch, new_psi, new_phi)
        if new_value <= value + 1e-15:
            if new_value >= value:
                psi, phi, value = new_psi, new_phi, new_value
            break
        psi, phi, value = new_psi, new_phi, new_value
    return psi, phi, value


def modulus_estimate(channel, samples: int = 2000, refine_steps: int = 200,
                     seed=0, n_starts: int = 8) -> ContractivityReport:
    """Sampled lower bound on the contractivity modulus.

    ``samples`` Haar-random orthonormal pure pairs are scored, and the best
    ``n_starts`` of them are refined by alternating ascent.  The result is a
    lower bound; for qubits ``k_exact`` is filled in as well.
    """
    ch = as_channel(channel)
    if not ch.is_square:
        raise DimensionMismatch("modulus needs dim_in == dim_out")
    d = ch.dim_in
    if d < 2:
        return ContractivityReport(0.0, (np.ones(1, complex), np.ones(1, complex)),
                                   "trivial", None, 0, 0, 0.0)
    rng = rng_from(seed)
    g = rng.normal(size=(samples, d, d)) + 1j * rng.normal(size=(samples, d, d))
    q, _ = np.linalg.qr(g)
    psi, phi = q[:, :, 0], q[:, :, 1]
    ratios = _batched_ratios(ch, psi, phi)
    best = (psi[0], phi[0], -1.0)
    for idx in np.argsort(ratios)[::-1][:n_starts]:
        cand = _ascend(ch, psi[idx], phi[idx], refine_steps)
        if cand[2] > best[2]:
            best = cand
    k_exact = modulus_qubit(ch) if d == 2 else None
    return ContractivityReport(k_lower=float(best[2]), certificate=(best[0], best[1]),
                               method="sampled+alternating-ascent",
                               seed=seed if isinstance(seed, int) else None,
                               samples=samples, refine_steps=refine_steps, k_exact=k_exact)


def modulus(channel, **kwargs) -> float:
    """Exact modulus for qubits, sampled lower bound otherwise."""
    ch = as_channel(channel)
    if (ch.dim_in, ch.dim_out) == (2, 2):
        return modulus_qubit(ch)
    return modulus_estimate(ch, **kwargs).k_lower


# fixed points and spectra

@dataclass
class FixedPointReport:
    rho_fixed: DensityMatrix
    residual: float
    unique: bool
    eigenvalue_1_multiplicity: int
    fixed_states: list = field(default_factory=list)
    power_iteration_distance: float | None = None

    def to_json(self) -> dict:
        return {"rho_fixed": self.rho_fixed.to_json(), "residual": self.residual,
                "unique": self.unique,
                "eigenvalue_1_multiplicity": self.eigenvalue_1_multiplicity,
                "fixed_states": [s.to_json() for s in self.fixed_states],
                "power_iteration_distance": self.power_iteration_distance}


def _normalized_state(x: np.ndarray) -> DensityMatrix | None:
    x = hermitize(x)
    tr = np.trace(x).real
    if abs(tr) < 1e-12:
        return None
    x = x / tr
    if np.linalg.eigvalsh(x)[0] < -1e-8:
        return None
    return make_density(x, tol=1e-8)


def _split_fixed_space(ch: Channel, basis: list[np.ndarray], tol: float) -> list[DensityMatrix]:
    """Fixed states from positive and negative parts of Hermitian fixed operators."""
    herm = []
    for b in basis:
        herm += [hermitize(b), hermitize(1j * b)]
    herm = [h for h in herm if np.max(np.abs(h)) > 1e-10]
    anchor = next((s for s in map(_normalized_state, herm) if s is not None), None)
    candidates = []
    for h in herm:
        parts = [h]
        if anchor is not None:
            parts.append(h - np.trace(h).real * anchor.matrix)
        for part in parts:
            w, v = np.linalg.eigh(part)
            for sel in (w > 1e-10, w < -1e-10):
                if np.any(sel):
                    piece = (v[:, sel] * np.abs(w[sel])) @ dag(v[:, sel])
                    state = _normalized_state(piece)
                    if state is not None:
                        candidates.append(state)
    out: list[DensityMatrix] = []
    for s in candidates:
        resid = float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(ch.apply_matrix(s.matrix) - s.matrix)))))
        if resid > tol:
            continue
        if all(np.max(np.abs(s.matrix - t.matrix)) > 1e-6 for t in out):
            out.append(s)
    return out


def _power_fixed_point(ch: Channel, squarings: int = 64) -> np.ndarray:
    """``T^(2^squarings)(1/d)`` by repeated squaring of the transfer matrix."""
    m = ch.transfer_matrix()
    # stop once converged; further squaring only amplifies roundoff in the eigenvalue 1
    for _ in range(squarings):
        nxt = m @ m
        done = np.max(np.abs(nxt - m)) < 1e-15
        m = nxt
        if done or np.max(np.abs(m)) > 1e6:
            break
    d = ch.dim_in
    out = (m @ (np.eye(d) / d).reshape(-1)).reshape(d, d)
    return hermitize(out / np.trace(out))


def fixed_point(channel, tol: float = CHANNEL_TOL) -> FixedPointReport:
    ch = as_channel(channel)
    if not ch.is_square:
        raise DimensionMismatch("fixed points need dim_in == dim_out")
    d = ch.dim_in
    lmat = ch.transfer_matrix()
    mu, vecs = np.linalg.eig(lmat)
    near = np.abs(mu - 1)
    idx = int(np.argmin(near))
    if near[idx] > 1e-6:
        raise NoFixedPointFound(f"closest eigenvalue to 1 is {mu[idx]:.6g}")
    multiplicity = int(np.sum(near <= tol))
    unique = multiplicity == 1
    if unique:
        rho = _normalized_state(vecs[:, idx].reshape(d, d))
        if rho is None:
            raise NoFixedPointFound("eigenvector at 1 does not normalise to a state")
        fixed_states = [rho]
    else:
        basis, _ = null_space(lmat - np.eye(d * d), tol=1e-7)
        fixed_states = _split_fixed_space(ch, [b.reshape(d, d) for b in basis.T], 1e-7)
        if not fixed_states:
            raise NoFixedPointFound("could not extract fixed states from the eigenvalue-1 space")
        rho = fixed_states[0]
    residual = float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(ch.apply_matrix(rho.matrix) - rho.matrix)))))
    if unique and residual > 1e-6:
        raise NoFixedPointFound(f"fixed-point residual {residual:.3e}")
    power_dist = None
    if unique:
        power = _power_fixed_point(ch)
        power_dist = float(np.sum(np.abs(np.linalg.eigvalsh(power - rho.matrix))))
    return FixedPointReport(rho_fixed=rho, residual=residual, unique=unique,
                            eigenvalue_1_multiplicity=multiplicity, fixed_states=fixed_states,
                            power_iteration_distance=power_dist)


def transfer_spectrum(channel) -> np.ndarray:
    """Eigenvalues of the channel as a linear map on matrices, by decreasing modulus."""
    mu = np.linalg.eigvals(as_channel(channel).transfer_matrix())
    return mu[np.argsort(-np.abs(mu), kind="stable")]


def mixing_rate(channel, tol: float = CHANNEL_TOL) -> float:
    mu = transfer_spectrum(channel)
    rest = np.abs(mu[np.abs(mu - 1) > tol])
    return float(rest.max()) if rest.size else 0.0


def self_adjoint_spectrum(channel) -> np.ndarray:
    """Descending eigenvalues of ``T^* T`` (Hilbert-Schmidt adjoint)."""
    lmat = as_channel(channel).transfer_matrix()
    return np.linalg.eigvalsh(hermitize(dag(lmat) @ lmat))[::-1]


def spectral_gap(channel, tol: float = CHANNEL_TOL) -> float:
    """``1 - `` second largest eigenvalue of ``T^* T`` for a bistochastic ``T``."""
    ch = as_channel(channel)
    if not ch.is_square or not ch.is_bistochastic(tol):
        raise NotBistochastic(
            f"spectral gap needs a bistochastic channel (unital defect {ch.unital_defect():.3e})")
    w = self_adjoint_spectrum(ch)
    if w[-1] < -1e-9 or w[0] > 1 + 1e-9:
        raise NotBistochastic(f"T*T spectrum [{w[-1]:.3e}, {w[0]:.3e}] leaves [0, 1]")
    if w.size < 2:
        return 1.0
    return float(1 - min(1.0, w[1]))


def is_ergodic(channel, tol: float = CHANNEL_TOL) -> bool:
    """Identity is the only fixed point of the bistochastic map (as an operator)."""
    mu = transfer_spectrum(channel)
    return int(np.sum(np.abs(mu - 1) <= tol)) == 1


# density theorem

def strictify(channel, sigma, n: int) -> Channel:
    """``T_n = K_sigma / 2n + (1 - 1/2n) T`` with modulus at most ``1 - 1/2n``."""
    if n < 1:
        raise ParameterOutOfRange(f"n = {n} must be at least 1")
    ch = as_channel(channel)
    if np.asarray(sigma).shape != (ch.dim_out, ch.dim_out) or not ch.is_square:
        raise DimensionMismatch("strictify needs a square channel and a matching sigma")
    w = 1 / (2 * n)
    out = chmod.convex_combination([chmod.degenerate(sigma), ch], [w, 1 - w])
    out.name = f"strictified({ch.name or 'channel'}, n={n})"
    return out


def strictify_bounds(n: int) -> tuple[float, float]:
    """``(modulus upper bound, cb-distance upper bound)`` for ``strictify(., ., n)``."""
    return 1 - 1 / (2 * n), 1 / n


# commutant and Knill-Laflamme

@dataclass
class CommutantReport:
    dimension: int
    irreducible: bool
    basis: list
    singular_values: np.ndarray

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "irreducible": self.irreducible,
                "basis": [matrix_to_json(b) for b in self.basis],
                "smallest_singular_values": sorted(self.singular_values.tolist())[: self.dimension + 2]}


def commutant(channel, tol: float = CHANNEL_TOL) -> CommutantReport:
    """Matrices commuting with every Kraus operator and its adjoint."""
    ch = as_channel(channel) if not isinstance(channel, (list, tuple)) else Channel(channel, validate=False)
    if not ch.is_square:
        raise DimensionMismatch("commutant needs square Kraus operators")
    d = ch.dim_in
    eye = np.eye(d)
    rows = []
    for v in ch.kraus:
        for a in (v, dag(v)):
            rows.append(np.kron(eye, a.T) - np.kron(a, eye))
    basis, s = null_space(np.vstack(rows), tol=tol)
    mats = [b.reshape(d, d) for b in basis.T]
    return CommutantReport(dimension=len(mats), irreducible=len(mats) == 1,
                           basis=mats, singular_values=s)


@dataclass
class KnillLaflammeResult:
    passed: bool
    c_matrix: np.ndarray
    max_violation: float


def knill_laflamme_check(channel, code_basis, tol: float = 1e-7) -> KnillLaflammeResult:
    """Test ``P V_a^* V_b P = c_ab P`` on the span of ``code_basis``."""
    kraus = as_channel(channel).kraus if not isinstance(channel, (list, tuple)) else channel
    w = np.column_stack([np.asarray(c, dtype=complex).reshape(-1) for c in code_basis])
    m = w.shape[1]
    gram_defect = float(np.max(np.abs(dag(w) @ w - np.eye(m))))
    if gram_defect > 1e-8:
        raise CodeNotOrthonormal(f"code basis Gram matrix deviates from 1 by {gram_defect:.3e}")
    n = len(kraus)
    c = np.zeros((n, n), dtype=complex)
    worst = 0.0
    for a, va in enumerate(kraus):
        for b, vb in enumerate(kraus):
            block = dag(w) @ dag(va) @ vb @ w
            c[a, b] = np.trace(block) / m
            worst = max(worst, float(np.max(np.abs(block - c[a, b] * np.eye(m)))))
    return KnillLaflammeResult(passed=worst <= tol, c_matrix=c, max_violation=worst)
