"""Quantum channels: Kraus, Choi and Pauli-transfer forms.

Kraus operators are the canonical representation; the Choi matrix and the
Pauli transfer matrix are derived on first use and cached.

Choi convention: ``R = (Phi (x) id)(|I>><<I|)`` with ``|I>> = sum_i e_i (x) e_i``
over the input space, so the output factor is the left one and
``R[(a, i), (b, j)] = Phi(|i><j|)[a, b]``.  A channel is trace preserving iff
tracing ``R`` over the output factor gives the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import qstate
from .distance import fidelity, trace_norm_distance
from .errors import (ChoiNotPSD, DimensionMismatch, InvalidChannel, ParameterOutOfRange,
                     TraceConditionViolated)
from .linalg import (CHANNEL_TOL, I2, PAULIS, SX, SY, SZ, dag, hermitize, is_unitary,
                     null_space, proj, vec)
from .qstate import DensityMatrix, as_matrix, make_density, matrix_from_json, matrix_to_json
from .rand import random_pure, rng_from


def _check_range(name: str, value: float, lo: float = 0.0, hi: float = 1.0):
    if not lo <= value <= hi:
        raise ParameterOutOfRange(f"{name} = {value} outside [{lo}, {hi}]")


class Channel:
    """A completely positive map in Kraus form.

    With ``validate=True`` (default) the Kraus set must satisfy
    ``sum V^dag V = 1`` within ``tol``.  ``validate=False`` admits maps that are
    only completely positive, e.g. the Heisenberg dual of a non-unital channel.
    """

    def __init__(self, kraus: Sequence[np.ndarray], *, validate: bool = True,
                 tol: float = CHANNEL_TOL, name: str | None = None):
        ops = [np.array(k, dtype=complex, copy=True) for k in kraus]
        if not ops:
            raise InvalidChannel("empty Kraus set")
        shape = ops[0].shape
        if any(op.ndim != 2 or op.shape != shape for op in ops):
            raise DimensionMismatch("Kraus operators must be matrices of a common shape")
        for op in ops:
            op.setflags(write=False)
        self.kraus = tuple(ops)
        self.dim_out, self.dim_in = shape
        self.name = name
        if validate:
            defect = self.trace_defect()
            if defect > tol:
                raise TraceConditionViolated(
                    f"max |sum V^dag V - 1| = {defect:.3e} exceeds {tol:.1e}")

    def __repr__(self):
        label = self.name or "Channel"
        return f"<{label}: {self.dim_in}->{self.dim_out}, {len(self.kraus)} Kraus ops>"

    def trace_defect(self) -> float:
        s = sum(dag(v) @ v for v in self.kraus)
        return float(np.max(np.abs(s - np.eye(self.dim_in))))

    def unital_defect(self) -> float:
        if self.dim_in != self.dim_out:
            return math.inf
        s = sum(v @ dag(v) for v in self.kraus)
        return float(np.max(np.abs(s - np.eye(self.dim_out))))

    def is_bistochastic(self, tol: float = CHANNEL_TOL) -> bool:
        return self.trace_defect() <= tol and self.unital_defect() <= tol

    @property
    def is_square(self) -> bool:
        return self.dim_in == self.dim_out

    def apply_matrix(self, x) -> np.ndarray:
        """Linear action on an arbitrary ``dim_in x dim_in`` matrix (no validation)."""
        x = np.asarray(x, dtype=complex)
        if x.shape[-2:] != (self.dim_in, self.dim_in):
            raise DimensionMismatch(f"input shape {x.shape} does not match dim_in {self.dim_in}")
        ks = np.stack(self.kraus)
        if x.ndim == 2:
            return np.einsum("kab,bc,kdc->ad", ks, x, ks.conj())
        return np.einsum("kab,nbc,kdc->nad", ks, x, ks.conj())

    def __call__(self, rho) -> DensityMatrix:
        return apply(self, rho)

    def dual_matrix(self, x) -> np.ndarray:
        """Heisenberg-picture action ``X -> sum V^dag X V``."""
        x = np.asarray(x, dtype=complex)
        ks = np.stack(self.kraus)
        if x.ndim == 2:
            return np.einsum("kba,bc,kcd->ad", ks.conj(), x, ks)
        return np.einsum("kba,nbc,kcd->nad", ks.conj(), x, ks)

    @cached_property
    def choi(self) -> "ChoiMatrix":
        return kraus_to_choi(self)

    @cached_property
    def ptm(self) -> "PauliTransferMatrix":
        return pauli_transfer(self)

    def transfer_matrix(self) -> np.ndarray:
        """``d_out^2 x d_in^2`` matrix acting on row-major vectorised operators."""
        return sum(np.kron(v, v.conj()) for v in self.kraus)

    def adjoint(self) -> "Channel":
        return adjoint_channel(self)

    def to_json(self) -> dict:
        return {"dim_in": self.dim_in, "dim_out": self.dim_out,
                "kraus": [matrix_to_json(v) for v in self.kraus]}


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    matrix: np.ndarray
    dim_in: int
    dim_out: int
    normalized: bool = False

    def raw(self) -> np.ndarray:
        return self.matrix * self.dim_in if self.normalized else self.matrix

    def normalized_matrix(self) -> np.ndarray:
        return self.matrix if self.normalized else self.matrix / self.dim_in


@dataclass(frozen=True, eq=False)
class PauliTransferMatrix:
    """Real 4x4 matrix ``M[i, j] = tr[s_i Phi(s_j)] / 2`` in the basis (1, sx, sy, sz)."""

    matrix: np.ndarray

    @property
    def u(self) -> np.ndarray:
        return self.matrix[1:, 0]

    @property
    def T_tilde(self) -> np.ndarray:
        return self.matrix[1:, 1:]


# representations

def kraus_to_choi(channel) -> ChoiMatrix:
    ch = as_channel(channel)
    r = sum(np.outer(vec(v), vec(v).conj()) for v in ch.kraus)
    return ChoiMatrix(hermitize(r), ch.dim_in, ch.dim_out)


def choi_from_map(fn: Callable[[np.ndarray], np.ndarray], dim_in: int) -> ChoiMatrix:
    """Choi matrix of any linear map given as a callable on matrices."""
    blocks = {}
    for i in range(dim_in):
        for j in range(dim_in):
            e = np.zeros((dim_in, dim_in), dtype=complex)
            e[i, j] = 1
            blocks[i, j] = np.asarray(fn(e), dtype=complex)
    dim_out = blocks[0, 0].shape[0]
    r = np.zeros((dim_out, dim_in, dim_out, dim_in), dtype=complex)
    for (i, j), out in blocks.items():
        r[:, i, :, j] = out
    return ChoiMatrix(r.reshape(dim_out * dim_in, dim_out * dim_in), dim_in, dim_out)


def validate_choi(choi: ChoiMatrix, tol: float = CHANNEL_TOL) -> float:
    """Check complete positivity and trace preservation; return the min eigenvalue."""
    r = choi.raw()
    herm = float(np.max(np.abs(r - dag(r))))
    if herm > tol:
        raise ChoiNotPSD(f"Choi matrix not Hermitian: max defect {herm:.3e}")
    w_min = float(np.linalg.eigvalsh(hermitize(r))[0])
    if w_min < -tol:
        raise ChoiNotPSD(f"Choi min eigenvalue {w_min:.3e} below -{tol:.1e}: map is not CP")
    marg = qstate.partial_trace_matrix(r, (choi.dim_out, choi.dim_in), keep=1)
    defect = float(np.max(np.abs(marg - np.eye(choi.dim_in))))
    if defect > tol:
        raise TraceConditionViolated(f"Tr_out R deviates from identity by {defect:.3e}")
    return w_min


def choi_to_kraus(choi: ChoiMatrix, tol: float = CHANNEL_TOL, cutoff: float = 1e-10):
    """Minimal Kraus set from the Choi eigendecomposition."""
    validate_choi(choi, tol)
    w, v = np.linalg.eigh(hermitize(choi.raw()))
    ops = [math.sqrt(lam) * v[:, i].reshape(choi.dim_out, choi.dim_in)
           for i, lam in enumerate(w) if lam > cutoff]
    return ops[::-1]


def channel_from_choi(choi: ChoiMatrix, tol: float = CHANNEL_TOL) -> Channel:
    return Channel(choi_to_kraus(choi, tol), tol=tol)


def as_channel(obj) -> Channel:
    if isinstance(obj, Channel):
        return obj
    if isinstance(obj, ChoiMatrix):
        return channel_from_choi(obj)
    return Channel(obj)


# action

def apply(channel, rho, tol: float = 1e-9) -> DensityMatrix:
    ch = as_channel(channel)
    m = as_matrix(rho)
    if m.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatch(f"state of dim {m.shape[0]} into channel with dim_in {ch.dim_in}")
    return make_density(ch.apply_matrix(m), tol=tol)


def apply_via_choi(choi: ChoiMatrix, rho, tol: float = 1e-9) -> DensityMatrix:
    """``Tr_in[(1 (x) rho^T) R]`` evaluated from the Choi matrix alone."""
    m = as_matrix(rho)
    if m.shape != (choi.dim_in, choi.dim_in):
        raise DimensionMismatch(f"state of dim {m.shape[0]} into Choi with dim_in {choi.dim_in}")
    prod = np.kron(np.eye(choi.dim_out), m.T) @ choi.raw()
    out = qstate.partial_trace_matrix(prod, (choi.dim_out, choi.dim_in), keep=0)
    return make_density(out, tol=tol)


def compose(phi, psi) -> Channel:
    """``phi o psi`` (apply ``psi`` first)."""
    a, b = as_channel(phi), as_channel(psi)
    if b.dim_out != a.dim_in:
        raise DimensionMismatch(f"cannot compose: dim_out {b.dim_out} != dim_in {a.dim_in}")
    ch = Channel([v @ w for v in a.kraus for w in b.kraus])
    if len(ch.kraus) > ch.dim_in * ch.dim_out:
        ch = Channel(choi_to_kraus(ch.choi))
    return ch


def tensor_channels(phi, psi) -> Channel:
    a, b = as_channel(phi), as_channel(psi)
    return Channel([np.kron(v, w) for v in a.kraus for w in b.kraus])


def tensor_power(phi, n: int) -> Channel:
    out = as_channel(phi)
    for _ in range(n - 1):
        out = tensor_channels(out, phi)
    return out


def convex_combination(channels: Sequence, weights: Sequence[float]) -> Channel:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ParameterOutOfRange(f"weights {weights} are not a probability vector")
    ops = [math.sqrt(w) * v for ch, w in zip(channels, weights) if w > 0
           for v in as_channel(ch).kraus]
    return Channel(ops)


def adjoint_channel(phi) -> Channel:
    """Heisenberg-picture map ``X -> sum V^dag X V`` as a Kraus object.

    It is unital when ``phi`` is trace preserving and trace preserving only
    when ``phi`` is unital, so it is built without validation.
    """
    ch = as_channel(phi)
    return Channel([dag(v) for v in ch.kraus], validate=False,
                   name=f"adjoint({ch.name})" if ch.name else None)


# dilations

def stinespring_isometry(channel) -> np.ndarray:
    """``V psi = sum_a V_a psi (x) xi_a`` as a ``(dim_out * |K|) x dim_in`` matrix."""
    ch = as_channel(channel)
    ks = np.stack(ch.kraus)                 # (m, d_out, d_in)
    return np.transpose(ks, (1, 0, 2)).reshape(ch.dim_out * len(ch.kraus), ch.dim_in)


def trace_out_environment(iso: np.ndarray, rho, dim_out: int) -> np.ndarray:
    big = iso @ as_matrix(rho) @ dag(iso)
    env = big.shape[0] // dim_out
    return qstate.partial_trace_matrix(big, (dim_out, env), keep=0)


def ancilla_dilation(channel):
    """Unitary ``U`` on system (x) environment and ancilla ``Omega = xi_0``.

    Columns ``(i, 0)`` of ``U`` are the Stinespring isometry; the remaining
    columns are an orthonormal completion.
    """
    ch = as_channel(channel)
    if not ch.is_square:
        raise DimensionMismatch("ancilla form needs dim_in == dim_out")
    d, m = ch.dim_in, len(ch.kraus)
    iso = stinespring_isometry(ch)
    comp, _ = null_space(dag(iso), tol=1e-10)
    u = np.zeros((d * m, d * m), dtype=complex)
    first = [i * m for i in range(d)]
    rest = [c for c in range(d * m) if c not in set(first)]
    u[:, first] = iso
    u[:, rest] = comp[:, : len(rest)]
    omega = np.zeros(m, dtype=complex)
    omega[0] = 1
    return u, qstate.make_pure(omega)


def apply_via_dilation(u: np.ndarray, omega, rho) -> np.ndarray:
    omega = np.asarray(omega)
    d = as_matrix(rho).shape[0]
    big = u @ np.kron(as_matrix(rho), proj(omega)) @ dag(u)
    return qstate.partial_trace_matrix(big, (d, omega.size), keep=0)


# qubit structure

def pauli_transfer(channel, tol: float = 1e-10) -> PauliTransferMatrix:
    ch = as_channel(channel)
    if (ch.dim_in, ch.dim_out) != (2, 2):
        raise DimensionMismatch("Pauli transfer matrix is defined here for qubit channels")
    outs = ch.apply_matrix(np.stack(PAULIS))
    m = 0.5 * np.einsum("iab,jba->ij", np.stack(PAULIS), outs)
    imag = float(np.max(np.abs(m.imag)))
    if imag > tol:
        raise InvalidChannel(f"Pauli transfer matrix has imaginary part {imag:.3e}")
    return PauliTransferMatrix(m.real)


def _so3_to_su2(r: np.ndarray) -> np.ndarray:
    """One SU(2) preimage of a rotation under ``U (n.s) U^dag = (R n).s``."""
    cos_t = np.clip((np.trace(r) - 1) / 2, -1.0, 1.0)
    theta = math.acos(cos_t)
    if theta < 1e-12:
        return I2.copy()
    if math.pi - theta < 1e-6:
        # axis from the symmetric part: R + R^T = 2 cos(t) 1 + 2 (1 - cos(t)) n n^T
        nn = (r + r.T - 2 * cos_t * np.eye(3)) / (2 * (1 - cos_t))
        axis = nn[:, int(np.argmax(np.diag(nn)))]
        axis = axis / np.linalg.norm(axis)
        anti = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
        if anti @ axis < 0:
            axis = -axis
    else:
        anti = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
        axis = anti / (2 * math.sin(theta))
    ns = axis[0] * SX + axis[1] * SY + axis[2] * SZ
    return math.cos(theta / 2) * I2 - 1j * math.sin(theta / 2) * ns


@dataclass(frozen=True, eq=False)
class KingRuskaiForm:
    """``T(rho) = U T_{t,v}(V rho V^dag) U^dag``."""

    U: np.ndarray
    V: np.ndarray
    t: np.ndarray
    v: np.ndarray

    def normal_form(self, x: np.ndarray) -> np.ndarray:
        w0 = np.trace(x) / 2
        w = [np.trace(x @ s) / 2 for s in (SX, SY, SZ)]
        out = w0 * I2
        for ti, vi, wi, s in zip(self.t, self.v, w, (SX, SY, SZ)):
            out = out + (w0 * ti + vi * wi) * s
        return out

    def apply_matrix(self, x) -> np.ndarray:
        x = as_matrix(x)
        inner = self.normal_form(self.V @ x @ dag(self.V))
        return self.U @ inner @ dag(self.U)


def king_ruskai_decompose(channel) -> KingRuskaiForm:
    ptm = as_channel(channel).ptm
    tt = ptm.T_tilde
    if np.max(np.abs(tt - np.diag(np.diag(tt)))) < 1e-12:
        # already in normal form; the SVD would needlessly permute axes
        return KingRuskaiForm(U=I2.copy(), V=I2.copy(), t=ptm.u.copy(), v=np.diag(tt).copy())
    left, d, right_t = np.linalg.svd(tt)
    r1 = left @ np.diag([1, 1, np.linalg.det(left)])
    r2 = right_t.T @ np.diag([1, 1, np.linalg.det(right_t)])
    d_signed = d * np.array([1, 1, np.linalg.det(left) * np.linalg.det(right_t)])
    t = r1.T @ ptm.u
    return KingRuskaiForm(U=_so3_to_su2(r1), V=dag(_so3_to_su2(r2)), t=t, v=d_signed)


# channel fidelity and cb-norm bounds

def channel_fidelity(s, t) -> float:
    a, b = as_channel(s), as_channel(t)
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise DimensionMismatch("channel fidelity needs matching dimensions")
    return fidelity(a.choi.normalized_matrix(), b.choi.normalized_matrix())


def cb_bounds(s, t) -> tuple[float]:
    """Lower bound ``2 - 2 sqrt(F(S, T))`` on the cb-norm distance."""
    return (2 - 2 * math.sqrt(channel_fidelity(s, t)),)


def cb_distance_lower_estimate(s, t, samples: int = 500, seed=0) -> float:
    """Ancilla-assisted sampled lower estimate of ``||S - T||_cb``.

    The maximally entangled input is always included, so the estimate is at
    least the fidelity lower bound.  It never exceeds the true cb-distance.
    """
    a, b = as_channel(s), as_channel(t)
    d = a.dim_in
    rng = rng_from(seed)
    ext_a = tensor_channels(a, identity(d))
    ext_b = tensor_channels(b, identity(d))
    phi_plus = vec(np.eye(d)) / math.sqrt(d)
    best = 0.0
    for i in range(samples + 1):
        psi = phi_plus if i == 0 else random_pure(d * d, rng)
        x = proj(psi)
        best = max(best, trace_norm_distance(ext_a.apply_matrix(x), ext_b.apply_matrix(x)))
    return best


def fcb_bounds(channel, cb_distance: float | None = None, samples: int = 500, seed=0):
    """``((1 - c/2)^2, 1 - c^2/16)`` bracketing ``F(T, id)`` for cb-distance ``c``.

    When ``c`` is not supplied it is replaced by the sampled lower estimate;
    then only the upper member of the pair is guaranteed.
    """
    ch = as_channel(channel)
    if not ch.is_square:
        raise DimensionMismatch("fcb bounds need dim_in == dim_out")
    c = cb_distance
    if c is None:
        c = cb_distance_lower_estimate(ch, identity(ch.dim_in), samples, seed)
    return (1 - c / 2) ** 2, 1 - c * c / 16


# constructors

def identity(d: int) -> Channel:
    return Channel([np.eye(d)], name="identity")


def unitary_channel(u) -> Channel:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, 1e-9):
        raise InvalidChannel("gate is not unitary within 1e-9")
    return Channel([u], name="unitary")


def weyl_operators(d: int):
    """Generalised Paulis ``X^a Z^b``, ``a, b = 0..d-1``; ``(0, 0)`` first."""
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for a in range(d) for b in range(d)]


def depolarizing(d: int, p: float) -> Channel:
    """``D_p(rho) = (1 - p) rho + p 1/d``."""
    _check_range("p", p)
    if d < 1:
        raise ParameterOutOfRange(f"d = {d} must be positive")
    ops = weyl_operators(d)
    w0 = 1 - p + p / d ** 2
    kraus = [math.sqrt(w0) * ops[0]] + [math.sqrt(p) / d * op for op in ops[1:]]
    return Channel(kraus, name="depolarizing")


def two_pauli(p: float) -> Channel:
    _check_range("p", p)
    q = math.sqrt((1 - p) / 2)
    return Channel([math.sqrt(p) * I2, q * SX, -1j * q * SY], name="two_pauli")


def amplitude_damping(gamma: float) -> Channel:
    _check_range("gamma", gamma)
    v1 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]])
    v2 = np.array([[0, math.sqrt(gamma)], [0, 0]])
    return Channel([v1, v2], name="amplitude_damping")


def thermal_population(beta: float, energy: float) -> float:
    """Weight ``exp(-beta E) / (2 cosh beta E)`` of |0> in the Gibbs state of ``E sz``."""
    return 1.0 / (1.0 + math.exp(2 * beta * energy))


def thermalizing(beta: float, energy: float, gamma: float) -> Channel:
    """Generalised amplitude damping toward the Gibbs state of ``H = E sz``."""
    if beta < 0:
        raise ParameterOutOfRange(f"beta = {beta} must be nonnegative")
    if energy <= 0:
        raise ParameterOutOfRange(f"E = {energy} must be positive")
    _check_range("gamma", gamma)
    p = thermal_population(beta, energy)
    g, h = math.sqrt(gamma), math.sqrt(1 - gamma)
    ops = [math.sqrt(p) * np.array([[1, 0], [0, h]]),
           math.sqrt(p) * np.array([[0, g], [0, 0]]),
           math.sqrt(1 - p) * np.array([[h, 0], [0, 1]]),
           math.sqrt(1 - p) * np.array([[0, 0], [g, 0]])]
    return Channel(ops, name="thermalizing")


def phase_damping(lam: float) -> Channel:
    _check_range("lambda", lam)
    return Channel([math.sqrt(lam) * I2, math.sqrt(1 - lam) * SZ], name="phase_damping")


def degenerate(sigma) -> Channel:
    """Constant channel ``X -> tr(X) sigma``."""
    s = as_matrix(sigma)
    w, v = np.linalg.eigh(hermitize(s))
    d = s.shape[0]
    ops = [math.sqrt(lam) * np.outer(v[:, i], np.eye(d)[j])
           for i, lam in enumerate(w) if lam > 1e-14 for j in range(d)]
    return Channel(ops, name="degenerate")


def transpose_choi(d: int) -> ChoiMatrix:
    """Choi matrix of the (not completely positive) transposition map: the flip operator."""
    return choi_from_map(lambda x: x.T, d)


BUILTINS = {
    "identity": lambda d=2: identity(int(d)),
    "depolarizing": lambda p, d=2: depolarizing(int(d), p),
    "two_pauli": lambda p: two_pauli(p),
    "amplitude_damping": lambda gamma: amplitude_damping(gamma),
    "thermalizing": lambda beta, E, gamma: thermalizing(beta, E, gamma),
    "phase_damping": lambda lam: phase_damping(lam),
    "degenerate": lambda sigma: degenerate(matrix_from_json(sigma) if isinstance(sigma, dict)
                                           else np.asarray(sigma)),
}


def channel_from_json(data: dict, tol: float = CHANNEL_TOL) -> Channel:
    """Load either an explicit Kraus list or a ``{"builtin": ..., "params": ...}`` description."""
    if "builtin" in data:
        name = data["builtin"]
        if name not in BUILTINS:
            raise InvalidChannel(f"unknown builtin channel {name!r}")
        try:
            return BUILTINS[name](**data.get("params", {}))
        except TypeError as exc:
            raise InvalidChannel(f"bad parameters for {name}: {exc}") from exc
    try:
        ops = [matrix_from_json(k) for k in data["kraus"]]
    except (KeyError, TypeError) as exc:
        raise InvalidChannel(f"channel JSON needs 'kraus' or 'builtin': {exc}") from exc
    ch = Channel(ops, tol=tol)
    for key in ("dim_in", "dim_out"):
        if key in data and data[key] != getattr(ch, key):
            raise DimensionMismatch(f"declared {key}={data[key]} but Kraus ops give {getattr(ch, key)}")
    return ch
