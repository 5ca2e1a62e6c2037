"""Entropy and free-energy bookkeeping for noisy computation.

Noise that is bistochastic and strictly contractive raises the von Neumann
entropy at a rate set by the spectral gap.  Balanced against a fixed energy
budget this caps the number of useful steps.  Entropies are in nats and
``beta`` is an inverse energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import constants
from scipy.special import logsumexp

from .channel import Channel, as_channel
from .contractivity import modulus_qubit
from .errors import (ConditionViolated, DimensionMismatch, NotBistochastic,
                     NotCommuting, NotErgodic, NotHermitian, NotTraceless,
                     OverlapExceedsKappa, ParameterOutOfRange)
from .linalg import CHANNEL_TOL, dag, hermiticity_defect, hermitize
from .rand import random_density, rng_from
from .qstate import (DensityMatrix, as_matrix, make_density, relative_entropy,
                     von_neumann_entropy)


# Gibbs states

@dataclass
class GibbsSystem:
    hamiltonian: np.ndarray
    beta: float
    gibbs_state: DensityMatrix
    log_partition: float

    @property
    def partition_function(self) -> float:
        return math.exp(self.log_partition)

    @property
    def phi_beta(self) -> float:
        """Equilibrium free energy ``-ln(Z)/beta``."""
        if self.beta == 0:
            raise ParameterOutOfRange("free energy is undefined at beta = 0")
        return -self.log_partition / self.beta


def gibbs_state(hamiltonian, beta: float) -> GibbsSystem:
    h = np.asarray(hamiltonian, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"Hamiltonian must be square, got {h.shape}")
    if hermiticity_defect(h) > 1e-9:
        raise NotHermitian("Hamiltonian is not Hermitian")
    if beta < 0:
        raise ParameterOutOfRange(f"beta = {beta} must be nonnegative")
    h = hermitize(h)
    e, v = np.linalg.eigh(h)
    log_z = float(logsumexp(-beta * e))
    w = np.exp(-beta * e - log_z)
    rho = make_density((v * w) @ dag(v))
    return GibbsSystem(hamiltonian=h, beta=beta, gibbs_state=rho, log_partition=log_z)


def free_energy(rho, system: GibbsSystem) -> float:
    """``F(rho) = tr(rho H) - S(rho)/beta``."""
    r = as_matrix(rho)
    if r.shape != system.hamiltonian.shape:
        raise DimensionMismatch(f"state {r.shape} vs Hamiltonian {system.hamiltonian.shape}")
    if system.beta <= 0:
        raise ParameterOutOfRange("free energy needs beta > 0")
    return float(np.trace(r @ system.hamiltonian).real) - von_neumann_entropy(r) / system.beta


def free_energy_excess(rho, system: GibbsSystem) -> float:
    """``S(rho | rho_beta) / beta``, equal to ``F(rho) - Phi(beta)``."""
    return relative_entropy(rho, system.gibbs_state) / system.beta


# entropy continuity and production

def _eta(t: float) -> float:
    return t * math.log(t) if t > 0 else 0.0


@dataclass
class FannesResult:
    applicable: bool
    distance: float
    bound: float | None
    entropy_difference: float
    satisfied: bool | None


def fannes_bound(rho, sigma) -> FannesResult:
    """``|S(rho) - S(sigma)| <= D ln d - D ln D`` for ``D = ||rho - sigma||_1 < 1/3``."""
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    dist = float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(a - b)))))
    diff = abs(von_neumann_entropy(a) - von_neumann_entropy(b))
    if dist >= 1 / 3:
        return FannesResult(False, dist, None, diff, None)
    bound = math.log(a.shape[0]) * dist - _eta(dist)
    return FannesResult(True, dist, bound, diff, diff <= bound + 1e-12)


@dataclass
class EntropyGainResult:
    bound: float
    actual: float
    gamma: float
    n: int
    satisfied: bool


def _gap_of_power(ch: Channel, n: int) -> float:
    lmat = np.linalg.matrix_power(ch.transfer_matrix(), n)
    w = np.linalg.eigvalsh(hermitize(dag(lmat) @ lmat))[::-1]
    return float(1 - min(1.0, w[1])) if w.size > 1 else 1.0


def entropy_gain_bound(channel, rho, n: int = 1, site_channel=None,
                       tol: float = CHANNEL_TOL) -> EntropyGainResult:
    """Lower bound ``(gamma_n / 2) ||rho - 1/d||_2^2`` on ``S(T^n rho) - S(rho)``.

    If ``site_channel`` is a qubit bistochastic map ``R`` and ``channel`` is a
    tensor power of it, ``gamma_n = 1 - k(R)**(2n)`` is used.  Otherwise the gap
    of ``(T^n)^* T^n`` is computed directly.
    """
    ch = as_channel(channel)
    if n < 1:
        raise ParameterOutOfRange(f"n = {n} must be at least 1")
    if not ch.is_square or not ch.is_bistochastic(tol):
        raise NotBistochastic("entropy-gain bound needs a bistochastic channel")
    r = as_matrix(rho)
    d = ch.dim_in
    if r.shape != (d, d):
        raise DimensionMismatch(f"state {r.shape} vs channel dim {d}")
    if site_channel is not None:
        site = as_channel(site_channel)
        if not site.is_bistochastic(tol):
            raise NotBistochastic("site channel is not bistochastic")
        gamma = 1 - modulus_qubit(site) ** (2 * n)
    else:
        gamma = _gap_of_power(ch, n)
    if gamma <= 1e-12:
        raise NotErgodic("spectral gap vanishes; the channel has more than one invariant operator")
    dev = hermitize(r - np.eye(d) / d)
    hs2 = float(np.trace(dev @ dev).real)
    out = r
    for _ in range(n):
        out = ch.apply_matrix(out)
    actual = von_neumann_entropy(hermitize(out)) - von_neumann_entropy(r)
    bound = gamma / 2 * hs2
    return EntropyGainResult(bound=bound, actual=actual, gamma=gamma, n=n,
                             satisfied=actual >= bound - 1e-8)


# step budgets

@dataclass
class EntropyEnergyParams:
    beta: float
    E_max: float
    epsilon: float
    N: int
    k: float
    delta: float = 1.0

    def __post_init__(self):
        checks = [("beta", self.beta >= 0), ("E_max", self.E_max >= 0),
                  ("epsilon", 0 < self.epsilon <= 1), ("k", 0 <= self.k < 1),
                  ("delta", 0 < self.delta <= 1), ("N", self.N >= 1)]
        for name, ok in checks:
            if not ok:
                raise ParameterOutOfRange(f"{name} = {getattr(self, name)} out of range")

    @classmethod
    def from_json(cls, data: dict) -> "EntropyEnergyParams":
        fields = ("beta", "E_max", "epsilon", "N", "k", "delta")
        unknown = set(data) - set(fields)
        if unknown:
            raise ParameterOutOfRange(f"unknown parameter fields {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def entropy_energy_ratio(params: EntropyEnergyParams, large_N: bool = False) -> float:
    """``2 beta E_max / (eps^2 (1 - 2^-N))``; the step budget is finite only below 1."""
    purity = 1.0 if large_N else -math.expm1(-params.N * math.log(2))
    return 2 * params.beta * params.E_max / (params.epsilon ** 2 * purity)


def n_max_entropy(params: EntropyEnergyParams, large_N: bool = False) -> int:
    """``floor(log(1 - c) / (2 log k))`` with ``c`` from :func:`entropy_energy_ratio`."""
    c = entropy_energy_ratio(params, large_N)
    if c >= 1:
        raise ConditionViolated(
            f"beta*E_max = {params.beta * params.E_max:.6g} is not below eps^2(1-2^-N)/2; "
            "the entropy-energy argument gives no bound")
    if not 0 < params.k < 1:
        raise ParameterOutOfRange(f"k = {params.k} must lie in (0, 1)")
    x = math.log1p(-c) / (2 * math.log(params.k))
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        x = r
    return int(math.floor(x))


def n_max_weak_noise(params: EntropyEnergyParams) -> float:
    """Budget ``2 beta E_max / (delta eps^2 (1 - k^2))`` for noise ``(1-delta) id + delta R^N``."""
    return 2 * params.beta * params.E_max / (params.delta * params.epsilon ** 2 * (1 - params.k ** 2))


# mixtures

@dataclass
class MixtureBound:
    bound: float
    actual: float
    overlaps: list
    satisfied: bool


def mixture_entropy_bound(states: Sequence, kappa: float, tol: float = 1e-8) -> MixtureBound:
    """``S(mean rho_i) >= mean S(rho_i) + ln n - 2 sqrt(kappa)`` for commuting, almost disjoint states."""
    mats = [as_matrix(s) for s in states]
    n = len(mats)
    if n == 0:
        raise ParameterOutOfRange("need at least one state")
    if kappa < 0:
        raise ParameterOutOfRange(f"kappa = {kappa} must be nonnegative")
    for i in range(n):
        for j in range(i + 1, n):
            c = mats[i] @ mats[j] - mats[j] @ mats[i]
            if np.max(np.abs(c)) > tol:
                raise NotCommuting(f"states {i} and {j} do not commute")
    gram = np.array([[np.trace(a @ b).real for b in mats] for a in mats])
    overlaps = (gram.sum(axis=0) - np.diag(gram)).tolist()
    for i, o in enumerate(overlaps):
        if o > kappa + tol:
            raise OverlapExceedsKappa(f"state {i}: overlap {o:.6g} exceeds kappa = {kappa}")
    actual = von_neumann_entropy(hermitize(sum(mats) / n))
    bound = float(np.mean([von_neumann_entropy(m) for m in mats])) + math.log(n) - 2 * math.sqrt(kappa)
    return MixtureBound(bound=bound, actual=actual, overlaps=overlaps, satisfied=actual >= bound - 1e-8)


@dataclass
class ClusterOverlap:
    states: list
    overlaps: list
    bound: float
    satisfied: bool


def cluster_mixture_overlap(n: int, d: int, k: int, eta: float, cluster_states: Sequence | None = None,
                            rng=None) -> ClusterOverlap:
    """Overlaps of ``rho_i = T_i(rho)`` for ``n*k`` clusters of ``d`` qubits.

    ``T_i`` depolarizes (rate ``eta``) the ``k`` clusters of block ``i`` and
    leaves the rest alone.  The overlap sum for each ``i`` is compared with
    ``(n-1)(1 - eta + eta/2^d)^(2k)``.
    """
    n_clusters = n * k
    dc = 2 ** d
    if cluster_states is None:
        rng = rng_from(rng)
        cluster_states = [random_density(dc, rng) for _ in range(n_clusters)]
    if len(cluster_states) != n_clusters:
        raise DimensionMismatch(f"need {n_clusters} cluster states, got {len(cluster_states)}")
    cl = [as_matrix(s) for s in cluster_states]
    depol = [(1 - eta) * s + eta * np.eye(dc) / dc for s in cl]
    states = []
    for i in range(n):
        block = range(i * k, (i + 1) * k)
        m = np.ones((1, 1), dtype=complex)
        for l in range(n_clusters):
            m = np.kron(m, depol[l] if l in block else cl[l])
        states.append(m)
    gram = np.array([[np.trace(a @ b).real for b in states] for a in states])
    overlaps = (gram.sum(axis=0) - np.diag(gram)).tolist()
    bound = (n - 1) * (1 - eta + eta / dc) ** (2 * k)
    return ClusterOverlap(states=states, overlaps=overlaps, bound=bound,
                          satisfied=max(overlaps) <= bound + 1e-9)


# effective pure states

def effective_pure_state(psi, alpha: float) -> DensityMatrix:
    """``(1 - alpha) 1/d + alpha |psi><psi|``."""
    if not 0 < alpha <= 1:
        raise ParameterOutOfRange(f"alpha = {alpha} outside (0, 1]")
    v = np.asarray(psi, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    d = v.size
    return make_density((1 - alpha) * np.eye(d) / d + alpha * np.outer(v, v.conj()))


@dataclass
class EPSCheck:
    lhs: float
    rhs: float
    satisfied: bool


def verify_eps(psi, alpha: float, channel, observable, tol: float = 1e-9) -> EPSCheck:
    """Check ``tr[T(rho_alpha) X] = alpha <psi|T^*(X)|psi>`` for traceless ``X``."""
    ch = as_channel(channel)
    if not ch.is_square or not ch.is_bistochastic():
        raise NotBistochastic("effective-pure-state identity needs a bistochastic channel")
    x = np.asarray(observable, dtype=complex)
    if abs(np.trace(x)) > 1e-9:
        raise NotTraceless(f"tr X = {np.trace(x):.3e}")
    v = np.asarray(psi, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    rho = effective_pure_state(v, alpha)
    lhs = np.trace(ch.apply_matrix(rho.matrix) @ x)
    rhs = alpha * (v.conj() @ ch.dual_matrix(x) @ v)
    return EPSCheck(lhs=complex(lhs).real, rhs=complex(rhs).real, satisfied=abs(lhs - rhs) <= tol)


def boltzmann_factor(frequency_hz: float = 200e6, temperature: float = 300.0) -> float:
    """``hbar Omega beta / 2`` for a spin resonance at ``frequency_hz``."""
    omega = 2 * math.pi * frequency_hz
    return constants.hbar * omega / (2 * constants.k * temperature)


def nmr_alpha(N: int, frequency_hz: float = 200e6, temperature: float = 300.0) -> float:
    """Effective-pure-state weight ``N hbar Omega beta / 2^(N+1)`` of a thermal N-spin sample."""
    return N * boltzmann_factor(frequency_hz, temperature) / 2 ** N


# spatial mixing

@dataclass
class SpatialFreeEnergy:
    n: int
    beta_dF_bound: float
    negative: bool
    n_crit: int


def spatial_free_energy_check(n: int, E_c: float, beta: float) -> SpatialFreeEnergy:
    """``beta dF <= beta E_c - ln n + 2`` and the smallest ``n`` making it negative."""
    if n < 2:
        raise ParameterOutOfRange(f"n = {n} must be at least 2")
    b = beta * E_c - math.log(n) + 2
    n_crit = math.ceil(math.exp(beta * E_c + 2))
    return SpatialFreeEnergy(n=n, beta_dF_bound=b, negative=b < 0, n_crit=max(2, n_crit))
