"""Noisy registers and circuits, and the decoherence calculators built on the modulus.

With contractivity modulus ``k`` the distance of an orbit to the fixed point
shrinks at least like ``k**n``.  If outcomes must be told apart to within
``eps`` (trace norm), at most ``n_max = log(eps/2) / log(k)`` noisy steps can
be afforded.  The functions here turn that relation around in the various
ways it gets used.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import Channel, as_channel, channel_from_json
from .contractivity import fixed_point
from .distance import trace_norm_distance
from .errors import DimensionMismatch, NoFixedPointFound, ParameterOutOfRange
from .linalg import dag, hermitize, is_unitary
from .qstate import DensityMatrix, as_matrix, make_density, matrix_from_json, von_neumann_entropy


@dataclass
class OrbitRecord:
    states: list
    distances_to_fixed_point: list | None = None
    pairwise_distance: list | None = None
    entropies: list = field(default_factory=list)
    fixed_point: DensityMatrix | None = None

    @property
    def steps(self) -> int:
        return len(self.states) - 1


def _unique_fixed_point(ch: Channel):
    try:
        rep = fixed_point(ch)
    except NoFixedPointFound:
        return None
    return rep.rho_fixed if rep.unique else None


def _record(states, partner_states, fp) -> OrbitRecord:
    rec = OrbitRecord(states=states, fixed_point=fp,
                      entropies=[von_neumann_entropy(s) for s in states])
    if fp is not None:
        rec.distances_to_fixed_point = [trace_norm_distance(s, fp) for s in states]
    if partner_states is not None:
        rec.pairwise_distance = [trace_norm_distance(a, b) for a, b in zip(states, partner_states)]
    return rec


def _orbit(step: Callable[[np.ndarray, int], np.ndarray], rho0: np.ndarray, n: int):
    out = [make_density(rho0, tol=1e-8)]
    cur = rho0
    for t in range(n):
        cur = hermitize(step(cur, t))
        out.append(make_density(cur, tol=1e-8))
    return out


def simulate_register(rho0, channel, n: int, partner=None) -> OrbitRecord:
    """Orbit ``rho_t = T^t(rho0)`` for ``t = 0..n``.

    ``partner`` is an optional second initial state evolved alongside, for
    pairwise distances.
    """
    ch = as_channel(channel)
    if n < 0:
        raise ParameterOutOfRange(f"n = {n} must be nonnegative")
    r0 = as_matrix(rho0)
    if not ch.is_square or r0.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatch(f"state of shape {r0.shape} vs channel {ch.dim_in}->{ch.dim_out}")
    step = lambda x, _t: ch.apply_matrix(x)
    states = _orbit(step, r0, n)
    partner_states = None
    if partner is not None:
        p0 = as_matrix(partner)
        if p0.shape != r0.shape:
            raise DimensionMismatch(f"partner shape {p0.shape} vs {r0.shape}")
        partner_states = _orbit(step, p0, n)
    return _record(states, partner_states, _unique_fixed_point(ch))


@dataclass
class NoisyCircuit:
    """Gates ``U_1..U_n`` each followed (or, with ``noise_first``, preceded) by ``noise``."""

    dim: int
    gates: list
    noise: Channel
    noise_first: bool = False

    def __post_init__(self):
        self.gates = [np.asarray(g, dtype=complex) for g in self.gates]
        for i, g in enumerate(self.gates):
            if g.shape != (self.dim, self.dim):
                raise DimensionMismatch(f"gate {i} has shape {g.shape}, expected {(self.dim, self.dim)}")
            if not is_unitary(g, 1e-9):
                raise ParameterOutOfRange(f"gate {i} is not unitary within 1e-9")
        self.noise = as_channel(self.noise)
        if (self.noise.dim_in, self.noise.dim_out) != (self.dim, self.dim):
            raise DimensionMismatch("noise channel does not act on the register")

    def step(self, rho: np.ndarray, i: int) -> np.ndarray:
        u = self.gates[i]
        if self.noise_first:
            return u @ self.noise.apply_matrix(rho) @ dag(u)
        return self.noise.apply_matrix(u @ rho @ dag(u))

    def is_static(self) -> bool:
        return all(np.allclose(g, self.gates[0], atol=1e-12) for g in self.gates[1:])

    def step_channel(self, i: int = 0) -> Channel:
        """The single-step map ``T o U_i`` (or ``U_i o T``) as a channel."""
        u = self.gates[i]
        if self.noise_first:
            ops = [u @ v for v in self.noise.kraus]
        else:
            ops = [v @ u for v in self.noise.kraus]
        return Channel(ops, name="circuit-step")

    @classmethod
    def from_json(cls, data: dict) -> "NoisyCircuit":
        gates = [matrix_from_json(g) for g in data["gates"]]
        return cls(dim=int(data["dim"]), gates=gates, noise=channel_from_json(data["noise"]),
                   noise_first=bool(data.get("noise_first", False)))


def simulate_circuit(rho0, circuit: NoisyCircuit, partner=None):
    """Run ``circuit`` on ``rho0``; returns the final state and the orbit."""
    r0 = as_matrix(rho0)
    if r0.shape != (circuit.dim, circuit.dim):
        raise DimensionMismatch(f"state of shape {r0.shape} vs circuit dim {circuit.dim}")
    n = len(circuit.gates)
    states = _orbit(circuit.step, r0, n)
    partner_states = _orbit(circuit.step, as_matrix(partner), n) if partner is not None else None
    fp = _unique_fixed_point(circuit.step_channel()) if n and circuit.is_static() else None
    return states[-1], _record(states, partner_states, fp)


# calculators

def _check_k(k: float, closed_low: bool = False):
    lo_ok = k >= 0 if closed_low else k > 0
    if not (lo_ok and k < 1):
        raise ParameterOutOfRange(f"k = {k} outside {'[0' if closed_low else '(0'}, 1)")


def _check_eps(eps: float):
    if not 0 < eps <= 2:
        raise ParameterOutOfRange(f"epsilon = {eps} outside (0, 2]")


def _snap(x: float, tol: float = 1e-9) -> float:
    r = round(x)
    return float(r) if abs(x - r) <= tol * max(1.0, abs(x)) else x


def n_max_ratio(k: float, eps: float) -> float:
    """``log(eps/2) / log(k)`` before any rounding."""
    _check_k(k)
    _check_eps(eps)
    return math.log(eps / 2) / math.log(k)


def n_max_operations(k: float, eps: float) -> int:
    """Smallest ``n`` with ``2 k**n <= eps``: ``ceil(log(eps/2)/log k)``."""
    return int(math.ceil(_snap(n_max_ratio(k, eps))))


@dataclass
class NMaxReport:
    k: float
    epsilon: float
    ratio: float
    n_max: int
    warnings: list

    def to_json(self) -> dict:
        return {"k": self.k, "epsilon": self.epsilon, "ratio": self.ratio,
                "n_max": self.n_max, "warnings": list(self.warnings)}


def n_max_report(k: float, eps: float) -> NMaxReport:
    ratio = _snap(n_max_ratio(k, eps))
    n = int(math.ceil(ratio))
    warnings = []
    if math.floor(ratio) != n:
        warnings.append(
            f"log(eps/2)/log(k) = {ratio:.4f} is not an integer: the ceiling gives {n}, "
            f"a floor-based count would report {math.floor(ratio)}, one step fewer")
    return NMaxReport(k=k, epsilon=eps, ratio=ratio, n_max=n, warnings=warnings)


def required_precision(k: float, depth: int) -> float:
    """``eps = 2 k**depth``: the precision needed to see the output after ``depth`` noisy steps."""
    _check_k(k)
    if depth < 0:
        raise ParameterOutOfRange(f"depth = {depth} must be nonnegative")
    return 2 * k ** depth


def threshold_error_rate(eps: float, depth: float) -> float:
    """Largest depolarizing rate ``1 - (eps/2)**(1/depth)`` that survives ``depth`` steps."""
    _check_eps(eps)
    if depth <= 0:
        raise ParameterOutOfRange(f"depth = {depth} must be positive")
    # expm1 keeps precision when depth is huge and the rate is tiny
    return -math.expm1(math.log(eps / 2) / depth)


DEPTH_FUNCTIONS: dict[str, Callable[[int], float]] = {
    "log n": lambda n: math.log2(n),
    "n": lambda n: float(n),
    "n^3": lambda n: float(n) ** 3,
    "sqrt(2^n)": lambda n: 2.0 ** (n / 2),
}
DEFAULT_EPSILON = 1e-17
DEFAULT_QUBITS = (20, 40, 60, 80, 100)


def format_sig(x: float, digits: int = 3) -> str:
    if x == 0 or not math.isfinite(x):
        return str(x)
    if 1e-3 <= abs(x) < 1e4:
        return f"{x:.{max(0, digits - 1 - math.floor(math.log10(abs(x))))}f}"
    return f"{x:.{digits - 1}e}"


@dataclass
class ThresholdTable:
    epsilon: float
    n_values: list
    rows: dict  # depth-function name -> list of rates

    def cell(self, name: str, n: int) -> float:
        return self.rows[name][self.n_values.index(n)]

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "n_values": list(self.n_values),
                "rows": {k: list(v) for k, v in self.rows.items()}}

    def to_csv(self, digits: int | None = 3) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["D(n)"] + [str(n) for n in self.n_values])
        for name, vals in self.rows.items():
            w.writerow([name] + [format_sig(v, digits) if digits else repr(v) for v in vals])
        return buf.getvalue()

    def render(self, digits: int = 3) -> str:
        head = ["D(n)"] + [str(n) for n in self.n_values]
        body = [[name] + [format_sig(v, digits) for v in vals] for name, vals in self.rows.items()]
        widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in [head] + body]
        return "\n".join(lines)


def threshold_table(eps: float = DEFAULT_EPSILON, n_values: Sequence[int] = DEFAULT_QUBITS,
                    depth_functions: dict | Sequence[str] | None = None) -> ThresholdTable:
    if depth_functions is None:
        funcs = DEPTH_FUNCTIONS
    elif isinstance(depth_functions, dict):
        funcs = depth_functions
    else:
        unknown = [n for n in depth_functions if n not in DEPTH_FUNCTIONS]
        if unknown:
            raise ParameterOutOfRange(f"unknown depth functions {unknown}; known: {list(DEPTH_FUNCTIONS)}")
        funcs = {n: DEPTH_FUNCTIONS[n] for n in depth_functions}
    rows = {name: [threshold_error_rate(eps, f(n)) for n in n_values] for name, f in funcs.items()}
    return ThresholdTable(epsilon=eps, n_values=list(n_values), rows=rows)


@dataclass
class NMRCase:
    N_S: float
    tau: float
    T_th: float
    epsilon_exact: float
    epsilon: float
    k: float
    n_max: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def nmr_case_study(N_S: float = 1e23, tau: float = 0.045, T_th: float = 2.8,
                   round_epsilon: bool = True) -> NMRCase:
    """Ensemble-readout precision ``1/(2 sqrt(N_S))`` against relaxation ``k = exp(-tau/2T_th)``.

    With ``round_epsilon`` the precision is rounded down to its power of ten
    before computing ``n_max``; the exact value is kept in ``epsilon_exact``.
    """
    for name, v in (("N_S", N_S), ("tau", tau), ("T_th", T_th)):
        if not v > 0:
            raise ParameterOutOfRange(f"{name} = {v} must be positive")
    eps_exact = 1 / (2 * math.sqrt(N_S))
    eps = 10.0 ** math.floor(math.log10(eps_exact)) if round_epsilon else eps_exact
    k = math.exp(-tau / (2 * T_th))
    n_max = math.inf if k >= 1 else math.log(eps / 2) / math.log(k)
    return NMRCase(N_S=N_S, tau=tau, T_th=T_th, epsilon_exact=eps_exact, epsilon=eps,
                   k=k, n_max=n_max)
