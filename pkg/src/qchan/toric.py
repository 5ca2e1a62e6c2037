"""Toric-code stabilizers on a periodic k x k lattice.

Qubits live on edges.  The horizontal edge leaving vertex ``(x, y)`` has
index ``2*(y*k + x)`` and the vertical one ``2*(y*k + x) + 1``.  Star
operators ``A_v`` are products of X on the four edges meeting at ``v``;
plaquette operators ``B_F`` are products of Z around the face whose
lower-left corner is ``F``.  The protected subspace is their joint +1
eigenspace.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterOutOfRange
from .linalg import I2, SX, SY, SZ

_MATS = {"I": I2, "X": SX, "Y": SY, "Z": SZ}


@dataclass(frozen=True)
class PauliString:
    symbols: tuple
    sign: int = 1

    @classmethod
    def from_support(cls, n: int, support, letter: str) -> "PauliString":
        s = ["I"] * n
        for q in support:
            s[q] = letter
        return cls(tuple(s))

    @property
    def n(self) -> int:
        return len(self.symbols)

    def symplectic(self) -> np.ndarray:
        """``(x | z)`` bit row of length ``2n``."""
        x = np.array([c in "XY" for c in self.symbols], dtype=np.uint8)
        z = np.array([c in "ZY" for c in self.symbols], dtype=np.uint8)
        return np.concatenate([x, z])

    def weight(self, letter: str) -> int:
        return sum(c == letter for c in self.symbols)

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for c in self.symbols:
            out = np.kron(out, _MATS[c])
        return self.sign * out

    def text(self, group: int | None = None) -> str:
        s = "".join(self.symbols)
        if group:
            s = " ".join(s[i:i + group] for i in range(0, len(s), group))
        return ("-" if self.sign < 0 else "") + s


def commutes(a: PauliString, b: PauliString) -> bool:
    ra, rb = a.symplectic(), b.symplectic()
    n = a.n
    return int(ra[:n] @ rb[n:] + ra[n:] @ rb[:n]) % 2 == 0


@dataclass
class ToricLattice:
    k: int
    vertex_stabilizers: list
    face_stabilizers: list

    @property
    def n(self) -> int:
        return 2 * self.k ** 2

    @property
    def stabilizers(self) -> list:
        return list(self.vertex_stabilizers) + list(self.face_stabilizers)

    def to_json(self) -> dict:
        g = 2 * self.k
        return {"k": self.k, "n": self.n,
                "vertex_stabilizers": [p.text(g) for p in self.vertex_stabilizers],
                "face_stabilizers": [p.text(g) for p in self.face_stabilizers]}


def edge(k: int, x: int, y: int, direction: int) -> int:
    return 2 * ((y % k) * k + (x % k)) + direction


def star(k: int, x: int, y: int) -> list[int]:
    return [edge(k, x, y, 0), edge(k, x - 1, y, 0), edge(k, x, y, 1), edge(k, x, y - 1, 1)]


def boundary(k: int, x: int, y: int) -> list[int]:
    return [edge(k, x, y, 0), edge(k, x, y + 1, 0), edge(k, x, y, 1), edge(k, x + 1, y, 1)]


def build_lattice(k: int) -> ToricLattice:
    if k < 2:
        raise ParameterOutOfRange(f"lattice size k = {k} must be at least 2")
    n = 2 * k * k
    verts = [PauliString.from_support(n, star(k, x, y), "X") for y in range(k) for x in range(k)]
    faces = [PauliString.from_support(n, boundary(k, x, y), "Z") for y in range(k) for x in range(k)]
    return ToricLattice(k=k, vertex_stabilizers=verts, face_stabilizers=faces)


@dataclass
class CommutationReport:
    all_commute: bool
    pairs_checked: int
    offending_pairs: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.all_commute


def check_commutation(lattice_or_generators) -> CommutationReport:
    gens = (lattice_or_generators.stabilizers if isinstance(lattice_or_generators, ToricLattice)
            else list(lattice_or_generators))
    bad = []
    count = 0
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            count += 1
            if not commutes(gens[i], gens[j]):
                bad.append((i, j))
    return CommutationReport(all_commute=not bad, pairs_checked=count, offending_pairs=bad)


def gf2_rank(rows: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    m = np.array(rows, dtype=np.uint8) % 2
    rank = 0
    n_rows, n_cols = m.shape
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if m[r, col]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        hits = np.nonzero(m[:, col])[0]
        hits = hits[hits != rank]
        m[hits] ^= m[rank]
        rank += 1
        if rank == n_rows:
            break
    return rank


@dataclass
class StabilizerGroupReport:
    n: int
    generator_count: int
    independent_count: int
    code_dimension: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def protected_dimension(lattice_or_generators) -> StabilizerGroupReport:
    gens = (lattice_or_generators.stabilizers if isinstance(lattice_or_generators, ToricLattice)
            else list(lattice_or_generators))
    n = gens[0].n
    rank = gf2_rank(np.array([g.symplectic() for g in gens]))
    return StabilizerGroupReport(n=n, generator_count=len(gens), independent_count=rank,
                                 code_dimension=2 ** (n - rank))


@dataclass
class GroundSpaceReport:
    degeneracy: int
    ground_energy: float
    gap: float
    ground_vectors: np.ndarray
    max_stabilizer_violation: float


def ground_space_degeneracy_bruteforce(k: int = 2, tol: float = 1e-8) -> GroundSpaceReport:
    """Dense diagonalisation of ``H = -sum A_v - sum B_F`` (only k = 2 fits)."""
    if k != 2:
        raise ParameterOutOfRange(f"brute force is limited to k = 2 (got k = {k})")
    lat = build_lattice(k)
    mats = [p.matrix() for p in lat.stabilizers]
    h = -sum(mats)
    w, v = np.linalg.eigh(h)
    ground = w[0]
    deg = int(np.sum(w <= ground + tol))
    gap = float(w[deg] - ground) if deg < w.size else float("inf")
    vecs = v[:, :deg]
    viol = max(float(np.max(np.abs(m @ vecs - vecs))) for m in mats)
    return GroundSpaceReport(degeneracy=deg, ground_energy=float(ground), gap=gap,
                             ground_vectors=vecs, max_stabilizer_violation=viol)
