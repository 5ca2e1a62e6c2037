from collections import Counter

import numpy as np
import pytest

from qchan.errors import ParameterOutOfRange
from qchan.toric import (PauliString, build_lattice, check_commutation, commutes, gf2_rank,
                         ground_space_degeneracy_bruteforce, protected_dimension)


def matrices_commute(a, b):
    ma, mb = a.matrix(), b.matrix()
    return np.allclose(ma @ mb, mb @ ma)


def test_lattice_sizes():
    lat = build_lattice(2)
    assert lat.n == 8 and len(lat.vertex_stabilizers) == 4 and len(lat.face_stabilizers) == 4
    assert build_lattice(3).n == 18
    with pytest.raises(ParameterOutOfRange):
        build_lattice(1)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_weights_and_incidence(k):
    lat = build_lattice(k)
    assert all(p.weight("X") == 4 and p.weight("Z") == 0 for p in lat.vertex_stabilizers)
    assert all(p.weight("Z") == 4 and p.weight("X") == 0 for p in lat.face_stabilizers)
    for group, letter in ((lat.vertex_stabilizers, "X"), (lat.face_stabilizers, "Z")):
        counts = Counter(q for p in group for q, c in enumerate(p.symbols) if c == letter)
        assert sorted(counts) == list(range(lat.n))
        assert set(counts.values()) == {2}


@pytest.mark.parametrize("k", [2, 3, 4])
def test_product_relations(k):
    lat = build_lattice(k)
    for group in (lat.vertex_stabilizers, lat.face_stabilizers):
        rows = np.array([p.symplectic() for p in group])
        assert not np.any(rows.sum(axis=0) % 2)


def test_commutation_k2():
    rep = check_commutation(build_lattice(2))
    assert rep.all_commute and rep.pairs_checked == 28 and rep.offending_pairs == []


def test_symplectic_commutation_matches_matrices():
    lat = build_lattice(2)
    gens = lat.stabilizers
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            assert commutes(a, b) == matrices_commute(a, b)
    x = PauliString(("X", "I"))
    z = PauliString(("Z", "I"))
    y = PauliString(("Y", "Z"))
    assert not commutes(x, z) and not matrices_commute(x, z)
    assert commutes(y, y)
    assert commutes(x, y) == matrices_commute(x, y)


def test_mutation_detected():
    lat = build_lattice(2)
    gens = list(lat.stabilizers)
    victim = gens[0]
    support = [q for q, c in enumerate(victim.symbols) if c == "X"]
    free = next(q for q in range(lat.n) if q not in support)
    moved = PauliString.from_support(lat.n, support[1:] + [free], "X")
    gens[0] = moved
    rep = check_commutation(gens)
    assert not rep
    assert rep.offending_pairs and all(0 in pair for pair in rep.offending_pairs)
    for i, j in rep.offending_pairs:
        assert not matrices_commute(gens[i], gens[j])


def test_vertex_pairs_commute():
    lat = build_lattice(3)
    assert check_commutation(lat.vertex_stabilizers).all_commute


@pytest.mark.parametrize("k, rank", [(2, 6), (3, 16), (4, 30)])
def test_protected_dimension(k, rank):
    rep = protected_dimension(build_lattice(k))
    assert rep.independent_count == rank == 2 * k * k - 2
    assert rep.code_dimension == 4


def test_duplicate_generator_keeps_rank():
    lat = build_lattice(3)
    gens = lat.stabilizers + [lat.stabilizers[5]]
    assert protected_dimension(gens).independent_count == protected_dimension(lat).independent_count


def test_gf2_rank_oracle(rng):
    # brute force: rank = log2 of the size of the row span
    for _ in range(20):
        m = rng.integers(0, 2, size=(5, 6))
        span = {tuple((np.array(c) @ m) % 2) for c in np.ndindex(*(2,) * 5)}
        assert 2 ** gf2_rank(m) == len(span)


def test_bruteforce_ground_space():
    rep = ground_space_degeneracy_bruteforce(2)
    assert rep.degeneracy == 4 == protected_dimension(build_lattice(2)).code_dimension
    assert abs(rep.ground_energy + 8) < 1e-9
    assert rep.gap >= 2
    assert rep.max_stabilizer_violation < 1e-9
    lat = build_lattice(2)
    for p in lat.stabilizers:
        m = p.matrix()
        assert np.allclose(m @ rep.ground_vectors, rep.ground_vectors, atol=1e-9)
    with pytest.raises(ParameterOutOfRange):
        ground_space_degeneracy_bruteforce(3)


def test_json_dump():
    data = build_lattice(2).to_json()
    assert data["n"] == 8
    assert data["vertex_stabilizers"][0].replace(" ", "").count("X") == 4
    assert all(len(s.split()) == 2 for s in data["face_stabilizers"])
