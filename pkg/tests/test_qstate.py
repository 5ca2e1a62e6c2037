import math

import numpy as np
import pytest

from conftest import loop_kron, loop_partial_trace
from qchan.errors import (BlochOutOfBall, DimensionMismatch, NotHermitian, NotNormalized,
                          NotPositive, TraceNotOne)
from qchan.qstate import (DensityMatrix, basis_state, bloch_from_density, density_from_bloch,
                          is_maximally_entangled, make_density, make_pure, maximally_mixed,
                          partial_trace, purify, relative_entropy, schmidt, tensor_states,
                          von_neumann_entropy)
from qchan.rand import random_density, random_pure, random_unitary

BELL = [np.array(v, dtype=complex) / math.sqrt(2) for v in
        ([1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0])]


def test_make_density_accepts_maximally_mixed():
    rho = make_density(np.eye(2) / 2)
    assert rho.dim == 2
    assert np.allclose(rho.eigenvalues, [0.5, 0.5])


@pytest.mark.parametrize("matrix, err", [
    (np.diag([1.2, -0.2]), NotPositive),
    (np.array([[0.5, 0.3], [0.1, 0.5]]), NotHermitian),
    (np.eye(2), TraceNotOne),
    (np.ones((2, 3)) / 2, DimensionMismatch),
])
def test_make_density_rejects(matrix, err):
    with pytest.raises(err):
        make_density(matrix)


def test_make_density_message_names_magnitude():
    with pytest.raises(NotPositive, match="-2.000e-01"):
        make_density(np.diag([1.2, -0.2]))


def test_roundoff_negative_is_clamped():
    rho = make_density(np.diag([1 + 5e-10, -5e-10]))
    assert rho.eigenvalues.min() >= 0


def test_random_state_eigenvalues_match_eigensolver(rng):
    for d in (2, 3, 5):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        m = g @ g.conj().T
        m = m / np.trace(m).real
        rho = make_density(m)
        # independent path: characteristic polynomial roots
        roots = np.sort(np.roots(np.poly(m)).real)
        assert np.allclose(rho.eigenvalues, roots, atol=1e-9)


def test_density_is_immutable():
    rho = maximally_mixed(2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_json_roundtrip(rng):
    rho = make_density(random_density(3, rng))
    back = DensityMatrix.from_json(rho.to_json())
    assert np.array_equal(back.matrix, rho.matrix)
    assert rho.to_json()["dim"] == 3


def test_pure_state_normalisation():
    with pytest.raises(NotNormalized):
        make_pure([1, 1])
    assert make_pure(np.array([1, 1]) / math.sqrt(2)).density().is_pure()


def test_tensor_states_examples(rng):
    assert np.allclose(tensor_states(maximally_mixed(2), maximally_mixed(2)).matrix, np.eye(4) / 4)
    p = tensor_states(basis_state(0, 2), basis_state(1, 2)).matrix
    expected = np.zeros((4, 4))
    expected[1, 1] = 1
    assert np.allclose(p, expected)
    a, b = random_density(2, rng), random_density(3, rng)
    assert np.allclose(tensor_states(a, b).matrix, loop_kron(a, b), atol=1e-14)


@pytest.mark.parametrize("keep", [0, 1])
def test_partial_trace_bell_is_maximally_mixed(keep):
    rho = np.outer(BELL[0], BELL[0].conj())
    assert np.allclose(partial_trace(rho, (2, 2), keep).matrix, np.eye(2) / 2)


def test_partial_trace_product_and_oracle(rng):
    a, b = random_density(2, rng), random_density(3, rng)
    assert np.allclose(partial_trace(np.kron(a, b), (2, 3), "A").matrix, a, atol=1e-10)
    assert np.allclose(partial_trace(np.kron(a, b), (2, 3), "B").matrix, b, atol=1e-10)
    m = random_density(6, rng)
    for keep in (0, 1):
        assert np.allclose(partial_trace(m, (2, 3), keep).matrix,
                           loop_partial_trace(m, 2, 3, keep), atol=1e-10)
    with pytest.raises(DimensionMismatch):
        partial_trace(m, (2, 2))


def test_purify_pure_state_has_schmidt_number_one(rng):
    psi = random_pure(3, rng)
    big = purify(np.outer(psi, psi.conj()))
    assert big.dim == 3
    assert schmidt(big.amplitudes, (3, 1)).schmidt_number == 1


def test_purify_maximally_mixed_qubit_is_maximally_entangled():
    big = purify(np.eye(2) / 2)
    ok, _ = is_maximally_entangled(big.amplitudes, (2, 2))
    assert ok


def test_purify_roundtrip(rng):
    for d in (2, 3, 4):
        for rank in (1, 2, d):
            rho = random_density(d, rng, rank=min(rank, d))
            big = purify(rho)
            r = big.dim // d
            reduced = partial_trace(np.outer(big.amplitudes, big.amplitudes.conj()), (d, r), 0)
            assert np.allclose(reduced.matrix, rho, atol=1e-10)
            assert r == np.linalg.matrix_rank(rho, tol=1e-9)


def test_schmidt_examples(rng):
    phi, chi = random_pure(2, rng), random_pure(3, rng)
    dec = schmidt(np.kron(phi, chi), (2, 3))
    assert dec.schmidt_number == 1 and abs(dec.coefficients[0] - 1) < 1e-9
    bell = schmidt(BELL[0], (2, 2))
    assert np.allclose(bell.coefficients, [1 / math.sqrt(2)] * 2)
    v = random_pure(12, rng)
    dec = schmidt(v, (3, 4))
    assert abs(np.sum(dec.coefficients ** 2) - 1) < 1e-9
    assert np.allclose(dec.reconstruct(), v, atol=1e-9)
    assert np.allclose(dec.left_vectors.conj().T @ dec.left_vectors, np.eye(3), atol=1e-9)
    assert np.allclose(dec.right_vectors.conj().T @ dec.right_vectors, np.eye(3), atol=1e-9)
    # coefficients are square roots of reduced-state eigenvalues
    red = partial_trace(np.outer(v, v.conj()), (3, 4), 0)
    assert np.allclose(np.sort(dec.coefficients ** 2), np.sort(red.eigenvalues), atol=1e-9)
    with pytest.raises(DimensionMismatch):
        schmidt(v, (2, 5))


def test_maximally_entangled(rng):
    for b in BELL:
        assert is_maximally_entangled(b, (2, 2))[0]
    assert not is_maximally_entangled(np.kron([1, 0], [0, 1]), (2, 2))[0]
    u = random_unitary(3, rng)
    ok, w = is_maximally_entangled(u.reshape(-1) / math.sqrt(3), (3, 3))
    assert ok and np.allclose(w, u, atol=1e-9)
    with pytest.raises(DimensionMismatch):
        is_maximally_entangled(np.ones(6) / math.sqrt(6), (2, 3))


def test_bloch_examples(rng):
    assert np.allclose(bloch_from_density(np.eye(2) / 2), 0)
    assert np.allclose(bloch_from_density(basis_state(0, 2)), [0, 0, 1])
    assert np.allclose(density_from_bloch([0, 0, 1]).matrix, basis_state(0, 2).matrix)
    for _ in range(20):
        rho = random_density(2, rng)
        assert np.allclose(density_from_bloch(bloch_from_density(rho)).matrix, rho, atol=1e-12)
    a, b = random_density(2, rng), random_density(2, rng)
    delta = bloch_from_density(a) - bloch_from_density(b)
    tn = np.sum(np.abs(np.linalg.eigvalsh(a - b)))
    assert abs(tn - np.linalg.norm(delta)) < 1e-10
    with pytest.raises(BlochOutOfBall):
        density_from_bloch([1, 1, 0])
    with pytest.raises(DimensionMismatch):
        bloch_from_density(np.eye(3) / 3)


def test_entropy_examples(rng):
    assert von_neumann_entropy(basis_state(1, 3)) == 0
    assert abs(von_neumann_entropy(maximally_mixed(5)) - math.log(5)) < 1e-12
    expected = -(0.75 * math.log(0.75) + 0.25 * math.log(0.25))
    assert abs(von_neumann_entropy(np.diag([0.75, 0.25])) - 0.5623) < 1e-4
    assert abs(von_neumann_entropy(np.diag([0.75, 0.25])) - expected) < 1e-12
    for _ in range(50):
        d = int(rng.integers(2, 6))
        s = von_neumann_entropy(random_density(d, rng))
        assert -1e-12 <= s <= math.log(d) + 1e-12


def test_relative_entropy_examples(rng):
    rho = random_density(3, rng)
    assert abs(relative_entropy(rho, rho)) < 1e-10
    assert abs(relative_entropy(basis_state(0, 2), np.eye(2) / 2) - math.log(2)) < 1e-12
    assert relative_entropy(np.eye(2) / 2, basis_state(0, 2)) == math.inf
    with pytest.raises(DimensionMismatch):
        relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


def test_streater_hs_bound_on_random_pairs(rng):
    worst = math.inf
    for _ in range(1000):
        d = int(rng.integers(2, 6))
        a, b = random_density(d, rng), random_density(d, rng)
        diff = a - b
        worst = min(worst, relative_entropy(a, b) - 0.5 * np.trace(diff @ diff).real)
    assert worst >= -1e-10
