import json
import math

import numpy as np
import pytest

from conftest import kraus_apply
from qchan.channel import (Channel, ChoiMatrix, adjoint_channel, amplitude_damping, ancilla_dilation,
                           apply, apply_via_choi, apply_via_dilation, cb_bounds,
                           cb_distance_lower_estimate, channel_fidelity, channel_from_json,
                           choi_from_map, choi_to_kraus, compose, convex_combination, degenerate,
                           depolarizing, fcb_bounds, identity, king_ruskai_decompose, kraus_to_choi,
                           pauli_transfer, phase_damping, stinespring_isometry, tensor_channels,
                           thermalizing, trace_out_environment, transpose_choi, two_pauli,
                           unitary_channel, validate_choi)
from qchan.errors import (ChoiNotPSD, DimensionMismatch, InvalidChannel, ParameterOutOfRange,
                          TraceConditionViolated)
from qchan.linalg import SX, SY, SZ
from qchan.rand import random_density, random_kraus, random_unitary

PAULIS = (np.eye(2), SX, SY, SZ)


def random_channel(d, rng, n_kraus=3):
    return Channel(random_kraus(d, d, n_kraus, rng))


def builtins():
    return [identity(2), depolarizing(2, 0.3), depolarizing(3, 0.4), two_pauli(0.6),
            amplitude_damping(0.25), thermalizing(1.0, 0.5, 0.3), phase_damping(0.7),
            degenerate(np.diag([0.3, 0.7]))]


def test_kraus_condition_enforced():
    with pytest.raises(TraceConditionViolated):
        Channel([np.eye(2), np.eye(2)])
    with pytest.raises(DimensionMismatch):
        Channel([np.eye(2), np.eye(3)])
    assert Channel([2 * np.eye(2)], validate=False).dim_in == 2


def test_apply_matches_kraus_oracle(rng):
    for _ in range(20):
        ch = random_channel(3, rng)
        rho = random_density(3, rng)
        assert np.allclose(apply(ch, rho).matrix, kraus_apply(ch.kraus, rho), atol=1e-12)
    with pytest.raises(DimensionMismatch):
        apply(identity(2), np.eye(3) / 3)


def test_identity_and_unitary_channels(rng):
    rho = random_density(2, rng)
    assert np.allclose(apply(identity(2), rho).matrix, rho)
    u = random_unitary(2, rng)
    assert np.allclose(apply(unitary_channel(u), rho).matrix, u @ rho @ u.conj().T)
    with pytest.raises(InvalidChannel):
        unitary_channel(2 * np.eye(2))


def test_depolarizing_action(rng):
    for d in (2, 3, 4):
        rho = random_density(d, rng)
        out = apply(depolarizing(d, 0.37), rho).matrix
        assert np.allclose(out, 0.63 * rho + 0.37 * np.eye(d) / d, atol=1e-12)


def test_depolarizing_choi_eigenvalues():
    p = 0.3
    ev = np.sort(np.linalg.eigvalsh(depolarizing(2, p).choi.normalized_matrix()))
    assert np.allclose(ev, np.sort([1 - 3 * p / 4, p / 4, p / 4, p / 4]), atol=1e-12)


def test_choi_kraus_roundtrip(rng):
    for ch in builtins() + [random_channel(3, rng, 4)]:
        back = Channel(choi_to_kraus(ch.choi))
        assert len(back.kraus) <= ch.dim_in * ch.dim_out
        rho = random_density(ch.dim_in, rng)
        assert np.allclose(back.apply_matrix(rho), ch.apply_matrix(rho), atol=1e-9)
        assert np.allclose(kraus_to_choi(back).raw(), ch.choi.raw(), atol=1e-9)


def test_choi_from_map_and_validation(rng):
    ch = random_channel(2, rng)
    choi = choi_from_map(ch.apply_matrix, 2)
    assert np.allclose(choi.raw(), ch.choi.raw(), atol=1e-12)
    assert validate_choi(choi) >= -1e-8
    # transposition: flip operator with eigenvalue -1
    flip = transpose_choi(2)
    assert abs(np.linalg.eigvalsh(flip.raw())[0] + 1) < 1e-12
    with pytest.raises(ChoiNotPSD, match="-1.000e\\+00"):
        validate_choi(flip)
    with pytest.raises(TraceConditionViolated):
        validate_choi(ChoiMatrix(2 * ch.choi.raw(), 2, 2))


def test_representation_consistency(rng):
    chans = builtins() + [random_channel(d, rng, int(rng.integers(1, 5))) for d in (2, 3, 4)]
    for ch in chans:
        rho = random_density(ch.dim_in, rng)
        a = apply(ch, rho).matrix
        b = apply_via_choi(ch.choi, rho).matrix
        c = trace_out_environment(stinespring_isometry(ch), rho, ch.dim_out)
        u, omega = ancilla_dilation(ch)
        e = apply_via_dilation(u, omega.amplitudes, rho)
        assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-9)
        for other in (b, c, e):
            assert np.max(np.abs(a - other)) < 1e-9


def test_isometry_property(rng):
    ch = random_channel(3, rng, 4)
    v = stinespring_isometry(ch)
    assert np.allclose(v.conj().T @ v, np.eye(3), atol=1e-12)


def test_compose_order(rng):
    u, w = random_unitary(2, rng), random_unitary(2, rng)
    rho = random_density(2, rng)
    out = apply(compose(unitary_channel(u), unitary_channel(w)), rho).matrix
    assert np.allclose(out, u @ w @ rho @ w.conj().T @ u.conj().T, atol=1e-12)
    big = compose(random_channel(2, rng, 4), random_channel(2, rng, 4))
    assert len(big.kraus) <= 4
    with pytest.raises(DimensionMismatch):
        compose(identity(2), identity(3))


def test_tensor_channels(rng):
    a, b = random_channel(2, rng), random_channel(3, rng)
    x, y = random_density(2, rng), random_density(3, rng)
    out = apply(tensor_channels(a, b), np.kron(x, y)).matrix
    assert np.allclose(out, np.kron(a.apply_matrix(x), b.apply_matrix(y)), atol=1e-12)


def test_convex_combination(rng):
    a, b = random_channel(2, rng), random_channel(2, rng)
    rho = random_density(2, rng)
    out = convex_combination([a, b], [0.3, 0.7]).apply_matrix(rho)
    assert np.allclose(out, 0.3 * a.apply_matrix(rho) + 0.7 * b.apply_matrix(rho), atol=1e-12)


def test_adjoint_duality(rng):
    for _ in range(10):
        ch = random_channel(3, rng)
        adj = adjoint_channel(ch)
        x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        lhs = np.trace(ch.apply_matrix(x) @ a)
        rhs = np.trace(x @ adj.apply_matrix(a))
        assert abs(lhs - rhs) < 1e-10
        # unital in the Heisenberg picture
        assert np.allclose(adj.apply_matrix(np.eye(3)), np.eye(3), atol=1e-10)


def test_ptm_examples():
    assert np.allclose(pauli_transfer(identity(2)).matrix, np.eye(4))
    p = 0.4
    assert np.allclose(pauli_transfer(depolarizing(2, p)).matrix, np.diag([1, 1 - p, 1 - p, 1 - p]))
    g = 0.3
    ptm = pauli_transfer(amplitude_damping(g))
    assert np.allclose(ptm.T_tilde, np.diag([math.sqrt(1 - g), math.sqrt(1 - g), 1 - g]))
    assert np.allclose(ptm.u, [0, 0, g])
    with pytest.raises(DimensionMismatch):
        pauli_transfer(identity(3))


def test_ptm_matches_trace_oracle(rng):
    ch = random_channel(2, rng)
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            expected = 0.5 * np.trace(si @ kraus_apply(ch.kraus, sj))
            assert abs(ch.ptm.matrix[i, j] - expected.real) < 1e-12


def test_king_ruskai(rng):
    kr = king_ruskai_decompose(depolarizing(2, 0.3))
    assert np.allclose(kr.t, 0) and np.allclose(np.abs(kr.v), 0.7)
    ch = Channel([np.diag([1, math.sqrt(0.5)]), np.array([[0, math.sqrt(0.5)], [0, 0]])])
    kr = king_ruskai_decompose(ch)
    assert np.allclose(kr.U, np.eye(2)) and np.allclose(kr.V, np.eye(2))
    assert np.allclose(kr.v, [math.sqrt(0.5), math.sqrt(0.5), 0.5])
    for _ in range(10):
        ch = random_channel(2, rng, int(rng.integers(1, 5)))
        kr = king_ruskai_decompose(ch)
        assert abs(np.max(np.abs(kr.v)) - np.linalg.svd(ch.ptm.T_tilde, compute_uv=False)[0]) < 1e-9
        for _ in range(50):
            rho = random_density(2, rng)
            assert np.max(np.abs(kr.apply_matrix(rho) - ch.apply_matrix(rho))) < 1e-7


def test_king_ruskai_theta_pi_branch():
    # a pi rotation about x on both sides
    ch = unitary_channel(SX)
    kr = king_ruskai_decompose(ch)
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    assert np.allclose(kr.apply_matrix(rho), SX @ rho @ SX, atol=1e-9)


def test_channel_fidelity_examples(rng):
    ch = random_channel(2, rng)
    assert abs(channel_fidelity(ch, ch) - 1) < 1e-9
    assert abs(channel_fidelity(identity(2), unitary_channel(SX))) < 1e-12
    for _ in range(10):
        u, v = random_unitary(3, rng), random_unitary(3, rng)
        expected = abs(np.trace(u.conj().T @ v)) ** 2 / 9
        assert abs(channel_fidelity(unitary_channel(u), unitary_channel(v)) - expected) < 1e-9
    for p in (0.0, 0.2, 0.9):
        assert abs(channel_fidelity(depolarizing(2, p), identity(2)) - (1 - 3 * p / 4)) < 1e-9


def test_channel_fidelity_axioms(rng):
    for _ in range(20):
        s1, s2, t1, t2, r = (random_channel(2, rng) for _ in range(5))
        f = channel_fidelity(s1, t1)
        assert abs(f - channel_fidelity(t1, s1)) < 1e-8
        prod = channel_fidelity(tensor_channels(s1, s2), tensor_channels(t1, t2))
        assert abs(prod - f * channel_fidelity(s2, t2)) < 1e-8
        u = unitary_channel(random_unitary(2, rng))
        assert abs(channel_fidelity(compose(u, s1), compose(u, t1)) - f) < 1e-8
        assert channel_fidelity(compose(s1, r), compose(t1, r)) >= f - 1e-8


def test_single_isometry_fidelity(rng):
    # aligned Kraus sets with a common environment: F = |tr(V^dag W)|^2 / d^2
    for _ in range(10):
        u, w = random_unitary(2, rng), random_unitary(2, rng)
        iso_v, iso_w = u, w
        expected = abs(np.trace(iso_v.conj().T @ iso_w)) ** 2 / 4
        assert abs(channel_fidelity(Channel([iso_v]), Channel([iso_w])) - expected) < 1e-8


def test_cb_bounds(rng):
    ch = random_channel(2, rng)
    assert cb_bounds(ch, ch)[0] == pytest.approx(0, abs=1e-7)
    for _ in range(5):
        s, t = random_channel(2, rng), random_channel(2, rng)
        est = cb_distance_lower_estimate(s, t, samples=50, seed=1)
        assert est >= cb_bounds(s, t)[0] - 1e-9
        assert est <= 2 + 1e-12
    lo, hi = fcb_bounds(depolarizing(2, 0.2), cb_distance=0.3)
    assert lo == pytest.approx(0.85 ** 2) and hi == pytest.approx(1 - 0.09 / 16)
    f = channel_fidelity(depolarizing(2, 0.2), identity(2))
    assert f <= fcb_bounds(depolarizing(2, 0.2), samples=100)[1] + 1e-9


def test_constructor_ranges():
    for fn, arg in ((lambda p: depolarizing(2, p), 1.5), (two_pauli, -0.1),
                    (amplitude_damping, 2), (phase_damping, -1)):
        with pytest.raises(ParameterOutOfRange):
            fn(arg)
    with pytest.raises(ParameterOutOfRange):
        thermalizing(-1, 1, 0.5)
    with pytest.raises(ParameterOutOfRange):
        thermalizing(1, 0, 0.5)


def test_constructor_examples(rng):
    rho = random_density(2, rng)
    full = depolarizing(2, 1).apply_matrix(rho)
    assert np.allclose(full, degenerate(np.eye(2) / 2).apply_matrix(rho), atol=1e-12)
    k = two_pauli(0.6).kraus
    assert np.allclose(k[0], math.sqrt(0.6) * np.eye(2))
    assert np.allclose(k[1], math.sqrt(0.2) * SX)
    assert np.allclose(k[2], -1j * math.sqrt(0.2) * SY)
    assert two_pauli(0.6).trace_defect() < 1e-12
    beta, e = 0.8, 1.3
    gibbs = np.diag(np.exp([-beta * e, beta * e])) / (2 * math.cosh(beta * e))
    assert np.allclose(thermalizing(beta, e, 0.4).apply_matrix(gibbs), gibbs, atol=1e-12)
    pd = phase_damping(0.3)
    assert np.allclose(pd.kraus[1], math.sqrt(0.7) * SZ)
    sigma = random_density(3, rng)
    assert np.allclose(degenerate(sigma).apply_matrix(random_density(3, rng)), sigma, atol=1e-12)


def test_json_loading(rng):
    ch = random_channel(2, rng)
    back = channel_from_json(json.loads(json.dumps(ch.to_json())))
    assert np.allclose(back.choi.raw(), ch.choi.raw())
    dep = channel_from_json({"builtin": "depolarizing", "params": {"d": 2, "p": 0.1}})
    assert np.allclose(dep.ptm.matrix, np.diag([1, 0.9, 0.9, 0.9]))
    with pytest.raises(InvalidChannel):
        channel_from_json({"builtin": "nope"})
    with pytest.raises(InvalidChannel):
        channel_from_json({"builtin": "two_pauli", "params": {"q": 1}})


def test_bistochastic_flags():
    assert depolarizing(2, 0.2).is_bistochastic()
    assert not amplitude_damping(0.2).is_bistochastic()
