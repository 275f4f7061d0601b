import math
from functools import reduce
from itertools import product

import numpy as np
import pytest

from mixzne.errors import CapacityError, InvalidFoldError, InvalidInputError, InvalidProbabilityError
from mixzne.qsim import (
    CircuitSpec,
    DensityMatrix,
    GateOp,
    SpinGraph,
    apply_gate,
    build_trotter_circuit,
    circuit_noise_level,
    default_cluster,
    depolarize,
    exact_evolution,
    fold_circuit,
    magnetization_expectation,
    run_circuit,
    sample_magnetization,
)
from mixzne.qsim.dynamics import derive_seed, make_rng

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)


def embed(ops, n):
    return reduce(np.kron, [ops.get(q, I2) for q in range(n)])


def dense_unitary(gate, n):
    a = gate.angle
    if gate.kind == "RX":
        return embed({gate.targets[0]: math.cos(a / 2) * I2 - 1j * math.sin(a / 2) * X}, n)
    if gate.kind == "RZ":
        return embed({gate.targets[0]: math.cos(a / 2) * I2 - 1j * math.sin(a / 2) * Z}, n)
    c, t = gate.targets
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    return embed({c: p0}, n) + embed({c: p1, t: X}, n)


def twirl_depolarize(rho, targets, p, n):
    """Oracle: (1 - p) rho + p * mean over Pauli strings P on targets of P rho P."""
    out = np.zeros_like(rho)
    strings = list(product([I2, X, Y, Z], repeat=len(targets)))
    for paulis in strings:
        op = embed(dict(zip(targets, paulis)), n)
        out += op @ rho @ op.conj().T
    return (1 - p) * rho + p * out / len(strings)


def random_state(rng, n, rank=None):
    dim = 2**n
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return DensityMatrix(n, rho / np.trace(rho))


def random_gate(rng, n, p=None):
    kind = rng.choice(["RX", "RZ", "CNOT"])
    prob = float(rng.uniform(0, 1)) if p is None else p
    if kind == "CNOT":
        c, t = rng.choice(n, size=2, replace=False)
        return GateOp("CNOT", (int(c), int(t)), 0.0, prob)
    return GateOp(str(kind), (int(rng.integers(n)),), float(rng.uniform(-2 * np.pi, 2 * np.pi)), prob)


# ---------------------------------------------------------------- gates


def test_rx_zero_is_identity(rng):
    rho = random_state(rng, 3)
    out = apply_gate(rho, GateOp("RX", (1,), 0.0))
    np.testing.assert_allclose(out.data, rho.data, atol=1e-15)


def test_cnot_basis_action():
    rho = DensityMatrix.basis(2, 0b10)
    out = apply_gate(rho, GateOp("CNOT", (0, 1)))
    np.testing.assert_allclose(out.data, DensityMatrix.basis(2, 0b11).data)
    out = apply_gate(DensityMatrix.basis(2, 0b01), GateOp("CNOT", (0, 1)))
    np.testing.assert_allclose(out.data, DensityMatrix.basis(2, 0b01).data)


def test_rz_on_diagonal_state_is_identity(rng):
    probs = rng.dirichlet(np.ones(8))
    rho = DensityMatrix(3, np.diag(probs))
    out = apply_gate(rho, GateOp("RZ", (2,), 0.9))
    np.testing.assert_allclose(out.data, rho.data, atol=1e-15)


def test_gates_match_dense_conjugation(rng):
    n = 4
    for _ in range(60):
        rho = random_state(rng, n)
        gate = random_gate(rng, n, p=0.0)
        u = dense_unitary(gate, n)
        np.testing.assert_allclose(apply_gate(rho, gate).data, u @ rho.data @ u.conj().T, atol=1e-12)


def test_gate_then_inverse_recovers_state(rng):
    n = 3
    for _ in range(30):
        rho = random_state(rng, n)
        gate = random_gate(rng, n, p=0.0)
        back = apply_gate(apply_gate(rho, gate), gate.inverse())
        np.testing.assert_allclose(back.data, rho.data, atol=1e-10)
        assert abs(apply_gate(rho, gate).trace() - rho.trace()) < 1e-12


def test_gate_validation():
    with pytest.raises(IndexError):
        apply_gate(DensityMatrix.basis(2, 0), GateOp("RX", (2,), 0.1))
    with pytest.raises(InvalidInputError):
        GateOp("CNOT", (1, 1))
    with pytest.raises(InvalidInputError):
        GateOp("RY", (0,), 0.1)
    with pytest.raises(InvalidInputError):
        GateOp("RX", (0, 1), 0.1)
    with pytest.raises(IndexError):
        CircuitSpec(2, (GateOp("CNOT", (0, 2)),))


# ---------------------------------------------------------------- depolarizing


def test_depolarize_zero_is_identity(rng):
    rho = random_state(rng, 2)
    np.testing.assert_array_equal(depolarize(rho, 0, 0.0).data, rho.data)


def test_full_depolarization_single_qubit(rng):
    rho = random_state(rng, 3)
    out = depolarize(rho, 1, 1.0).data.reshape([2] * 6)
    marginal = np.einsum("aibajb->ij", out)
    np.testing.assert_allclose(marginal, np.eye(2) / 2, atol=1e-14)


def test_half_depolarization_example():
    out = depolarize(DensityMatrix.basis(1, 0), 0, 0.5)
    np.testing.assert_allclose(out.data, np.diag([0.75, 0.25]), atol=1e-15)


@pytest.mark.parametrize("targets", [(0,), (2,), (0, 1), (2, 0), (1, 3)])
def test_depolarize_matches_pauli_twirl(rng, targets):
    n = 4
    rho = random_state(rng, n)
    p = 0.37
    np.testing.assert_allclose(
        depolarize(rho, targets, p).data, twirl_depolarize(rho.data, targets, p, n), atol=1e-13
    )


def test_depolarize_validation(rng):
    rho = random_state(rng, 2)
    with pytest.raises(InvalidProbabilityError):
        depolarize(rho, 0, 1.5)
    with pytest.raises(InvalidProbabilityError):
        depolarize(rho, 0, -0.1)
    with pytest.raises(IndexError):
        depolarize(rho, 2, 0.1)


def test_random_channel_sequence_keeps_state_physical(rng):
    n = 3
    rho = random_state(rng, n, rank=1)
    for _ in range(300):
        gate = random_gate(rng, n)
        rho = apply_gate(rho, gate)
        rho = depolarize(rho, gate.targets, gate.error_prob)
    rho.check()


# ---------------------------------------------------------------- circuits


def test_default_cluster():
    g = default_cluster()
    assert g.n_sites == 6 and len(g.edges) == 7
    assert list(g.edges) == sorted(g.edges)


def test_spin_graph_validation():
    with pytest.raises(InvalidInputError):
        SpinGraph(3, ((0, 0),))
    with pytest.raises(InvalidInputError):
        SpinGraph(3, ((0, 1), (1, 0)))
    with pytest.raises(InvalidInputError):
        SpinGraph(3, ((0, 3),))


def test_trotter_gate_counts():
    c = build_trotter_circuit(default_cluster(), 1.0, 0.5, math.pi / 2, 80, 1e-3)
    assert len(c) == 80 * (6 + 3 * 7) == 2160
    assert circuit_noise_level(c) == pytest.approx(2.16, abs=1e-12)
    c = build_trotter_circuit(default_cluster(), 1.0, 0.5, math.pi / 2, 80, 1e-4)
    assert circuit_noise_level(c) == pytest.approx(0.216, abs=1e-12)
    smallest = build_trotter_circuit(SpinGraph(1), 1.0, 0.0, 1.0, 1)
    assert [g.kind for g in smallest.gates] == ["RX"]
    assert smallest.gates[0].angle == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        build_trotter_circuit(SpinGraph(1), 1.0, 0.0, 1.0, 0)


def test_trotter_step_matches_product_formula():
    g = SpinGraph(3, ((0, 1), (1, 2)))
    h, j, t = 0.8, 0.3, 0.4
    c = build_trotter_circuit(g, h, j, t, 1)
    u = np.eye(8, dtype=complex)
    for gate in c.gates:
        u = dense_unitary(gate, 3) @ u
    ha = -h * sum(embed({q: X}, 3) for q in range(3))
    hb = -j * sum(embed({a: Z, b: Z}, 3) for a, b in g.edges)
    from scipy.linalg import expm

    np.testing.assert_allclose(u, expm(1j * t * ha) @ expm(1j * t * hb), atol=1e-12)


def test_fold_circuit():
    c = build_trotter_circuit(default_cluster(), 1.0, 0.5, math.pi / 2, 80, 1e-3)
    assert fold_circuit(c, 1) == c
    f3, f5 = fold_circuit(c, 3), fold_circuit(c, 5)
    assert len(f3) == 6480 and len(f5) == 10800
    assert circuit_noise_level(f3) == pytest.approx(6.48, abs=1e-12)
    assert circuit_noise_level(f5) == pytest.approx(10.8, abs=1e-12)
    assert f5.gates[: len(f3)] == f3.gates
    for m in (1, 3, 5, 7):
        assert circuit_noise_level(fold_circuit(c, m)) == m * circuit_noise_level(c)
    for bad in (0, 2, -1, 4, 1.5):
        with pytest.raises(InvalidFoldError):
            fold_circuit(c, bad)


def test_noiseless_fold_equivalence_small():
    g = SpinGraph(3, ((0, 1), (1, 2)))
    c = build_trotter_circuit(g, 1.0, 0.5, 1.0, 5)
    base = run_circuit(3, c)
    for m in (3, 5):
        np.testing.assert_allclose(run_circuit(3, fold_circuit(c, m)).data, base.data, atol=1e-10)


def test_circuit_text_round_trip():
    c = build_trotter_circuit(SpinGraph(2, ((0, 1),)), 1.0, 0.5, 0.3, 2, 1e-3)
    text = c.to_text()
    assert text.splitlines()[0] == "CNOT 0 1 0.001"
    assert text.splitlines()[1].startswith("RZ 1 ")
    assert CircuitSpec.from_text(2, text) == c
    with pytest.raises(InvalidInputError):
        CircuitSpec.from_text(2, "RX 0 zero 0.1")
    with pytest.raises(InvalidInputError):
        CircuitSpec.from_text(2, "CNOT 0 1")


# ---------------------------------------------------------------- dynamics


def test_empty_circuit():
    out = run_circuit(5, CircuitSpec(3))
    np.testing.assert_array_equal(out.data, DensityMatrix.basis(3, 5).data)


def test_fully_depolarizing_circuit():
    g = SpinGraph(3, ((0, 1), (1, 2)))
    c = build_trotter_circuit(g, 1.0, 0.5, 1.0, 3, p_gate=1.0)
    out = run_circuit(0, c)
    np.testing.assert_allclose(out.data, np.eye(8) / 8, atol=1e-12)
    assert magnetization_expectation(out) == pytest.approx(0.0, abs=1e-12)


def test_noiseless_trotter_tracks_exact_evolution():
    g = default_cluster()
    c = build_trotter_circuit(g, 1.0, 0.5, math.pi / 2, 80)
    for state in (0, 7, 42):
        trotter = magnetization_expectation(run_circuit(state, c))
        exact = magnetization_expectation(exact_evolution(g, 1.0, 0.5, math.pi / 2, state))
        assert abs(trotter - exact) < 2e-2


def test_exact_evolution_examples(rng):
    g = default_cluster()
    np.testing.assert_allclose(
        exact_evolution(g, 1.0, 0.5, 0.0, 9).data, DensityMatrix.basis(6, 9).data, atol=1e-14
    )
    np.testing.assert_allclose(
        exact_evolution(g, 0.0, 0.5, 1.3, 9).data, DensityMatrix.basis(6, 9).data, atol=1e-12
    )
    flipped = exact_evolution(SpinGraph(1), 1.0, 0.0, math.pi / 2, 0)
    assert magnetization_expectation(DensityMatrix.basis(1, 0)) == 1.0
    assert magnetization_expectation(flipped) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(CapacityError):
        exact_evolution(SpinGraph(13), 1.0, 0.0, 1.0, 0)


def test_exact_single_spin_closed_form():
    # exp(-i h t X)|0> gives <Z> = cos(2 h t)
    for t in np.linspace(0, 2, 7):
        rho = exact_evolution(SpinGraph(1), 0.7, 0.0, t, 0)
        assert magnetization_expectation(rho) == pytest.approx(math.cos(1.4 * t), abs=1e-12)


def test_exact_reference_regression_constant():
    rho = exact_evolution(default_cluster(), 1.0, 0.5, math.pi / 2, 0)
    # frozen from an independent Kronecker-product eigendecomposition
    assert magnetization_expectation(rho) == pytest.approx(-0.4605807459152237, abs=1e-12)


def test_magnetization_examples():
    assert magnetization_expectation(DensityMatrix.basis(6, 0)) == 1.0
    assert magnetization_expectation(DensityMatrix.maximally_mixed(6)) == pytest.approx(0.0)
    assert magnetization_expectation(DensityMatrix.basis(6, 0b000111)) == 0.0
    assert magnetization_expectation(DensityMatrix.basis(6, 0b111111)) == -1.0


# ---------------------------------------------------------------- sampling


def test_sampling_deterministic_state():
    for seed in (0, 1, 99):
        s = sample_magnetization(DensityMatrix.basis(6, 0), 100, seed)
        assert (s.mean, s.variance, s.shots) == (1.0, 0.0, 100)


def test_sampling_maximally_mixed_concentrates():
    n = 200_000
    s = sample_magnetization(DensityMatrix.maximally_mixed(1), n, 7)
    assert abs(s.mean) < 5 / math.sqrt(n)
    assert s.variance == pytest.approx(1 / n, rel=1e-3)


def test_sampling_reproducible(rng):
    rho = random_state(rng, 4)
    a = sample_magnetization(rho, 1000, 123)
    b = sample_magnetization(rho, 1000, 123)
    assert a == b
    assert sample_magnetization(rho, 1000, make_rng(123)) == a
    assert sample_magnetization(rho, 1000, 124) != a


def test_sampled_mean_within_five_sigma(rng):
    rho = random_state(rng, 4)
    exact = magnetization_expectation(rho)
    n = 2000
    hits = 0
    for seed in range(300):
        s = sample_magnetization(rho, n, seed)
        assert -1 <= s.mean <= 1
        single_shot_std = math.sqrt(s.variance * n)
        hits += abs(s.mean - exact) <= 5 * single_shot_std / math.sqrt(n)
    assert hits / 300 >= 0.99


def test_sampling_needs_two_shots():
    with pytest.raises(InvalidInputError):
        sample_magnetization(DensityMatrix.basis(1, 0), 1, 0)


def test_derive_seed_documented_hash():
    import hashlib

    expected = int.from_bytes(hashlib.sha256(b"5:3:2").digest()[:8], "big") >> 1
    assert derive_seed(5, 3, 2) == expected
    assert derive_seed(5, 3, 2) != derive_seed(5, 2, 3)
