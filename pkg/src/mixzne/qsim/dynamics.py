"""Noisy circuit execution, the exact evolution oracle and magnetization readout."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from ..errors import CapacityError, InvalidInputError
from .circuit import CircuitSpec, SpinGraph
from .state import DEBUG, DensityMatrix, _bit, apply_gate_stack, check_states, depolarize_stack

MAX_EXACT_SITES = 12


def basis_stack(n_qubits: int, indices: Sequence[int]) -> np.ndarray:
    dim = 2**n_qubits
    stack = np.zeros((len(indices), dim, dim), dtype=complex)
    for row, i in enumerate(indices):
        if not 0 <= i < dim:
            raise IndexError(f"basis index {i} out of range for {n_qubits} qubits")
        stack[row, i, i] = 1.0
    return stack


def simulate_stack(
    stack: np.ndarray,
    circuit: CircuitSpec,
    checkpoints: Iterable[int] | None = None,
) -> dict[int, np.ndarray]:
    """Run ``circuit`` on every state in ``stack``.

    Each gate is followed by a depolarizing channel on its own qubits with
    the gate's ``error_prob``.  Returns the stacks reached after the first
    ``c`` gates for each requested checkpoint ``c`` (default: the end).
    """
    n = circuit.n_qubits
    wanted = sorted(set(checkpoints)) if checkpoints is not None else [len(circuit)]
    if wanted and (wanted[0] < 0 or wanted[-1] > len(circuit)):
        raise InvalidInputError(f"checkpoints must lie in [0, {len(circuit)}], got {wanted}")
    out = {}
    if 0 in wanted:
        out[0] = stack.copy()
    for count, gate in enumerate(circuit.gates, start=1):
        stack = apply_gate_stack(stack, n, gate)
        if gate.error_prob > 0:
            stack = depolarize_stack(stack, n, gate.targets, gate.error_prob)
        if DEBUG:
            check_states(stack)
        if count in wanted:
            out[count] = stack
        if count >= wanted[-1]:
            break
    return out


def run_circuit(initial_state: int, circuit: CircuitSpec) -> DensityMatrix:
    """Noisy evolution of the computational basis state ``|initial_state>``."""
    stack = basis_stack(circuit.n_qubits, [initial_state])
    final = simulate_stack(stack, circuit)[len(circuit)]
    return DensityMatrix(circuit.n_qubits, final[0])


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _embed(op: np.ndarray, site: int, n: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(2**site), op), np.eye(2 ** (n - site - 1)))


def tfim_hamiltonian(graph: SpinGraph, h: float, j_coupling: float) -> np.ndarray:
    """Dense ``H = -h sum_i X_i - J sum_(ij) Z_i Z_j``."""
    n = graph.n_sites
    if n > MAX_EXACT_SITES:
        raise CapacityError(f"{n} sites exceed the dense limit of {MAX_EXACT_SITES}")
    dim = 2**n
    ham = np.zeros((dim, dim), dtype=complex)
    for site in range(n):
        ham -= h * _embed(_PAULI_X, site, n)
    z = 1 - 2 * np.array([_bit(n, s) for s in range(n)])  # (n, dim) of +-1
    zz = np.zeros(dim)
    for a, b in graph.edges:
        zz += z[a] * z[b]
    ham -= j_coupling * np.diag(zz)
    return ham


def exact_evolution(
    graph: SpinGraph, h: float, j_coupling: float, t: float, initial_state: int
) -> DensityMatrix:
    """``U |i><i| U^dag`` with ``U = exp(+i t H)`` by dense matrix exponential."""
    n = graph.n_sites
    ham = tfim_hamiltonian(graph, h, j_coupling)
    if not 0 <= initial_state < 2**n:
        raise IndexError(f"basis index {initial_state} out of range for {n} qubits")
    psi = scipy.linalg.expm(1j * t * ham)[:, initial_state]
    return DensityMatrix(n, np.outer(psi, psi.conj()))


def magnetization_values(n_qubits: int) -> np.ndarray:
    """Magnetization ``(1/n) sum_j z_j`` of every basis state, ``z = +1`` for bit 0."""
    z = 1 - 2 * np.array([_bit(n_qubits, q) for q in range(n_qubits)])
    return z.mean(axis=0)


def magnetization_expectation(rho: DensityMatrix) -> float:
    """``(1/n) sum_j Tr(rho Z_j)``."""
    return float(magnetization_values(rho.n_qubits) @ rho.probabilities())


@dataclass(frozen=True)
class ShotStatistics:
    mean: float
    variance: float  # variance of the mean: sample variance / shots
    shots: int


def derive_seed(*parts: int) -> int:
    """63-bit seed from SHA-256 of the decimal parts joined by ``:``."""
    digest = hashlib.sha256(":".join(str(int(p)) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(seed))


def sample_probabilities(
    probabilities: np.ndarray, values: np.ndarray, n_shots: int, rng: np.random.Generator
) -> ShotStatistics:
    if n_shots < 2:
        raise InvalidInputError(f"n_shots must be >= 2, got {n_shots}")
    probs = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    probs = probs / probs.sum()
    counts = rng.multinomial(n_shots, probs)
    mean = float(counts @ values) / n_shots
    sq_dev = float(counts @ (values - mean) ** 2)
    sample_var = sq_dev / (n_shots - 1)
    return ShotStatistics(mean=mean, variance=sample_var / n_shots, shots=n_shots)


def sample_magnetization(rho: DensityMatrix, n_shots: int, seed) -> ShotStatistics:
    """Finite-shot Z-basis estimate of the magnetization.

    Only ``diag(rho)`` matters for Z measurements, so outcomes are drawn
    from it directly.  ``seed`` is an int (fed to :func:`make_rng`) or a
    ready ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    return sample_probabilities(
        rho.probabilities(), magnetization_values(rho.n_qubits), n_shots, rng
    )
