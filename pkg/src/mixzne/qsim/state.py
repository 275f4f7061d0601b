"""Dense density matrices and the gate / depolarizing kernels.

Qubit 0 is the most significant bit of a basis index, so ``|10>`` on two
qubits is index 2.  Kernels work on stacks of shape ``(batch, D, D)`` and
write into freshly allocated arrays; the inputs are never modified.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import InvalidInputError, InvalidProbabilityError
from .circuit import GateOp

# Validate every state after each operation when set (slow).
DEBUG = bool(os.environ.get("MIXZNE_DEBUG"))

TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n_qubits: int
    data: np.ndarray

    def __post_init__(self):
        dim = 2**self.n_qubits
        data = np.asarray(self.data, dtype=complex)
        if data.shape != (dim, dim):
            raise InvalidInputError(f"expected shape {(dim, dim)}, got {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "DensityMatrix":
        dim = 2**n_qubits
        if not 0 <= index < dim:
            raise IndexError(f"basis index {index} out of range for {n_qubits} qubits")
        data = np.zeros((dim, dim), dtype=complex)
        data[index, index] = 1.0
        return cls(n_qubits, data)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 2**n_qubits
        return cls(n_qubits, np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def probabilities(self) -> np.ndarray:
        return np.real(np.diag(self.data)).copy()

    def check(self) -> None:
        """Raise ``AssertionError`` unless trace, hermiticity and positivity hold."""
        check_states(self.data[None])


def check_states(stack: np.ndarray) -> None:
    for rho in stack:
        tr = np.trace(rho)
        if abs(tr - 1) > TRACE_TOL:
            raise AssertionError(f"trace {tr} deviates from 1")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise AssertionError("state is not Hermitian")
        if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise AssertionError("state is not positive semidefinite")


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def gate_matrix(gate: GateOp) -> np.ndarray:
    if gate.kind == "RX":
        return rx_matrix(gate.angle)
    if gate.kind == "RZ":
        return rz_matrix(gate.angle)
    return CNOT_MATRIX


@lru_cache(maxsize=None)
def _bit(n_qubits: int, qubit: int) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    return (idx >> (n_qubits - 1 - qubit)) & 1


@lru_cache(maxsize=None)
def _cnot_permutation(n_qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    flip = 1 << (n_qubits - 1 - target)
    return np.where(_bit(n_qubits, control) == 1, idx ^ flip, idx)


@lru_cache(maxsize=256)
def _rz_phase(n_qubits: int, qubit: int, theta: float) -> np.ndarray:
    # RZ is diagonal: rho_jk picks up d_j * conj(d_k).
    d = np.where(_bit(n_qubits, qubit) == 1, np.exp(0.5j * theta), np.exp(-0.5j * theta))
    phase = np.outer(d, d.conj())
    phase.setflags(write=False)
    return phase


def _apply_rx(stack: np.ndarray, n_qubits: int, qubit: int, theta: float) -> np.ndarray:
    # U = c I - i s X, so U rho U^dag = c^2 rho + s^2 X rho X + i c s (rho X - X rho);
    # X on one axis is a reversed view of that bit.
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    b = stack.shape[0]
    left, right = 2**qubit, 2 ** (n_qubits - qubit - 1)
    x = stack.reshape(b, left, 2, right, left, 2, right)
    out = (c * c) * x
    out += (s * s) * x[:, :, ::-1, :, :, ::-1, :]
    out += (1j * c * s) * (x[:, :, :, :, :, ::-1, :] - x[:, :, ::-1, :, :, :, :])
    return out.reshape(stack.shape)


def apply_gate_stack(stack: np.ndarray, n_qubits: int, gate: GateOp) -> np.ndarray:
    """Unitary part of ``gate`` on every state of ``stack``."""
    if max(gate.targets) >= n_qubits:
        raise IndexError(f"gate {gate} acts outside {n_qubits} qubits")
    if gate.kind == "RZ":
        return stack * _rz_phase(n_qubits, gate.targets[0], float(gate.angle))
    if gate.kind == "CNOT":
        perm = _cnot_permutation(n_qubits, *gate.targets)
        return stack[:, perm[:, None], perm[None, :]]
    return _apply_rx(stack, n_qubits, gate.targets[0], float(gate.angle))


def depolarize_stack(stack: np.ndarray, n_qubits: int, targets, p: float) -> np.ndarray:
    """``(1 - p) rho + p * (I / 2^k on targets) (x) Tr_targets(rho)``."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbabilityError(f"depolarizing probability must be in [0, 1], got {p}")
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise InvalidInputError(f"repeated depolarizing target in {targets}")
    for t in targets:
        if not 0 <= t < n_qubits:
            raise IndexError(f"qubit {t} out of range for {n_qubits} qubits")
    if p == 0.0:
        return stack.copy()
    b = stack.shape[0]
    share = p / 2 ** len(targets)
    if len(targets) == 1:
        q = targets[0]
        left, right = 2**q, 2 ** (n_qubits - q - 1)
        x = stack.reshape(b, left, 2, right, left, 2, right)
        reduced = x[:, :, 0, :, :, 0, :] + x[:, :, 1, :, :, 1, :]
        reduced *= share
        y = (1.0 - p) * x
        y[:, :, 0, :, :, 0, :] += reduced
        y[:, :, 1, :, :, 1, :] += reduced
        return y.reshape(stack.shape)
    x = stack.reshape((b,) + (2,) * (2 * n_qubits))
    slots = _diagonal_slots(n_qubits, targets)
    reduced = x[slots[0]].copy()
    for idx in slots[1:]:
        reduced += x[idx]
    reduced *= share
    y = (1.0 - p) * x
    for idx in slots:
        y[idx] += reduced
    return y.reshape(stack.shape)


@lru_cache(maxsize=None)
def _diagonal_slots(n_qubits, targets):
    """Index tuples selecting the blocks where the targets' row and column bits agree."""
    slots = []
    for bits in itertools.product((0, 1), repeat=len(targets)):
        idx = [slice(None)] * (2 * n_qubits + 1)
        for t, v in zip(targets, bits):
            idx[1 + t] = v
            idx[1 + n_qubits + t] = v
        slots.append(tuple(idx))
    return tuple(slots)


def _maybe_check(stack):
    if DEBUG:
        check_states(stack)


def apply_gate(rho: DensityMatrix, gate: GateOp) -> DensityMatrix:
    """``U rho U^dag`` for a single gate, no noise."""
    out = apply_gate_stack(rho.data[None], rho.n_qubits, gate)
    _maybe_check(out)
    return DensityMatrix(rho.n_qubits, out[0])


def depolarize(rho: DensityMatrix, targets, p: float) -> DensityMatrix:
    if isinstance(targets, (int, np.integer)):
        targets = (targets,)
    out = depolarize_stack(rho.data[None], rho.n_qubits, targets, p)
    _maybe_check(out)
    return DensityMatrix(rho.n_qubits, out[0])
