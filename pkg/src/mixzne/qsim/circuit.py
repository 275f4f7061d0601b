"""Gate-list circuits, spin graphs and the Trotterized transverse-field Ising circuit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import InvalidFoldError, InvalidInputError, InvalidProbabilityError

GATE_KINDS = ("RX", "RZ", "CNOT")


@dataclass(frozen=True)
class GateOp:
    """One gate with its own depolarizing error probability.

    Rotations follow ``R_P(theta) = exp(-i theta P / 2)``.  For CNOT the
    first target is the control.
    """

    kind: str
    targets: tuple[int, ...]
    angle: float = 0.0
    error_prob: float = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise InvalidInputError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        arity = 2 if self.kind == "CNOT" else 1
        if len(self.targets) != arity:
            raise InvalidInputError(f"{self.kind} takes {arity} target(s), got {self.targets}")
        if arity == 2 and self.targets[0] == self.targets[1]:
            raise InvalidInputError(f"CNOT targets must differ, got {self.targets}")
        if any(t < 0 for t in self.targets):
            raise IndexError(f"negative qubit index in {self.targets}")
        if not (0.0 <= self.error_prob <= 1.0):
            raise InvalidProbabilityError(f"error_prob must be in [0, 1], got {self.error_prob}")

    def inverse(self) -> "GateOp":
        if self.kind == "CNOT":
            return self
        return GateOp(self.kind, self.targets, -self.angle, self.error_prob)

    def to_line(self) -> str:
        qubits = " ".join(str(t) for t in self.targets)
        if self.kind == "CNOT":
            return f"CNOT {qubits} {self.error_prob!r}"
        return f"{self.kind} {qubits} {self.angle!r} {self.error_prob!r}"

    @classmethod
    def from_line(cls, line: str) -> "GateOp":
        parts = line.split()
        if not parts:
            raise InvalidInputError("empty gate line")
        kind = parts[0].upper()
        try:
            if kind == "CNOT" and len(parts) == 4:
                return cls("CNOT", (int(parts[1]), int(parts[2])), 0.0, float(parts[3]))
            if kind in ("RX", "RZ") and len(parts) == 4:
                return cls(kind, (int(parts[1]),), float(parts[2]), float(parts[3]))
        except ValueError as exc:
            raise InvalidInputError(f"bad gate line {line!r}: {exc}") from None
        raise InvalidInputError(f"bad gate line {line!r}")


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    gates: tuple[GateOp, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidInputError(f"n_qubits must be positive, got {self.n_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.n_qubits:
                raise IndexError(f"gate {g} acts outside {self.n_qubits} qubits")

    def __len__(self):
        return len(self.gates)

    @property
    def noise_level(self) -> float:
        return circuit_noise_level(self)

    def inverse(self) -> "CircuitSpec":
        return CircuitSpec(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)))

    def to_text(self) -> str:
        return "".join(g.to_line() + "\n" for g in self.gates)

    @classmethod
    def from_text(cls, n_qubits: int, text: str) -> "CircuitSpec":
        lines = (ln.strip() for ln in text.splitlines())
        return cls(n_qubits, tuple(GateOp.from_line(ln) for ln in lines if ln and not ln.startswith("#")))


def circuit_noise_level(circuit: CircuitSpec) -> float:
    """Total noise ``lambda`` = sum of per-gate error probabilities."""
    return math.fsum(g.error_prob for g in circuit.gates)


def fold_circuit(circuit: CircuitSpec, fold_factor: int) -> CircuitSpec:
    """Global unitary folding ``U (U^dag U)^((m - 1) / 2)``.

    The result for ``m`` is a prefix of the result for any larger odd ``m``.
    """
    if isinstance(fold_factor, bool) or int(fold_factor) != fold_factor:
        raise InvalidFoldError(f"fold factor must be an odd positive integer, got {fold_factor}")
    m = int(fold_factor)
    if m < 1 or m % 2 == 0:
        raise InvalidFoldError(f"fold factor must be an odd positive integer, got {fold_factor}")
    inverse = circuit.inverse().gates
    gates = list(circuit.gates)
    for _ in range((m - 1) // 2):
        gates.extend(inverse)
        gates.extend(circuit.gates)
    return CircuitSpec(circuit.n_qubits, tuple(gates))


@dataclass(frozen=True)
class SpinGraph:
    n_sites: int
    edges: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_sites < 1:
            raise InvalidInputError(f"n_sites must be positive, got {self.n_sites}")
        normalized = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise InvalidInputError(f"self-loop on site {i}")
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites):
                raise InvalidInputError(f"edge ({i}, {j}) outside {self.n_sites} sites")
            e = (min(i, j), max(i, j))
            if e in normalized:
                raise InvalidInputError(f"duplicate edge {e}")
            normalized.add(e)
        # Sorted order fixes the ZZ gate sequence within a Trotter step.
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @classmethod
    def grid(cls, rows: int, cols: int) -> "SpinGraph":
        edges = []
        for r in range(rows):
            for c in range(cols):
                s = r * cols + c
                if c + 1 < cols:
                    edges.append((s, s + 1))
                if r + 1 < rows:
                    edges.append((s, s + cols))
        return cls(rows * cols, tuple(edges))

    @classmethod
    def from_edges(cls, n_sites: int, edges: Iterable[Sequence[int]]) -> "SpinGraph":
        return cls(n_sites, tuple((int(a), int(b)) for a, b in edges))


def default_cluster() -> SpinGraph:
    """Six spins on a 2x3 grid (7 couplings)."""
    return SpinGraph.grid(2, 3)


def build_trotter_circuit(
    graph: SpinGraph,
    h: float,
    j_coupling: float,
    t: float,
    n_trotter: int,
    p_gate: float = 0.0,
) -> CircuitSpec:
    """First-order Trotter circuit for ``exp(i t H)``, ``H = -h sum X - J sum ZZ``.

    Each step applies ``exp(i dt H_B)`` (ZZ terms, compiled as
    CNOT . RZ(2 J dt) . CNOT) and then ``exp(i dt H_A)`` (RX(2 h dt) per site).
    """
    if n_trotter < 1:
        raise InvalidInputError(f"n_trotter must be >= 1, got {n_trotter}")
    dt = t / n_trotter
    zz_angle = 2.0 * j_coupling * dt
    x_angle = 2.0 * h * dt
    step = []
    for a, b in graph.edges:
        step.append(GateOp("CNOT", (a, b), 0.0, p_gate))
        step.append(GateOp("RZ", (b,), zz_angle, p_gate))
        step.append(GateOp("CNOT", (a, b), 0.0, p_gate))
    for site in range(graph.n_sites):
        step.append(GateOp("RX", (site,), x_angle, p_gate))
    return CircuitSpec(graph.n_sites, tuple(step) * n_trotter)
