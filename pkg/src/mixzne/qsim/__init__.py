"""Few-qubit density-matrix simulation of noisy Trotter circuits."""

from .circuit import (
    CircuitSpec,
    GateOp,
    SpinGraph,
    build_trotter_circuit,
    circuit_noise_level,
    default_cluster,
    fold_circuit,
)
from .dynamics import (
    ShotStatistics,
    derive_seed,
    exact_evolution,
    magnetization_expectation,
    magnetization_values,
    make_rng,
    run_circuit,
    sample_magnetization,
    simulate_stack,
)
from .state import DensityMatrix, apply_gate, depolarize

__all__ = [
    "CircuitSpec",
    "DensityMatrix",
    "GateOp",
    "ShotStatistics",
    "SpinGraph",
    "apply_gate",
    "build_trotter_circuit",
    "circuit_noise_level",
    "default_cluster",
    "depolarize",
    "derive_seed",
    "exact_evolution",
    "fold_circuit",
    "magnetization_expectation",
    "magnetization_values",
    "make_rng",
    "run_circuit",
    "sample_magnetization",
    "simulate_stack",
]
