"""Six-regime noise sweep over basis states, per-state extrapolation and summaries.

Regimes ``1 .. F`` run the Trotter circuit with logical gate error
``gamma * p`` at each fold factor, regimes ``F + 1 .. 2F`` with the physical
error ``p``.  With the defaults (folds 1, 3, 5) that gives the six noise
levels 0.216, 0.648, 1.08, 2.16, 6.48, 10.8.

Sampling seeds are ``derive_seed(seed, state, regime)`` (SHA-256 based), so
records do not depend on thread count or evaluation order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DatasetParseError, IncompleteDatasetError, InvalidInputError
from .extrapolation import NoisePoint, zero_noise_estimate
from .qsim.circuit import SpinGraph, build_trotter_circuit, circuit_noise_level, default_cluster, fold_circuit
from .qsim.dynamics import (
    basis_stack,
    derive_seed,
    exact_evolution,
    magnetization_expectation,
    magnetization_values,
    make_rng,
    sample_probabilities,
    simulate_stack,
)

FORMAT_VERSION = 1
DATASET_HEADER = ("state", "regime", "lambda", "mean", "variance", "shots", "seed")
REFERENCE_KINDS = ("exact", "trotter")


@dataclass(frozen=True)
class RunConfig:
    h: float = 1.0
    j_coupling: float = 0.5
    t_final: float = math.pi / 2
    n_trotter: int = 80
    p_physical: float = 1e-3
    p_threshold: float = 1e-2
    folds: tuple[int, ...] = (1, 3, 5)
    n_shots: int = 10_000
    seed: int = 20240611
    graph: SpinGraph = field(default_factory=default_cluster)
    states: tuple[int, ...] | None = None
    reference: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "folds", tuple(int(f) for f in self.folds))
        if self.states is not None:
            object.__setattr__(self, "states", tuple(int(s) for s in self.states))
        if not 0 < self.p_physical <= self.p_threshold:
            raise ConfigError(
                f"need 0 < p_physical <= p_threshold, got {self.p_physical}, {self.p_threshold}"
            )
        if self.n_trotter < 1:
            raise ConfigError("n_trotter must be >= 1")
        if self.n_shots < 2:
            raise ConfigError("n_shots must be >= 2")
        if not self.folds or any(f < 1 or f % 2 == 0 for f in self.folds):
            raise ConfigError(f"folds must be odd positive integers, got {self.folds}")
        if len(set(self.folds)) != len(self.folds):
            raise ConfigError(f"folds must be distinct, got {self.folds}")
        if self.reference not in REFERENCE_KINDS:
            raise ConfigError(f"reference must be one of {REFERENCE_KINDS}, got {self.reference!r}")
        dim = 2**self.graph.n_sites
        for s in self.state_list:
            if not 0 <= s < dim:
                raise ConfigError(f"state {s} out of range for {self.graph.n_sites} sites")

    @property
    def gamma(self) -> float:
        return self.p_physical / self.p_threshold

    @property
    def p_logical(self) -> float:
        return self.gamma * self.p_physical

    @property
    def state_list(self) -> tuple[int, ...]:
        if self.states is None:
            return tuple(range(2**self.graph.n_sites))
        return self.states

    def regimes(self) -> list[tuple[int, float, int]]:
        """``(regime, p_gate, fold)`` triples, logical regimes first."""
        out = []
        for p_gate in (self.p_logical, self.p_physical):
            for fold in self.folds:
                out.append((len(out) + 1, p_gate, fold))
        return out

    def base_circuit(self, p_gate: float):
        return build_trotter_circuit(
            self.graph, self.h, self.j_coupling, self.t_final, self.n_trotter, p_gate
        )


@dataclass(frozen=True)
class EstimateRecord:
    state: int
    regime: int
    lam: float
    mean: float
    variance: float
    shots: int
    seed: int

    def as_point(self) -> NoisePoint:
        return NoisePoint(self.lam, self.mean, self.variance, self.shots)


@dataclass(frozen=True)
class ExtrapolationReport:
    state: int
    regime_subset: tuple[int, ...]
    theta0: float
    variance: float
    error: float


def regime_noise_levels(config: RunConfig) -> dict[int, float]:
    levels = {}
    for regime, p_gate, fold in config.regimes():
        levels[regime] = circuit_noise_level(fold_circuit(config.base_circuit(p_gate), fold))
    return levels


def _simulate_chunk(config, states, p_gate, checkpoints):
    circuit = fold_circuit(config.base_circuit(p_gate), max(config.folds))
    return simulate_stack(basis_stack(circuit.n_qubits, states), circuit, checkpoints)


def run_regime_sweep(config: RunConfig, threads: int = 1) -> list[EstimateRecord]:
    """Simulate and sample every (state, regime) pair.

    The fold-``m`` circuit is a prefix of the largest fold, so each gate
    error level is simulated once with checkpoints at every fold length.
    """
    states = list(config.state_list)
    levels = regime_noise_levels(config)
    values = magnetization_values(config.graph.n_sites)
    chunks = [c.tolist() for c in np.array_split(states, max(1, min(threads, len(states)))) if len(c)]

    probs: dict[tuple[int, int], np.ndarray] = {}
    n_folds = len(config.folds)
    regimes = config.regimes()
    for group in (regimes[:n_folds], regimes[n_folds:]):
        p_gate = group[0][1]
        n_base = len(config.base_circuit(p_gate))
        checkpoints = [n_base * f for _, _, f in group]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(
                pool.map(lambda ch: _simulate_chunk(config, ch, p_gate, checkpoints), chunks)
            )
        for chunk, snaps in zip(chunks, results):
            for regime, _, fold in group:
                diag = np.real(np.einsum("bii->bi", snaps[n_base * fold]))
                for row, state in enumerate(chunk):
                    probs[state, regime] = diag[row]

    records = []
    for state in states:
        for regime, _, _ in config.regimes():
            seed = derive_seed(config.seed, state, regime)
            stats = sample_probabilities(probs[state, regime], values, config.n_shots, make_rng(seed))
            records.append(
                EstimateRecord(state, regime, levels[regime], stats.mean, stats.variance, stats.shots, seed)
            )
    return records


def noiseless_reference(config: RunConfig, kind: str | None = None) -> dict[int, float]:
    """Zero-noise magnetization per state: exact evolution or a noiseless Trotter run."""
    kind = kind or config.reference
    if kind == "exact":
        return {
            s: magnetization_expectation(
                exact_evolution(config.graph, config.h, config.j_coupling, config.t_final, s)
            )
            for s in config.state_list
        }
    if kind == "trotter":
        circuit = config.base_circuit(0.0)
        final = simulate_stack(basis_stack(circuit.n_qubits, config.state_list), circuit)[len(circuit)]
        values = magnetization_values(circuit.n_qubits)
        diag = np.real(np.einsum("bii->bi", final))
        return {s: float(values @ diag[i]) for i, s in enumerate(config.state_list)}
    raise ConfigError(f"unknown reference kind {kind!r}")


def extrapolate_subset(
    records: Iterable[EstimateRecord],
    subset: Sequence[int],
    order: int,
    reference: Mapping[int, float] | None = None,
) -> list[ExtrapolationReport]:
    """Richardson-extrapolate each state's records restricted to ``subset``.

    ``error`` is ``theta0 - reference[state]`` (NaN without a reference).
    """
    subset = tuple(int(r) for r in subset)
    if len(subset) != order + 1:
        raise InvalidInputError(f"order {order} needs {order + 1} regimes, got {subset}")
    by_state: dict[int, dict[int, EstimateRecord]] = {}
    for rec in records:
        by_state.setdefault(rec.state, {})[rec.regime] = rec
    reports = []
    for state in sorted(by_state):
        have = by_state[state]
        missing = [r for r in subset if r not in have]
        if missing:
            raise IncompleteDatasetError(f"state {state} lacks regimes {missing}")
        result = zero_noise_estimate([have[r].as_point() for r in subset])
        error = result.theta0 - reference[state] if reference is not None else math.nan
        reports.append(ExtrapolationReport(state, subset, result.theta0, result.variance, error))
    return reports


@dataclass(frozen=True)
class SummaryStatistics:
    n_states: int
    mean_error: float
    error_variance: float
    mean_abs_error: float
    variance_mean: float
    variance_min: float
    variance_max: float
    variance_q25: float
    variance_median: float
    variance_q75: float

    def to_dict(self) -> dict:
        return asdict(self)


def aggregate_statistics(reports: Sequence[ExtrapolationReport]) -> SummaryStatistics:
    """Across-state error statistics and the spread of per-state estimator variances.

    ``error_variance`` is the population variance over states.
    """
    reports = list(reports)
    if not reports:
        raise InvalidInputError("no reports to aggregate")
    err = np.array([r.error for r in reports], dtype=float)
    var = np.array([r.variance for r in reports], dtype=float)
    q25, q50, q75 = np.quantile(var, [0.25, 0.5, 0.75])
    return SummaryStatistics(
        n_states=len(reports),
        mean_error=float(err.mean()),
        error_variance=float(err.var()),
        mean_abs_error=float(np.abs(err).mean()),
        variance_mean=float(var.mean()),
        variance_min=float(var.min()),
        variance_max=float(var.max()),
        variance_q25=float(q25),
        variance_median=float(q50),
        variance_q75=float(q75),
    )


# ---------------------------------------------------------------- file formats


def dataset_to_csv(records: Iterable[EstimateRecord]) -> str:
    buf = io.StringIO()
    buf.write(f"# format_version: {FORMAT_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DATASET_HEADER)
    for r in records:
        writer.writerow([r.state, r.regime, repr(r.lam), repr(r.mean), repr(r.variance), r.shots, r.seed])
    return buf.getvalue()


def write_dataset(records: Iterable[EstimateRecord], path) -> None:
    Path(path).write_text(dataset_to_csv(records), encoding="utf-8")


def parse_dataset(text: str) -> list[EstimateRecord]:
    records = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, _, value = stripped[1:].partition(":")
            if key.strip() == "format_version" and value.strip() != str(FORMAT_VERSION):
                raise DatasetParseError(f"unsupported format_version {value.strip()}", lineno)
            continue
        fields = next(csv.reader([line]))
        if not header_seen:
            if tuple(f.strip() for f in fields) != DATASET_HEADER:
                raise DatasetParseError(f"expected header {','.join(DATASET_HEADER)}", lineno)
            header_seen = True
            continue
        if len(fields) != len(DATASET_HEADER):
            raise DatasetParseError(f"expected {len(DATASET_HEADER)} fields, got {len(fields)}", lineno)
        try:
            rec = EstimateRecord(
                state=int(fields[0]),
                regime=int(fields[1]),
                lam=float(fields[2]),
                mean=float(fields[3]),
                variance=float(fields[4]),
                shots=int(fields[5]),
                seed=int(fields[6]),
            )
        except ValueError as exc:
            raise DatasetParseError(str(exc), lineno) from None
        if not (rec.lam > 0 and rec.variance >= 0 and rec.regime >= 1):
            raise DatasetParseError("lambda must be > 0, variance >= 0, regime >= 1", lineno)
        records.append(rec)
    if not header_seen:
        raise DatasetParseError("missing header row")
    return records


def read_dataset(path) -> list[EstimateRecord]:
    return parse_dataset(Path(path).read_text(encoding="utf-8"))


def reports_document(
    analyses: Mapping[tuple[int, ...], Sequence[ExtrapolationReport]], order: int
) -> dict:
    subsets = []
    for subset, reports in analyses.items():
        subsets.append(
            {
                "regime_subset": list(subset),
                "summary": aggregate_statistics(reports).to_dict(),
                "reports": [
                    {
                        "state": r.state,
                        "regime_subset": list(r.regime_subset),
                        "theta0": r.theta0,
                        "variance": r.variance,
                        "error": None if math.isnan(r.error) else r.error,
                    }
                    for r in reports
                ],
            }
        )
    return {"format_version": FORMAT_VERSION, "order": order, "subsets": subsets}


def write_reports(analyses, order: int, path) -> None:
    doc = reports_document(analyses, order)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def histogram_csv(
    analyses: Mapping[tuple[int, ...], Sequence[ExtrapolationReport]], bins: int = 16
) -> str:
    """Plot-ready histograms of per-state error and variance for every subset."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["subset", "quantity", "bin_left", "bin_right", "count"])
    for subset, reports in analyses.items():
        label = "-".join(str(r) for r in subset)
        for quantity in ("error", "variance"):
            vals = np.array([getattr(r, quantity) for r in reports], dtype=float)
            vals = vals[np.isfinite(vals)]
            if vals.size == 0:
                continue
            counts, edges = np.histogram(vals, bins=bins)
            for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
                writer.writerow([label, quantity, repr(float(lo)), repr(float(hi)), int(c)])
    return buf.getvalue()
