"""Variance prefactors and runtime ratios for logical vs mixed datasets.

Noise model: error correction maps a physical per-gate error ``p`` to a
logical rate ``gamma * p`` with ``gamma = p / p_th``.  A schedule is a list
of relative noise levels; because every Richardson weight depends only on
ratios of levels, the common factor ``n * p`` never matters.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateScheduleError,
    InvalidInputError,
    NoCorrectionError,
    ScheduleOverlapError,
)
from .extrapolation import linear_geometric_bound, richardson_coefficients


@dataclass(frozen=True)
class QecModel:
    """Threshold model of error correction: ``p_L = c p**2`` with ``c = 1/p_th``."""

    p: float
    p_th: float

    def __post_init__(self):
        if not (0 < self.p <= self.p_th):
            raise InvalidInputError(f"need 0 < p <= p_th, got p={self.p}, p_th={self.p_th}")

    @property
    def gamma(self) -> float:
        return self.p / self.p_th

    @property
    def c(self) -> float:
        return 1.0 / self.p_th

    @property
    def p_logical(self) -> float:
        return self.gamma * self.p


@dataclass(frozen=True)
class RuntimeModel:
    """Wall time per shot of the logical and the physical circuit."""

    tau_logical: float
    tau_physical: float

    def __post_init__(self):
        if not self.tau_physical > 0:
            raise InvalidInputError(f"tau_physical must be positive, got {self.tau_physical}")
        if self.tau_logical < self.tau_physical:
            raise InvalidInputError("tau_logical must be >= tau_physical")


@dataclass(frozen=True)
class ScheduleSpec:
    """Relative noise levels of an extrapolation dataset.

    ``multipliers`` are strictly increasing; the first ``n_logical_points``
    entries are taken on error-corrected hardware, the rest on physical qubits.
    """

    multipliers: tuple[float, ...]
    n_logical_points: int

    def __post_init__(self):
        m = np.asarray(self.multipliers, dtype=float)
        if m.size == 0:
            raise InvalidInputError("schedule needs at least one point")
        if np.any(m <= 0):
            raise InvalidInputError(f"multipliers must be positive, got {list(self.multipliers)}")
        if np.any(np.diff(m) <= 0):
            raise DegenerateScheduleError(
                f"multipliers must be strictly increasing, got {list(self.multipliers)}"
            )
        if not 1 <= self.n_logical_points <= m.size:
            raise InvalidInputError(
                f"n_logical_points must be in [1, {m.size}], got {self.n_logical_points}"
            )

    @property
    def order(self) -> int:
        return len(self.multipliers) - 1

    @property
    def n_points(self) -> int:
        return len(self.multipliers)

    @property
    def n_physical_points(self) -> int:
        return self.n_points - self.n_logical_points

    @classmethod
    def all_logical(cls, order: int, multipliers: Sequence[float] | None = None) -> "ScheduleSpec":
        """Every point error corrected, levels ``M_k * gamma * n * p``."""
        if multipliers is None:
            multipliers = default_logical_multipliers(order)
        _check_length(order + 1, multipliers)
        return cls(tuple(float(x) for x in multipliers), order + 1)

    @classmethod
    def mixed(
        cls, order: int, gamma: float, multipliers: Sequence[float] | None = None
    ) -> "ScheduleSpec":
        """One logical anchor at ``gamma * n * p`` plus physical points at ``M_k * n * p``."""
        if multipliers is None:
            multipliers = default_mixed_multipliers(order)
        _check_length(order, multipliers)
        _check_anchor(gamma, multipliers)
        return cls((float(gamma),) + tuple(float(x) for x in multipliers), 1)


def default_logical_multipliers(order: int) -> list[float]:
    return [float(k) for k in range(1, order + 2)]


def default_mixed_multipliers(order: int) -> list[float]:
    return [float(k) for k in range(2, order + 2)]


def _check_length(expected, multipliers):
    if len(multipliers) != expected:
        raise InvalidInputError(f"expected {expected} multipliers, got {len(multipliers)}")


def _check_anchor(gamma, multipliers):
    if not gamma > 0:
        raise InvalidInputError(f"gamma must be positive, got {gamma}")
    if len(multipliers) and gamma >= min(multipliers):
        raise ScheduleOverlapError(
            f"logical anchor gamma={gamma} must lie below every physical multiplier "
            f"(min {min(multipliers)})"
        )


def _check_distinct(values):
    v = np.asarray(values, dtype=float)
    if np.any(v <= 0):
        raise InvalidInputError(f"multipliers must be positive, got {v.tolist()}")
    if len(np.unique(v)) != v.size:
        raise DegenerateScheduleError(f"multipliers must be distinct, got {v.tolist()}")
    return v


def prefactor_all_logical(order: int, multipliers: Sequence[float] | None = None) -> float:
    """``sum_k prod_{l != k} M_l**2 / (M_l - M_k)**2`` for an all-logical schedule."""
    if multipliers is None:
        multipliers = default_logical_multipliers(order)
    _check_length(order + 1, multipliers)
    m = _check_distinct(multipliers)
    total = 0.0
    for k in range(m.size):
        others = np.delete(m, k)
        total += np.prod(others**2 / (others - m[k]) ** 2)
    return float(total)


def prefactor_mixed(order: int, gamma: float, multipliers: Sequence[float] | None = None) -> float:
    """Variance prefactor with one logical anchor and ``order`` physical points.

    Anchor term ``prod_l M_l**2 / (M_l - gamma)**2`` plus, for each physical
    point, ``gamma**2 / (gamma - M_k)**2 * prod_{l != k} M_l**2 / (M_l - M_k)**2``.
    """
    if multipliers is None:
        multipliers = default_mixed_multipliers(order)
    _check_length(order, multipliers)
    _check_anchor(gamma, multipliers)
    m = _check_distinct(multipliers) if order else np.empty(0)
    anchor = float(np.prod(m**2 / (m - gamma) ** 2))
    rest = 0.0
    for k in range(m.size):
        others = np.delete(m, k)
        rest += gamma**2 / (gamma - m[k]) ** 2 * np.prod(others**2 / (others - m[k]) ** 2)
    return anchor + float(rest)


def schedule_prefactor(schedule: ScheduleSpec) -> float:
    """``sum beta_k**2`` over an arbitrary schedule (scale free)."""
    return float(np.sum(richardson_coefficients(schedule.multipliers) ** 2))


def _cost_per_shot(schedule: ScheduleSpec, runtime: RuntimeModel | None) -> float:
    if runtime is None:
        return float(schedule.n_logical_points)
    return (
        schedule.n_physical_points * runtime.tau_physical
        + schedule.n_logical_points * runtime.tau_logical
    ) / runtime.tau_logical


def runtime_ratio(
    schedule_logical: ScheduleSpec,
    schedule_mixed: ScheduleSpec,
    runtime: RuntimeModel | None = None,
    idealized: bool = False,
) -> float:
    """Physical time of the first schedule over the second at equal target variance.

    Shot counts scale with the prefactors, so the ratio is
    ``(#1 / #2) * cost1 / cost2`` with ``cost = N0 tau_physical + N1 tau_logical``.
    ``idealized=True`` (or ``runtime=None``) takes ``tau_physical / tau_logical -> 0``,
    which for an all-logical first schedule gives ``(#1 / #2) * N / N1``.
    """
    shots_ratio = schedule_prefactor(schedule_logical) / schedule_prefactor(schedule_mixed)
    if idealized:
        runtime = None
    return shots_ratio * _cost_per_shot(schedule_logical, runtime) / _cost_per_shot(
        schedule_mixed, runtime
    )


def shots_equivalence_factor(gamma: float) -> float:
    """Shot ratio all-logical/mixed for the two-point linear case: ``9 ((1-g)/(1+g))**2``."""
    if gamma >= 1:
        raise NoCorrectionError(f"gamma must be < 1, got {gamma}")
    if gamma <= 0:
        raise InvalidInputError(f"gamma must be positive, got {gamma}")
    return 9.0 * ((1.0 - gamma) / (1.0 + gamma)) ** 2


def geometric_runtime_ratio(gamma: float, runtime: RuntimeModel | None = None) -> float:
    """Two-point linear case under the geometric std bound.

    Logical pair at (g, 2g) n p vs. the mixed pair (g, 1) n p.  In the
    idealized limit this is ``2 * shots_equivalence_factor(gamma)``, i.e. 18
    for ``gamma -> 0``.
    """
    if gamma >= 1:
        raise NoCorrectionError(f"gamma must be < 1, got {gamma}")
    logical = linear_geometric_bound(gamma, 2 * gamma, 1.0) ** 2
    mixed = linear_geometric_bound(gamma, 1.0, 1.0) ** 2
    cost_logical = 2.0
    cost_mixed = 1.0 if runtime is None else 1.0 + runtime.tau_physical / runtime.tau_logical
    return logical / mixed * cost_logical / cost_mixed


MultiplierRule = Callable[[int], Sequence[float]]


@dataclass(frozen=True)
class ResourceTables:
    """Runtime-ratio and mixed-variance tables indexed by (gamma, order)."""

    gammas: tuple[float, ...]
    orders: tuple[int, ...]
    tau_ratio: np.ndarray
    mixed_variance: np.ndarray

    def cell(self, gamma: float, order: int) -> tuple[float, float]:
        i = self.gammas.index(gamma)
        j = self.orders.index(order)
        return float(self.tau_ratio[i, j]), float(self.mixed_variance[i, j])

    def to_text(self, which: str) -> str:
        values, title = self._select(which)
        width = 12
        lines = [title, "gamma \\ K".ljust(width) + "".join(str(k).rjust(width) for k in self.orders)]
        for g, row in zip(self.gammas, values):
            lines.append(f"{g:<{width}g}" + "".join(_fmt_cell(v).rjust(width) for v in row))
        return "\n".join(lines) + "\n"

    def to_csv(self, which: str) -> str:
        values, _ = self._select(which)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["gamma", "order", "value"])
        for g, row in zip(self.gammas, values):
            for k, v in zip(self.orders, row):
                writer.writerow([repr(float(g)), k, repr(float(v))])
        return buf.getvalue()

    def _select(self, which):
        if which == "tau_ratio":
            return self.tau_ratio, "tau1/tau2 (all-logical vs mixed runtime at equal variance)"
        if which == "mixed_variance":
            return self.mixed_variance, "Var[O(0)]/sigma^2 (mixed dataset)"
        raise ValueError(f"unknown table {which!r}")


def _fmt_cell(v):
    if v >= 100:
        return f"{v:.0f}"
    if v >= 10:
        return f"{v:.2f}"
    return f"{v:.3f}"


def emit_tables(
    gammas: Sequence[float],
    orders: Sequence[int],
    logical_multipliers: MultiplierRule = default_logical_multipliers,
    mixed_multipliers: MultiplierRule = default_mixed_multipliers,
) -> ResourceTables:
    """Compute the runtime-ratio and mixed-variance tables.

    Runtime ratios use the idealized limit with factor ``N / N1 = K + 1``.
    """
    gammas = tuple(float(g) for g in gammas)
    orders = tuple(int(k) for k in orders)
    for g in gammas:
        if not 0 < g < 1:
            raise InvalidInputError(f"gamma must be in (0, 1), got {g}")
    for k in orders:
        if k < 1:
            raise InvalidInputError(f"orders must be >= 1, got {k}")

    tau = np.empty((len(gammas), len(orders)))
    var = np.empty_like(tau)
    for i, g in enumerate(gammas):
        for j, k in enumerate(orders):
            logical = ScheduleSpec.all_logical(k, logical_multipliers(k))
            mixed = ScheduleSpec.mixed(k, g, mixed_multipliers(k))
            tau[i, j] = runtime_ratio(logical, mixed, idealized=True)
            var[i, j] = prefactor_mixed(k, g, mixed_multipliers(k))
    return ResourceTables(gammas, orders, tau, var)

