"""Angle finding for QAOA schedules.

The optimizer maximizes <H_C> over the 2p angles. Each round count ``p`` starts
from the optimal schedule at ``p - 1`` extended by one round (a copy of the
last round, and separately an all-zero round, keeping the better), runs a
bounded Nelder-Mead search, then basin-hops: the incumbent is perturbed by
Gaussian noise, re-optimized locally and replaced if improved.

Threshold separators additionally scan the integer threshold ``t`` and keep
the best; each threshold keeps its own chain of schedules across ``p``.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.optimize import minimize

from .engine import (
    AngleSchedule,
    Implementation,
    QaoaSimulator,
    run_qaoa,
)
from .errors import NumericInputError
from .mixers import MixerSpec
from .sat import CostTable, SatInstance, brute_force_oracle, write_dimacs
from .separators import SeparatorSpec

TWO_PI = 2.0 * math.pi
ANGLE_BOUNDS = (0.0, TWO_PI)
# threshold candidates whose optimized objectives differ by less than this tie
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    hops: int = 16
    local_tolerance: float = 1e-6
    max_local_evals: int = 2000
    perturbation_scale: float = 0.3
    seed: int = 0
    epsilon_optimal: float = 1e-3
    initial_angle: float = 0.1
    simplex_step: float = 0.1
    zero_pad_start: bool = True
    full_threshold_scan: bool = False

    def __post_init__(self) -> None:
        if self.hops < 0 or self.max_local_evals < 1:
            raise ValueError("hops must be >= 0 and max_local_evals >= 1")
        for name in ("local_tolerance", "perturbation_scale", "epsilon_optimal", "simplex_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_dict(cls, data: dict | None) -> "OptimizerConfig":
        data = dict(data or {})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown optimizer option(s): {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True)
class OptimizationResult:
    schedule: AngleSchedule
    objective: float
    evals: int
    trace: tuple[tuple[float, float], ...] = ()
    threshold: int | None = None
    threshold_objectives: dict[int, float] = field(default_factory=dict)


def local_optimize(
    objective: Callable[[np.ndarray], float],
    start: Sequence[float],
    bounds: Sequence[tuple[float, float]] | tuple[float, float] = ANGLE_BOUNDS,
    config: OptimizerConfig = OptimizerConfig(),
) -> tuple[np.ndarray, float, int]:
    """Maximize ``objective`` by Nelder-Mead with box projection.

    Stops when the simplex objective spread falls below
    ``config.local_tolerance`` or after ``config.max_local_evals`` evaluations.
    Returns ``(point, value, evals)``; never worse than ``start``.
    """
    x0 = np.asarray(start, dtype=float)
    dim = x0.shape[0]
    if isinstance(bounds, tuple) and len(bounds) == 2 and np.isscalar(bounds[0]):
        bounds = [bounds] * dim
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise NumericInputError(f"start point {x0} outside bounds")

    evals = 0

    def value(x: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        v = float(objective(x))
        if not math.isfinite(v):
            raise NumericInputError(f"objective returned {v} at {list(x)}")
        return v

    f0 = value(x0)
    if dim == 0:
        return x0, f0, evals

    step = config.simplex_step
    simplex = [x0]
    for i in range(dim):
        vertex = x0.copy()
        vertex[i] = x0[i] + step if x0[i] + step <= hi[i] else x0[i] - step
        simplex.append(np.clip(vertex, lo, hi))

    res = minimize(
        lambda x: -value(x),
        x0,
        method="Nelder-Mead",
        bounds=list(zip(lo, hi)),
        options={
            "initial_simplex": np.array(simplex),
            "maxfev": max(config.max_local_evals - 1, 1),
            "fatol": config.local_tolerance,
            "xatol": np.inf,
        },
    )
    best_x = np.clip(np.asarray(res.x, dtype=float), lo, hi)
    best_f = -float(res.fun)
    if best_f < f0:
        return x0, f0, evals
    return best_x, best_f, evals


def extrapolate_schedule(
    prev: AngleSchedule | None, config: OptimizerConfig = OptimizerConfig()
) -> AngleSchedule:
    """Extend ``prev`` by one round that repeats its last (beta, gamma).

    With no previous rounds the single round starts at ``config.initial_angle``.
    """
    if prev is None or prev.p == 0:
        a = config.initial_angle
        return AngleSchedule((a,), (a,))
    return AngleSchedule(
        prev.betas + (prev.betas[-1],), prev.gammas + (prev.gammas[-1],)
    )


def zero_padded_schedule(prev: AngleSchedule) -> AngleSchedule:
    """Extend ``prev`` by an identity round; reproduces ``prev``'s objective."""
    return AngleSchedule(prev.betas + (0.0,), prev.gammas + (0.0,))


def _task_tag(*parts) -> int:
    return zlib.crc32("|".join(str(p) for p in parts).encode())


def _instance_tag(instance: SatInstance) -> int:
    return zlib.crc32(write_dimacs(instance).encode())


def task_rng(config: OptimizerConfig, instance: SatInstance, impl: Implementation, p: int):
    """RNG stream keyed by (seed, instance, implementation, p), independent of
    execution order."""
    seq = np.random.SeedSequence(
        [config.seed & 0xFFFFFFFFFFFFFFFF, _instance_tag(instance), _task_tag(impl.label), p]
    )
    return np.random.default_rng(seq)


def basin_hop(
    instance: SatInstance,
    impl: Implementation,
    p: int,
    config: OptimizerConfig = OptimizerConfig(),
    *,
    prev: AngleSchedule | None = None,
    table: CostTable | None = None,
    target: float | None = None,
) -> OptimizationResult:
    """Optimize the ``p``-round schedule of a concrete implementation.

    ``prev`` is the optimized ``p - 1`` schedule; if omitted it is computed by
    optimizing ``1..p-1`` first. ``target`` stops the search early once
    ``<H_C>`` reaches it.
    """
    if table is None:
        table = brute_force_oracle(instance)
    sim = QaoaSimulator(table, impl)
    if p == 0:
        empty = AngleSchedule()
        return OptimizationResult(empty, sim.expectation(empty), 1)
    if p > 1 and (prev is None or prev.p != p - 1):
        prev = basin_hop(instance, impl, p - 1, config, table=table).schedule
    if p == 1:
        prev = AngleSchedule()

    objective = sim.expectation_vector

    starts = [extrapolate_schedule(prev, config)]
    if config.zero_pad_start and p > 1:
        starts.append(zero_padded_schedule(prev))

    evals = 0
    best_x: np.ndarray | None = None
    best_f = -math.inf
    trace: list[tuple[float, float]] = []
    for start in starts:
        x0 = np.clip(start.as_vector(), *ANGLE_BOUNDS)
        x, f, used = local_optimize(objective, x0, ANGLE_BOUNDS, config)
        evals += used
        trace.append((objective(x0), f))
        if f > best_f:
            best_x, best_f = x, f

    rng = task_rng(config, instance, impl, p)
    for _ in range(config.hops):
        if target is not None and best_f >= target:
            break
        x0 = np.mod(best_x + rng.normal(0.0, config.perturbation_scale, best_x.shape), TWO_PI)
        f0 = objective(x0)
        x, f, used = local_optimize(objective, x0, ANGLE_BOUNDS, config)
        evals += used + 1
        trace.append((f0, f))
        if f > best_f:
            best_x, best_f = x, f

    schedule = AngleSchedule.from_vector(best_x)
    _, metrics = run_qaoa(instance, impl, schedule, table=table)
    return OptimizationResult(
        schedule=schedule,
        objective=metrics.expectation,
        evals=evals,
        trace=tuple(trace),
        threshold=impl.separator.threshold,
    )


def threshold_window(table: CostTable, config: OptimizerConfig) -> range:
    """Candidate thresholds, largest first."""
    lo = 1 if config.full_threshold_scan else max(1, math.ceil(table.mean - 1e-12))
    return range(table.c_max, lo - 1, -1)


def _pick_threshold(results: dict[int, OptimizationResult]) -> int:
    best_t = None
    for t in sorted(results, reverse=True):
        if best_t is None or results[t].objective > results[best_t].objective + TIE_TOLERANCE:
            best_t = t
    return best_t


def scan_thresholds(
    instance: SatInstance,
    mixer: MixerSpec,
    p: int,
    config: OptimizerConfig = OptimizerConfig(),
    *,
    prev: dict[int, AngleSchedule] | None = None,
    table: CostTable | None = None,
    target: float | None = None,
) -> tuple[int, OptimizationResult]:
    """Optimize every threshold in the window and return the best.

    Ties go to the larger threshold. ``prev`` maps threshold to its optimized
    ``p - 1`` schedule. With ``target`` set, thresholds are tried from the
    largest down and the scan stops at the first one reaching it.
    """
    if table is None:
        table = brute_force_oracle(instance)
    results: dict[int, OptimizationResult] = {}
    for t in threshold_window(table, config):
        impl = Implementation(mixer, SeparatorSpec.thresh(t))
        results[t] = basin_hop(
            instance, impl, p, config,
            prev=None if prev is None else prev.get(t),
            table=table, target=target,
        )
        if target is not None and results[t].objective >= target:
            break
    t_best = _pick_threshold(results)
    best = replace(
        results[t_best],
        threshold=t_best,
        threshold_objectives={t: r.objective for t, r in sorted(results.items())},
    )
    return t_best, best


@dataclass(frozen=True)
class RoundResult:
    """Outcome of optimizing one round count for an implementation."""

    p: int
    implementation: Implementation  # concrete (threshold resolved)
    result: OptimizationResult
    per_threshold: dict[int, OptimizationResult] = field(default_factory=dict)


def optimize_rounds(
    instance: SatInstance,
    impl: Implementation,
    p_max: int,
    config: OptimizerConfig = OptimizerConfig(),
    *,
    table: CostTable | None = None,
    target: float | None = None,
) -> Iterator[RoundResult]:
    """Yield the optimized result for p = 1..p_max, chaining schedules across p.

    ``th:auto`` implementations scan thresholds at every p, each threshold
    extrapolating from its own optimum at p - 1.
    """
    if table is None:
        table = brute_force_oracle(instance)
    if not impl.separator.is_auto:
        prev = None
        for p in range(1, p_max + 1):
            res = basin_hop(instance, impl, p, config, prev=prev, table=table, target=target)
            prev = res.schedule
            yield RoundResult(p, impl, res)
        return
    prev_by_t: dict[int, AngleSchedule] = {}
    for p in range(1, p_max + 1):
        per_t: dict[int, OptimizationResult] = {}
        for t in threshold_window(table, config):
            concrete = impl.with_threshold(t)
            per_t[t] = basin_hop(
                instance, concrete, p, config,
                prev=prev_by_t.get(t), table=table, target=target,
            )
            prev_by_t[t] = per_t[t].schedule
            if target is not None and per_t[t].objective >= target:
                break
        t_best = _pick_threshold(per_t)
        best = replace(
            per_t[t_best],
            threshold=t_best,
            threshold_objectives={t: r.objective for t, r in sorted(per_t.items())},
        )
        yield RoundResult(p, impl.with_threshold(t_best), best, per_t)


def rounds_to_optimal(
    instance: SatInstance,
    impl: Implementation,
    config: OptimizerConfig = OptimizerConfig(),
    p_max: int = 10,
    *,
    table: CostTable | None = None,
) -> int | None:
    """Smallest p whose optimized state has AR >= 1 - epsilon; ``None`` if no
    p <= p_max gets there (saturated)."""
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    if table is None:
        table = brute_force_oracle(instance)
    target = (1.0 - config.epsilon_optimal) * table.c_max
    if table.mean >= target:
        return 0
    for rr in optimize_rounds(instance, impl, p_max, config, table=table, target=target):
        if rr.result.objective >= target:
            return rr.p
    return None
