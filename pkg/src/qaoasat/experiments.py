"""Experiment drivers: implementation survey, clause-density hardness scan and
the transverse/Grover comparison, with JSON Lines output and resumable
manifests.

Every task is a pure function of its description (instance identity,
implementation label, optimizer config), so results do not depend on worker
count or completion order. Records are written in task order.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .engine import (
    GROVER_OBJ,
    GROVER_TH,
    TRANSVERSE_OBJ,
    AngleSchedule,
    Implementation,
    parse_implementation,
    run_qaoa,
)
from .errors import QaoaSatError
from .mixers import MixerSpec
from .optimizer import OptimizerConfig, optimize_rounds, rounds_to_optimal
from .sat import SatInstance, brute_force_oracle, generate_random_instance, parse_dimacs
from .separators import SeparatorSpec

log = logging.getLogger(__name__)

COMPARISON_IMPLEMENTATIONS = (TRANSVERSE_OBJ, GROVER_TH, GROVER_OBJ)
DEFAULT_DENSITIES = tuple(x / 2 for x in range(1, 13))  # 0.5, 1.0, ..., 6.0
# hardness-scan instance seeds: base + stride * density_index + i
DENSITY_SEED_STRIDE = 10_000


def survey_mixer_set(n: int) -> list[MixerSpec]:
    """Prefixes {1..i} (i=2..n), suffixes {i..n} (i=2..n-1), singletons {i}."""
    if n < 2:
        raise ValueError(f"survey mixer set needs n >= 2, got {n}")
    mixers = [MixerSpec(tuple(range(1, i + 1))) for i in range(2, n + 1)]
    mixers += [MixerSpec(tuple(range(i, n + 1))) for i in range(2, n)]
    mixers += [MixerSpec((i,)) for i in range(1, n + 1)]
    return mixers


def survey_implementations(n: int) -> list[Implementation]:
    """Each survey mixer with the objective and the auto-threshold separator."""
    return [
        Implementation(mixer, sep)
        for mixer in survey_mixer_set(n)
        for sep in (SeparatorSpec.objective(), SeparatorSpec.thresh())
    ]


@dataclass(frozen=True)
class InstanceRef:
    """How a task finds its instance: a generator tuple or a DIMACS path."""

    n: int
    k: int
    alpha: float
    seed: int | None = None
    path: str | None = None

    def load(self) -> SatInstance:
        if self.path is not None:
            return parse_dimacs(Path(self.path).read_text())
        return generate_random_instance(self.n, self.k, self.alpha, self.seed)

    @property
    def key(self) -> str:
        if self.path is not None:
            return f"file:{self.path}"
        return f"n{self.n}-k{self.k}-a{self.alpha:g}-s{self.seed}"


@dataclass(frozen=True)
class SurveySpec:
    n: int
    k: int
    alpha: float
    instance_count: int
    instance_seed_base: int
    p_max: int
    optimizer: OptimizerConfig = OptimizerConfig()
    implementations: tuple[Implementation, ...] = ()
    record_thresholds: bool = False

    def __post_init__(self) -> None:
        if self.instance_count < 1 or self.p_max < 1:
            raise ValueError("instance_count and p_max must be >= 1")
        if not self.implementations:
            object.__setattr__(self, "implementations", tuple(survey_implementations(self.n)))

    def instances(self) -> list[InstanceRef]:
        return [
            InstanceRef(self.n, self.k, float(self.alpha), self.instance_seed_base + i)
            for i in range(self.instance_count)
        ]


@dataclass
class ResultRecord:
    kind: str  # "result", "threshold", "hardness" or "error"
    task_id: str
    instance: dict
    implementation: str
    p: int | None = None
    t: int | None = None
    betas: list[float] = field(default_factory=list)
    gammas: list[float] = field(default_factory=list)
    expectation: float | None = None
    approximation_ratio: float | None = None
    gsp: float | None = None
    evals: int | None = None
    wall_time: float | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "ResultRecord":
        return cls(**data)


@dataclass(frozen=True)
class Task:
    task_id: str
    kind: str  # "survey" or "hardness"
    instance: InstanceRef
    implementation: str
    p_max: int
    optimizer: dict
    record_thresholds: bool = False
    timing: bool = True
    trace: bool = False


def _survey_task(task: Task) -> list[ResultRecord]:
    config = OptimizerConfig.from_dict(task.optimizer)
    impl = parse_implementation(task.implementation)
    instance = task.instance.load()
    table = brute_force_oracle(instance)
    inst = asdict(task.instance)
    records = []
    clock = time.perf_counter()
    for rr in optimize_rounds(instance, impl, task.p_max, config, table=table):
        _, metrics = run_qaoa(instance, rr.implementation, rr.result.schedule, table=table)
        now = time.perf_counter()
        records.append(
            ResultRecord(
                kind="result",
                task_id=task.task_id,
                instance=inst,
                implementation=impl.label,
                p=rr.p,
                t=rr.implementation.separator.threshold,
                betas=list(rr.result.schedule.betas),
                gammas=list(rr.result.schedule.gammas),
                expectation=metrics.expectation,
                approximation_ratio=metrics.approximation_ratio,
                gsp=metrics.gsp,
                evals=rr.result.evals,
                wall_time=(now - clock) if task.timing else None,
                extra={"trace": [list(h) for h in rr.result.trace]} if task.trace else {},
            )
        )
        clock = now
        if task.record_thresholds:
            for t, sub in sorted(rr.per_threshold.items()):
                _, sm = run_qaoa(instance, impl.with_threshold(t), sub.schedule, table=table)
                records.append(
                    ResultRecord(
                        kind="threshold",
                        task_id=task.task_id,
                        instance=inst,
                        implementation=impl.label,
                        p=rr.p,
                        t=t,
                        betas=list(sub.schedule.betas),
                        gammas=list(sub.schedule.gammas),
                        expectation=sm.expectation,
                        approximation_ratio=sm.approximation_ratio,
                        gsp=sm.gsp,
                        evals=sub.evals,
                    )
                )
    return records


def _hardness_task(task: Task) -> list[ResultRecord]:
    config = OptimizerConfig.from_dict(task.optimizer)
    impl = parse_implementation(task.implementation)
    instance = task.instance.load()
    table = brute_force_oracle(instance)
    clock = time.perf_counter()
    rounds = rounds_to_optimal(instance, impl, config, task.p_max, table=table)
    return [
        ResultRecord(
            kind="hardness",
            task_id=task.task_id,
            instance=asdict(task.instance),
            implementation=impl.label,
            p=rounds,
            wall_time=(time.perf_counter() - clock) if task.timing else None,
            extra={"saturated": rounds is None, "p_max": task.p_max, "c_max": table.c_max},
        )
    ]


def execute_task(task: Task) -> list[ResultRecord]:
    """Run one task; failures become a single error record."""
    try:
        if task.kind == "survey":
            return _survey_task(task)
        if task.kind == "hardness":
            return _hardness_task(task)
        raise ValueError(f"unknown task kind {task.kind!r}")
    except (QaoaSatError, ValueError, ArithmeticError) as exc:
        return [
            ResultRecord(
                kind="error",
                task_id=task.task_id,
                instance=asdict(task.instance),
                implementation=task.implementation,
                extra={"error": type(exc).__name__, "message": str(exc)},
            )
        ]


class ResultsSink:
    """Append-only JSON Lines writer plus a task-status manifest.

    With no ``path`` records are only kept in memory.
    """

    def __init__(self, path: str | os.PathLike | None = None,
                 manifest: str | os.PathLike | None = None, resume: bool = False):
        self.path = Path(path) if path else None
        self.manifest_path = Path(manifest) if manifest else None
        self.status: dict[str, str] = {}
        if resume and self.manifest_path and self.manifest_path.exists():
            self.status = json.loads(self.manifest_path.read_text())
        elif self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("")
        self.records: list[ResultRecord] = []
        if resume and self.path is not None and self.path.exists():
            self.records = list(read_records(self.path))
            done = {tid for tid, s in self.status.items() if s in ("done", "error")}
            # drop partial output from tasks the manifest does not list as finished
            kept = [r for r in self.records if r.task_id in done]
            if len(kept) != len(self.records):
                self.path.write_text("".join(r.to_json() + "\n" for r in kept))
            self.records = kept

    def is_done(self, task_id: str) -> bool:
        return self.status.get(task_id) in ("done", "error")

    def write(self, task_id: str, records: Sequence[ResultRecord]) -> None:
        self.records.extend(records)
        if self.path is not None:
            with self.path.open("a") as fh:
                for rec in records:
                    fh.write(rec.to_json() + "\n")
        failed = any(r.kind == "error" for r in records)
        self.status[task_id] = "error" if failed else "done"
        if self.manifest_path is not None:
            tmp = self.manifest_path.with_suffix(".tmp")
            tmp.write_text(json.dumps(self.status, indent=1, sort_keys=True))
            tmp.replace(self.manifest_path)


def run_tasks(tasks: Sequence[Task], sink: ResultsSink, workers: int = 1) -> list[ResultRecord]:
    """Execute tasks, streaming their records to ``sink`` in task order."""
    pending = [t for t in tasks if not sink.is_done(t.task_id)]
    if len(pending) < len(tasks):
        log.info("resuming: %d of %d tasks already finished", len(tasks) - len(pending), len(tasks))
    if workers <= 1 or len(pending) <= 1:
        for task in pending:
            log.info("task %s", task.task_id)
            sink.write(task.task_id, execute_task(task))
        return sink.records
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(execute_task, t) for t in pending]
        for task, fut in zip(pending, futures):
            sink.write(task.task_id, fut.result())
            log.info("task %s", task.task_id)
    return sink.records


def survey_tasks(spec: SurveySpec, timing: bool = True, trace: bool = False) -> list[Task]:
    return [
        Task(
            task_id=f"{ref.key}/{impl.label}",
            kind="survey",
            instance=ref,
            implementation=impl.label,
            p_max=spec.p_max,
            optimizer=spec.optimizer.to_dict(),
            record_thresholds=spec.record_thresholds,
            timing=timing,
            trace=trace,
        )
        for ref in spec.instances()
        for impl in spec.implementations
    ]


def run_survey(spec: SurveySpec, sink: ResultsSink | None = None, workers: int = 1,
               timing: bool = True, trace: bool = False) -> list[ResultRecord]:
    """Optimize every (instance, implementation) for p = 1..p_max.

    Emits one ``result`` record per (instance, implementation, p).
    """
    sink = sink or ResultsSink()
    return run_tasks(survey_tasks(spec, timing, trace), sink, workers)


@dataclass(frozen=True)
class HardnessRow:
    density: float
    instances: int
    solved: int
    mean_rounds: float | None
    stdev_rounds: float | None
    saturation_fraction: float


def hardness_tasks(n: int, k: int, densities: Sequence[float], instance_count: int,
                   impl: Implementation, p_max: int, optimizer: OptimizerConfig,
                   instance_seed_base: int = 0, timing: bool = True) -> list[Task]:
    tasks = []
    for d_idx, density in enumerate(densities):
        if density <= 0:
            raise ValueError(f"densities must be positive, got {density}")
        for i in range(instance_count):
            ref = InstanceRef(n, k, float(density),
                              instance_seed_base + DENSITY_SEED_STRIDE * d_idx + i)
            tasks.append(Task(f"{ref.key}/{impl.label}", "hardness", ref, impl.label,
                              p_max, optimizer.to_dict(), timing=timing))
    return tasks


def hardness_table(records: Iterable[ResultRecord]) -> list[HardnessRow]:
    """Per density: mean/stdev of rounds over unsaturated instances and the
    saturated fraction."""
    by_density: dict[float, list[ResultRecord]] = {}
    for rec in records:
        if rec.kind == "hardness":
            by_density.setdefault(rec.instance["alpha"], []).append(rec)
    rows = []
    for density in sorted(by_density):
        recs = by_density[density]
        solved = [r.p for r in recs if r.p is not None]
        rows.append(HardnessRow(
            density=density,
            instances=len(recs),
            solved=len(solved),
            mean_rounds=statistics.fmean(solved) if solved else None,
            stdev_rounds=statistics.pstdev(solved) if solved else None,
            saturation_fraction=(len(recs) - len(solved)) / len(recs),
        ))
    return rows


def hardness_scan(n: int, k: int, densities: Sequence[float], instance_count: int,
                  impl: Implementation = GROVER_TH, p_max: int = 10,
                  optimizer: OptimizerConfig = OptimizerConfig(), *,
                  instance_seed_base: int = 0, sink: ResultsSink | None = None,
                  workers: int = 1, timing: bool = True) -> list[HardnessRow]:
    """Rounds-to-optimal statistics as a function of clause density."""
    sink = sink or ResultsSink()
    tasks = hardness_tasks(n, k, densities, instance_count, impl, p_max, optimizer,
                           instance_seed_base, timing)
    records = run_tasks(tasks, sink, workers)
    return hardness_table(records)


def comparison_run(ns: Sequence[int], k: int, alpha: float, instance_count: int,
                   impls: Sequence[Implementation] = COMPARISON_IMPLEMENTATIONS,
                   p_max: int = 6, optimizer: OptimizerConfig = OptimizerConfig(), *,
                   instance_seed_base: int = 0, sink: ResultsSink | None = None,
                   workers: int = 1, timing: bool = True) -> list[ResultRecord]:
    """Survey restricted to a few implementations across several sizes."""
    sink = sink or ResultsSink()
    tasks = []
    for n in ns:
        spec = SurveySpec(n, k, alpha, instance_count, instance_seed_base, p_max,
                          optimizer, tuple(impls))
        tasks.extend(survey_tasks(spec, timing))
    return run_tasks(tasks, sink, workers)


# -- aggregation ---------------------------------------------------------------

SUMMARY_FIELDS = ("n", "k", "alpha", "implementation", "p", "count",
                  "mean_ar", "stdev_ar", "mean_gsp", "stdev_gsp", "mean_expectation")


def summarize(records: Iterable[ResultRecord]) -> list[dict]:
    """Mean and spread of AR and GSP per (n, k, alpha, implementation, p)."""
    groups: dict[tuple, list[ResultRecord]] = {}
    for rec in records:
        if rec.kind != "result":
            continue
        inst = rec.instance
        key = (inst["n"], inst["k"], inst["alpha"], rec.implementation, rec.p)
        groups.setdefault(key, []).append(rec)
    rows = []
    for key in sorted(groups):
        recs = groups[key]
        ars = [r.approximation_ratio for r in recs]
        gsps = [r.gsp for r in recs]
        rows.append({
            "n": key[0], "k": key[1], "alpha": key[2], "implementation": key[3], "p": key[4],
            "count": len(recs),
            "mean_ar": statistics.fmean(ars),
            "stdev_ar": statistics.pstdev(ars),
            "mean_gsp": statistics.fmean(gsps),
            "stdev_gsp": statistics.pstdev(gsps),
            "mean_expectation": statistics.fmean(r.expectation for r in recs),
        })
    return rows


def summary_csv(rows: Sequence[dict], fields: Sequence[str] = SUMMARY_FIELDS) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({f: (repr(v) if isinstance(v, float) else v) for f, v in row.items()})
    return out.getvalue()


def hardness_csv(rows: Sequence[HardnessRow]) -> str:
    fields = list(HardnessRow.__dataclass_fields__)
    return summary_csv([asdict(r) for r in rows], fields)


def read_records(path: str | os.PathLike) -> Iterator[ResultRecord]:
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield ResultRecord.from_dict(json.loads(line))


def rerun_record(record: ResultRecord) -> float:
    """Re-evaluate a result record's schedule; returns the expectation."""
    ref = InstanceRef(**record.instance)
    impl = parse_implementation(record.implementation)
    if impl.separator.is_auto:
        impl = impl.with_threshold(record.t)
    _, metrics = run_qaoa(ref.load(), impl, AngleSchedule(record.betas, record.gammas))
    return metrics.expectation
