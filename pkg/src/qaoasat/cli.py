"""Command-line front end.

Exit status: 0 on success, 1 on usage errors, 2 on runtime or task failures.
Errors are reported on stderr as one JSON line ``{"error": code, "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import experiments as ex
from .engine import AngleSchedule, Implementation, parse_implementation, run_qaoa
from .errors import QaoaSatError
from .mixers import parse_mixer
from .optimizer import OptimizerConfig, optimize_rounds
from .sat import brute_force_oracle, generate_random_instance, parse_dimacs, write_dimacs
from .separators import parse_separator

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


def _emit_error(code: str, message: str) -> None:
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)


# -- config --------------------------------------------------------------------

CONFIG_BLOCKS = {"problem", "implementations", "optimizer", "execution", "output"}


def load_config(path: str | Path) -> dict:
    try:
        config = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(config) - CONFIG_BLOCKS - {"comment"}
    if unknown:
        raise UsageError(f"unknown config block(s): {sorted(unknown)}")
    return config


def _implementations(config: dict, n: int) -> tuple[Implementation, ...]:
    impls = config.get("implementations", "survey")
    if impls == "survey":
        return tuple(ex.survey_implementations(n))
    if impls == "comparison":
        return ex.COMPARISON_IMPLEMENTATIONS
    return tuple(parse_implementation(label) for label in impls)


def _sink(config: dict, args) -> ex.ResultsSink:
    output = config.get("output", {})
    results = args.out or output.get("results", "results.jsonl")
    manifest = output.get("manifest", str(Path(results).with_suffix(".manifest.json")))
    resume = args.resume or config.get("execution", {}).get("resume", False)
    return ex.ResultsSink(results, manifest, resume=resume)


def _execution(config: dict, args) -> tuple[int, int, bool]:
    execution = config.get("execution", {})
    workers = args.workers if args.workers is not None else execution.get("workers", 1)
    return workers, execution.get("p_max", 10), execution.get("timing", True)


def _exit_for(records) -> int:
    failed = [r for r in records if r.kind == "error"]
    for rec in failed:
        _emit_error("task-failed", f"{rec.task_id}: {rec.extra.get('message')}")
    return RUNTIME_ERROR if failed else 0


# -- subcommands ---------------------------------------------------------------

def cmd_gen(args) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        inst = generate_random_instance(args.n, args.k, args.alpha, seed)
        text = write_dimacs(inst)
        if out_dir:
            path = out_dir / f"n{args.n}_k{args.k}_a{args.alpha:g}_s{seed}.cnf"
            path.write_text(text)
            print(path)
        else:
            sys.stdout.write(text)
    return 0


def cmd_solve(args) -> int:
    inst = parse_dimacs(Path(args.instance).read_text())
    table = brute_force_oracle(inst)
    print(f"c_max={table.c_max} ground_states={len(table.ground_states)}")
    if args.histogram:
        for value, count in table.histogram().items():
            print(f"{value} {count}")
    return 0


def _load_instance(args):
    if args.instance:
        return parse_dimacs(Path(args.instance).read_text())
    if None in (args.n, args.k, args.alpha):
        raise UsageError("give --instance or all of --n --k --alpha")
    return generate_random_instance(args.n, args.k, args.alpha, args.seed)


def cmd_run(args) -> int:
    inst = _load_instance(args)
    table = brute_force_oracle(inst)
    impl = Implementation(parse_mixer(args.mixer), parse_separator(args.separator))
    config = OptimizerConfig(seed=args.opt_seed)
    if args.hops is not None:
        config = replace(config, hops=args.hops)
    if args.p < 0:
        raise UsageError("--p must be >= 0")
    if args.p == 0:
        concrete, schedule, evals = impl, AngleSchedule(), 0
    else:
        *_, last = optimize_rounds(inst, impl, args.p, config, table=table)
        concrete, schedule, evals = last.implementation, last.result.schedule, last.result.evals
    state, metrics = run_qaoa(inst, concrete, schedule, table=table)
    print(f"implementation={concrete.label} p={metrics.p} evals={evals}")
    print(f"expectation={metrics.expectation!r}")
    print(f"approximation_ratio={metrics.approximation_ratio!r}")
    print(f"gsp={metrics.gsp!r}")
    print("betas=" + json.dumps(list(schedule.betas)))
    print("gammas=" + json.dumps(list(schedule.gammas)))
    if args.dump_state:
        state.dump(args.dump_state)
    return 0


def cmd_survey(args) -> int:
    config = load_config(args.config)
    problem = config.get("problem", {})
    workers, p_max, timing = _execution(config, args)
    spec = ex.SurveySpec(
        n=problem["n"], k=problem["k"], alpha=problem["alpha"],
        instance_count=problem.get("instance_count", 10),
        instance_seed_base=problem.get("instance_seed_base", 0),
        p_max=p_max,
        optimizer=OptimizerConfig.from_dict(config.get("optimizer")),
        implementations=_implementations(config, problem["n"]),
        record_thresholds=config.get("execution", {}).get("record_thresholds", False),
    )
    trace = config.get("output", {}).get("trace", False)
    records = ex.run_survey(spec, _sink(config, args), workers, timing, trace)
    print(ex.summary_csv(ex.summarize(records)), end="")
    return _exit_for(records)


def cmd_hardness(args) -> int:
    config = load_config(args.config)
    problem = config.get("problem", {})
    workers, p_max, timing = _execution(config, args)
    impls = config.get("implementations", ["grover-Th"])
    impl = parse_implementation(impls[0] if isinstance(impls, list) else "grover-Th")
    sink = _sink(config, args)
    rows = ex.hardness_scan(
        problem["n"], problem["k"], problem.get("densities", ex.DEFAULT_DENSITIES),
        problem.get("instance_count", 10), impl, p_max,
        OptimizerConfig.from_dict(config.get("optimizer")),
        instance_seed_base=problem.get("instance_seed_base", 0),
        sink=sink, workers=workers, timing=timing,
    )
    print(ex.hardness_csv(rows), end="")
    return _exit_for(sink.records)


def cmd_compare(args) -> int:
    config = load_config(args.config)
    problem = config.get("problem", {})
    workers, p_max, timing = _execution(config, args)
    if "implementations" not in config:
        config["implementations"] = "comparison"
    ns = problem.get("ns", [problem.get("n", 6)])
    sink = _sink(config, args)
    records = ex.comparison_run(
        ns, problem["k"], problem["alpha"], problem.get("instance_count", 10),
        _implementations(config, min(ns)), p_max,
        OptimizerConfig.from_dict(config.get("optimizer")),
        instance_seed_base=problem.get("instance_seed_base", 0),
        sink=sink, workers=workers, timing=timing,
    )
    print(ex.summary_csv(ex.summarize(records)), end="")
    return _exit_for(records)


def cmd_report(args) -> int:
    records = list(ex.read_records(args.results))
    out = Path(args.out)
    summary = ex.summarize(records)
    hardness = ex.hardness_table(records)
    if summary or not hardness:
        out.write_text(ex.summary_csv(summary))
        print(out)
    if hardness:
        hpath = out if not summary else out.with_name(out.stem + "_hardness" + out.suffix)
        hpath.write_text(ex.hardness_csv(hardness))
        print(hpath)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qaoasat", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate random k-SAT instances as DIMACS")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="brute-force optimum of a DIMACS file")
    p.add_argument("instance")
    p.add_argument("--histogram", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("run", help="optimize one implementation at one round count")
    p.add_argument("--instance", help="DIMACS file")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mixer", required=True, help='"grover", "W{1}", "W{1..4}", ...')
    p.add_argument("--separator", required=True, help='"obj", "th:<t>" or "th:auto"')
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--opt-seed", type=int, default=0)
    p.add_argument("--hops", type=int)
    p.add_argument("--dump-state", help="write final amplitudes as little-endian complex128")
    p.set_defaults(func=cmd_run)

    for name, func, text in (
        ("survey", cmd_survey, "optimize a set of implementations on random instances"),
        ("hardness", cmd_hardness, "rounds-to-optimal versus clause density"),
        ("compare", cmd_compare, "transverse vs Grover comparison across n"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
        p.add_argument("--workers", type=int)
        p.add_argument("--out", help="results JSON Lines path (overrides config)")
        p.add_argument("--resume", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="aggregate a results file into CSV tables")
    p.add_argument("--results", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return USAGE_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return USAGE_ERROR
    except (KeyError, TypeError) as exc:
        _emit_error("config", f"missing or invalid config field: {exc}")
        return USAGE_ERROR
    except QaoaSatError as exc:
        _emit_error(exc.code, str(exc))
        return RUNTIME_ERROR
    except (OSError, ValueError) as exc:
        _emit_error("runtime", str(exc))
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
