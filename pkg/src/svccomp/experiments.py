"""Experiment configuration, seeded runs, result files, and front comparison.

Configs and outputs are JSON; fronts are additionally mirrored as CSV with
the header ``time_total,cost_total,num_total,allocations``. Front files are
byte-identical across reruns with the same seed; summaries carry wall-clock
timings and are not.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path

from .domain import (
    CandidateService,
    CompositeSolution,
    Order,
    SubTask,
    TaskSpec,
    check_feasible,
)
from .evaluation import total_objectives
from .ranking import dominates
from .solvers import Nsga2Solver, PdgaSolver

ALGORITHMS = ("pdga", "nsga2")


class ConfigError(ValueError):
    """Configuration file is malformed; the message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    task: TaskSpec
    order: Order
    algorithm: str = "pdga"
    iterations: int = 100
    pop_size: int = 50
    limit: float = 0.0
    eta_c: float = 0.1
    eta_m: float = 0.01
    pr_c: float = 1.0
    pr_m: float = 1.0
    seeds: tuple[int, ...] = (0,)
    out_dir: str = "results"


def _require(mapping: dict, key: str, kind, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}: missing field {key!r}")
    value = mapping[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def _parse_task(raw: dict) -> TaskSpec:
    subtasks_raw = _require(raw, "subtasks", list, "config")
    if not subtasks_raw:
        raise ConfigError("config: 'subtasks' must be non-empty")
    subtasks = []
    for k, st in enumerate(subtasks_raw):
        where = f"subtasks[{k}]"
        if not isinstance(st, dict):
            raise ConfigError(f"{where}: must be an object")
        st_id = _require(st, "id", str, where)
        services_raw = _require(st, "services", list, f"sub-task {st_id!r}")
        if not services_raw:
            raise ConfigError(f"sub-task {st_id!r}: 'services' must be non-empty")
        services = []
        for s in services_raw:
            s_where = f"sub-task {st_id!r} service"
            if not isinstance(s, dict):
                raise ConfigError(f"{s_where}: must be an object")
            max_uses = s.get("max_uses")
            if max_uses is not None and (not isinstance(max_uses, int) or isinstance(max_uses, bool)):
                raise ConfigError(f"{s_where}: field 'max_uses' must be int or null")
            try:
                services.append(
                    CandidateService(
                        id=_require(s, "id", str, s_where),
                        unit_time=_require(s, "unit_time", float, s_where),
                        unit_cost=_require(s, "unit_cost", float, s_where),
                        max_uses=max_uses,
                    )
                )
            except ValueError as exc:
                raise ConfigError(f"{s_where}: {exc}") from exc
        try:
            subtasks.append(SubTask(id=st_id, services=tuple(services)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        return TaskSpec(tuple(subtasks))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a parsed JSON object into an ExperimentConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")
    task = _parse_task(raw)

    order_raw = _require(raw, "order", dict, "config")
    try:
        order = Order(
            id=_require(order_raw, "id", str, "order"),
            product_type=_require(order_raw, "product_type", str, "order"),
            quantity=_require(order_raw, "quantity", int, "order"),
        )
    except ValueError as exc:
        raise ConfigError(f"order: {exc}") from exc

    algorithm = raw.get("algorithm", "pdga")
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"config: field 'algorithm' must be one of {ALGORITHMS}")

    seeds = raw.get("seeds", [0])
    if (
        not isinstance(seeds, list)
        or not seeds
        or any(not isinstance(s, int) or isinstance(s, bool) for s in seeds)
    ):
        raise ConfigError("config: field 'seeds' must be a non-empty list of ints")

    def number(key: str, default: float) -> float:
        value = raw.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config: field {key!r} must be a number")
        return float(value)

    iterations = raw.get("iterations", 100)
    pop_size = raw.get("pop_size", 50)
    for key, value in (("iterations", iterations), ("pop_size", pop_size)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ConfigError(f"config: field {key!r} must be a positive int")

    out_dir = raw.get("out_dir", "results")
    if not isinstance(out_dir, str):
        raise ConfigError("config: field 'out_dir' must be a string")

    cfg = ExperimentConfig(
        task=task,
        order=order,
        algorithm=algorithm,
        iterations=iterations,
        pop_size=pop_size,
        limit=number("limit", 0.0),
        eta_c=number("eta_c", 0.1),
        eta_m=number("eta_m", 0.01),
        pr_c=number("pr_c", 1.0),
        pr_m=number("pr_m", 1.0),
        seeds=tuple(seeds),
        out_dir=out_dir,
    )
    check_feasible(cfg.task, cfg.order)  # raises InfeasibleInstanceError
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate an experiment config file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: not valid JSON ({exc})") from exc
    return parse_config(raw)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "subtasks": [
            {
                "id": st.id,
                "services": [
                    {
                        "id": s.id,
                        "unit_time": s.unit_time,
                        "unit_cost": s.unit_cost,
                        "max_uses": s.max_uses,
                    }
                    for s in st.services
                ],
            }
            for st in cfg.task.subtasks
        ],
        "order": {
            "id": cfg.order.id,
            "product_type": cfg.order.product_type,
            "quantity": cfg.order.quantity,
        },
        "algorithm": cfg.algorithm,
        "iterations": cfg.iterations,
        "pop_size": cfg.pop_size,
        "limit": cfg.limit,
        "eta_c": cfg.eta_c,
        "eta_m": cfg.eta_m,
        "pr_c": cfg.pr_c,
        "pr_m": cfg.pr_m,
        "seeds": list(cfg.seeds),
        "out_dir": cfg.out_dir,
    }


def write_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def instance_digest(task: TaskSpec, order: Order) -> str:
    """Stable fingerprint of the problem instance, used to pair front files."""
    payload = json.dumps(
        {
            "quantity": order.quantity,
            "subtasks": [
                [(s.id, s.unit_time, s.unit_cost, s.max_uses) for s in st.services]
                for st in task.subtasks
            ],
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _solver_for(cfg: ExperimentConfig, seed: int):
    common = dict(
        iterations=cfg.iterations,
        pop_size=cfg.pop_size,
        eta_c=cfg.eta_c,
        eta_m=cfg.eta_m,
        pr_c=cfg.pr_c,
        pr_m=cfg.pr_m,
        seed=seed,
    )
    if cfg.algorithm == "pdga":
        return PdgaSolver(search_limit=cfg.limit, **common)
    return Nsga2Solver(**common)


def front_to_dict(cfg: ExperimentConfig, seed: int, front) -> dict:
    return {
        "algorithm": cfg.algorithm,
        "seed": seed,
        "instance_digest": instance_digest(cfg.task, cfg.order),
        "params": {
            "iterations": cfg.iterations,
            "pop_size": cfg.pop_size,
            "limit": cfg.limit,
            "eta_c": cfg.eta_c,
            "eta_m": cfg.eta_m,
            "pr_c": cfg.pr_c,
            "pr_m": cfg.pr_m,
        },
        "solutions": [
            {
                "time_total": obj.time_total,
                "cost_total": obj.cost_total,
                "num_total": obj.num_total,
                "allocations": [list(a.counts) for a in sol.allocations],
            }
            for sol, obj in front
        ],
    }


def front_to_csv(front_doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time_total", "cost_total", "num_total", "allocations"])
    for row in front_doc["solutions"]:
        writer.writerow(
            [
                repr(row["time_total"]),
                repr(row["cost_total"]),
                row["num_total"],
                json.dumps(row["allocations"], separators=(",", ":")),
            ]
        )
    return buf.getvalue()


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> list[dict]:
    """Run every configured seed and persist front + summary files.

    Returns one summary dict per seed. Wall-clock covers solver time only.
    """
    base = Path(out_dir if out_dir is not None else cfg.out_dir)
    base.mkdir(parents=True, exist_ok=True)
    summaries = []
    for seed in cfg.seeds:
        solver = _solver_for(cfg, seed)
        start = time.perf_counter()
        solver.fit(cfg.task, cfg.order)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        front = solver.front_

        stem = f"{cfg.algorithm}_seed{seed}"
        front_doc = front_to_dict(cfg, seed, front)
        front_path = base / f"{stem}_front.json"
        front_path.write_text(
            json.dumps(front_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        (base / f"{stem}_front.csv").write_text(front_to_csv(front_doc), encoding="utf-8")

        sizes = [obj.num_total for _, obj in front]
        summary = {
            "algorithm": cfg.algorithm,
            "seed": seed,
            "front_size": len(front),
            "mean_num_total": sum(sizes) / len(sizes),
            "wall_clock_ms": elapsed_ms,
            "params": front_doc["params"],
            "front_file": front_path.name,
        }
        (base / f"{stem}_summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        summaries.append(summary)
    return summaries


def load_front(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def compare_fronts(front_a: dict, front_b: dict) -> dict:
    """Size, per-objective min/mean, and cross-domination counts for two fronts."""
    if front_a["instance_digest"] != front_b["instance_digest"]:
        raise ValueError("fronts were produced on different problem instances")

    def rows(doc):
        return [
            (s["time_total"], s["cost_total"], s["num_total"]) for s in doc["solutions"]
        ]

    a, b = rows(front_a), rows(front_b)

    def stats(rows_):
        names = ("time_total", "cost_total", "num_total")
        return {
            name: {
                "min": min(r[k] for r in rows_),
                "mean": sum(r[k] for r in rows_) / len(rows_),
            }
            for k, name in enumerate(names)
        }

    dominated_a = sum(1 for x in a if any(dominates(y, x) for y in b))
    dominated_b = sum(1 for x in b if any(dominates(y, x) for y in a))
    return {
        "a": {"algorithm": front_a["algorithm"], "size": len(a), "objectives": stats(a)},
        "b": {"algorithm": front_b["algorithm"], "size": len(b), "objectives": stats(b)},
        "a_rows_dominated_by_b": dominated_a,
        "b_rows_dominated_by_a": dominated_b,
    }


# Experiment sweep from the clothing case study: one NSGA-II run plus PDGA
# runs over a ladder of completion-time limits.
SWEEP_LIMITS = (0, 24000, 26000, 28000, 30000, 32000, 34000,
                36000, 38000, 40000, 42000, 44000, 46000)


def run_sweep(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> list[dict]:
    """The 14-execution study: NSGA-II (x2 iterations) then the PDGA limit ladder."""
    base = Path(out_dir if out_dir is not None else cfg.out_dir)
    base.mkdir(parents=True, exist_ok=True)
    rows = []
    executions = [("nsga2", cfg.iterations * 2, None)] + [
        ("pdga", cfg.iterations, lim) for lim in SWEEP_LIMITS
    ]
    for number, (algorithm, iterations, limit) in enumerate(executions, start=1):
        exec_cfg = ExperimentConfig(
            task=cfg.task,
            order=cfg.order,
            algorithm=algorithm,
            iterations=iterations,
            pop_size=cfg.pop_size,
            limit=cfg.limit if limit is None else float(limit),
            eta_c=cfg.eta_c,
            eta_m=cfg.eta_m,
            pr_c=cfg.pr_c,
            pr_m=cfg.pr_m,
            seeds=cfg.seeds[:1],
            out_dir=str(base / f"execution_{number:02d}"),
        )
        summary = run_experiment(exec_cfg)[0]
        summary["execution"] = number
        summary["limit"] = exec_cfg.limit if algorithm == "pdga" else None
        rows.append(summary)
    (base / "sweep_summary.json").write_text(
        json.dumps(rows, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return rows


def reevaluate_front(cfg: ExperimentConfig, front_doc: dict) -> list[tuple]:
    """Recompute objectives for each front row (used to audit result files)."""
    from .domain import Allocation

    out = []
    for row in front_doc["solutions"]:
        sol = CompositeSolution(
            tuple(Allocation(tuple(c)) for c in row["allocations"])
        )
        out.append(total_objectives(sol, cfg.task, cfg.order).as_tuple())
    return out
