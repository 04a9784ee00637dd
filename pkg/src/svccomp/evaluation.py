"""Objective evaluation: bottleneck times, pipeline completion recursion, totals.

Sub-tasks run sequentially but overlap like a pipeline: a sub-task starts
processing units as soon as its predecessor releases them. The completion
time of stage i is approximated recursively as

    Time_1 = bottleneck_time_1
    Time_i = max(bottleneck_time_i, Time_{i-1} - bottleneck_unit_time_{i-1}
                                     + bottleneck_unit_time_i)

and the task total adds one bottleneck unit time per earlier stage. Cost and
service count are plain sums over stages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import (
    Allocation,
    CompositeSolution,
    ObjectiveVector,
    Order,
    SubTask,
    TaskSpec,
    support,
    validate_allocation,
)


@dataclass(frozen=True)
class SubTaskEval:
    """Per-sub-task metrics of one allocation."""

    bottleneck_time: float
    bottleneck_unit_time: float
    cost: float
    num_selected: int


def cumulative_usage_time(count: int, unit_time: float) -> float:
    """Total busy time of one service used `count` times."""
    if count < 0:
        raise ValueError("count must be >= 0")
    return count * unit_time


def eval_subtask(a: Allocation, st: SubTask, o: Order) -> SubTaskEval:
    """Evaluate one allocation: bottleneck time, its unit time, cost, count.

    The bottleneck is the selected service with the longest cumulative usage
    time; ties prefer the smaller unit time (it minimizes the pipeline
    offsets), then the earlier list position.
    """
    verdict = validate_allocation(a, st, o)
    if verdict is not None:
        raise ValueError(f"invalid allocation for sub-task {st.id!r}: {verdict.value}")

    selected = support(a)
    best_j = None
    best = (-1.0, 0.0)
    cost = 0.0
    for j, (c, svc) in enumerate(zip(a.counts, st.services)):
        cost += c * svc.unit_cost
        if c > 0:
            cum = cumulative_usage_time(c, svc.unit_time)
            # maximize cumulative time, minimize unit time on ties
            if cum > best[0] or (cum == best[0] and svc.unit_time < best[1]):
                best = (cum, svc.unit_time)
                best_j = j
    assert best_j is not None
    return SubTaskEval(
        bottleneck_time=best[0],
        bottleneck_unit_time=best[1],
        cost=cost,
        num_selected=len(selected),
    )


def completion_times(s: CompositeSolution, t: TaskSpec, o: Order) -> list[float]:
    """Recursive stage completion times Time_1..Time_I."""
    evals = [eval_subtask(a, st, o) for a, st in zip(s.allocations, t.subtasks)]
    times: list[float] = []
    for i, ev in enumerate(evals):
        if i == 0:
            times.append(ev.bottleneck_time)
        else:
            prev = evals[i - 1]
            times.append(
                max(
                    ev.bottleneck_time,
                    times[-1] - prev.bottleneck_unit_time + ev.bottleneck_unit_time,
                )
            )
    return times


def total_objectives(s: CompositeSolution, t: TaskSpec, o: Order) -> ObjectiveVector:
    """The three minimized totals of a complete solution."""
    evals = [eval_subtask(a, st, o) for a, st in zip(s.allocations, t.subtasks)]
    times = completion_times(s, t, o)
    offset = sum(ev.bottleneck_unit_time for ev in evals[:-1])
    return ObjectiveVector(
        time_total=times[-1] + offset,
        cost_total=sum(ev.cost for ev in evals),
        num_total=sum(ev.num_selected for ev in evals),
    )


# --- array layer -----------------------------------------------------------
#
# The solvers keep populations as integer count matrices; the helpers below
# evaluate whole populations at once.


@dataclass(frozen=True)
class ServiceArrays:
    """Per-sub-task service attributes as numpy arrays."""

    unit_times: np.ndarray
    unit_costs: np.ndarray
    caps: np.ndarray  # effective caps, already clipped to the order quantity

    @classmethod
    def from_subtask(cls, st: SubTask, quantity: int) -> "ServiceArrays":
        times = np.array([s.unit_time for s in st.services], dtype=float)
        costs = np.array([s.unit_cost for s in st.services], dtype=float)
        caps = np.array(
            [quantity if s.max_uses is None else min(s.max_uses, quantity) for s in st.services],
            dtype=np.int64,
        )
        return cls(times, costs, caps)

    @property
    def n_services(self) -> int:
        return len(self.unit_times)


def batch_metrics(
    counts: np.ndarray, arrays: ServiceArrays
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(bottleneck_time, bottleneck_unit_time, cost, num) for each row of counts."""
    cum = counts * arrays.unit_times
    lt = cum.max(axis=1)
    # among bottleneck ties, the smallest unit time wins
    at_max = cum == lt[:, None]
    ut = np.where(at_max, arrays.unit_times, np.inf).min(axis=1)
    cost = counts @ arrays.unit_costs
    num = np.count_nonzero(counts, axis=1)
    return lt, ut, cost, num


def batch_objectives(
    stage_lt: list[np.ndarray],
    stage_ut: list[np.ndarray],
    stage_cost: list[np.ndarray],
    stage_num: list[np.ndarray],
) -> np.ndarray:
    """Stack per-stage metric arrays into an (n, 3) objective matrix."""
    time = stage_lt[0].astype(float).copy()
    for i in range(1, len(stage_lt)):
        np.maximum(stage_lt[i], time - stage_ut[i - 1] + stage_ut[i], out=time)
    time += sum(stage_ut[:-1]) if len(stage_ut) > 1 else 0.0
    cost = sum(stage_cost)
    num = sum(stage_num)
    return np.column_stack((time, cost, num.astype(float)))
