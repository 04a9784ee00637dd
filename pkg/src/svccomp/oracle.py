"""Exact reference answers for tiny instances by exhaustive enumeration.

Not a solver: a hard combination budget is enforced, and the output is the
exact Pareto front used as ground truth by the test suite.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .domain import (
    Allocation,
    CompositeSolution,
    ObjectiveVector,
    Order,
    SubTask,
    TaskSpec,
)
from .evaluation import ServiceArrays, batch_metrics, batch_objectives
from .ranking import fast_non_dominated_sort

DEFAULT_BUDGET = 10**6


class BudgetExceededError(ValueError):
    """The instance is too large for exhaustive enumeration."""


def enumerate_allocations(
    st: SubTask, o: Order, budget: int = DEFAULT_BUDGET
) -> list[Allocation]:
    """All valid allocations of the order quantity over one sub-task's services."""
    n = len(st.services)
    total = math.comb(o.quantity + n - 1, n - 1)
    if total > budget:
        raise BudgetExceededError(
            f"sub-task {st.id!r}: {total} compositions exceed the budget {budget}"
        )
    caps = [o.quantity if s.max_uses is None else s.max_uses for s in st.services]
    out: list[Allocation] = []

    def walk(prefix: list[int], remaining: int, j: int) -> None:
        if j == n - 1:
            if remaining <= caps[j]:
                out.append(Allocation(tuple(prefix + [remaining])))
            return
        for c in range(min(remaining, caps[j]) + 1):
            walk(prefix + [c], remaining - c, j + 1)

    walk([], o.quantity, 0)
    return out


def exact_pareto_front(
    task: TaskSpec, order: Order, budget: int = DEFAULT_BUDGET
) -> list[tuple[CompositeSolution, ObjectiveVector]]:
    """Exact non-dominated set over every feasible complete solution.

    Deduplicated by objective vector (first solution kept) and returned in
    lexicographic objective order.
    """
    per_subtask = [enumerate_allocations(st, order, budget) for st in task.subtasks]
    counts = [len(a) for a in per_subtask]
    total = math.prod(counts)
    if total > budget:
        raise BudgetExceededError(
            f"{total} complete solutions exceed the budget {budget}"
        )

    arrays = [ServiceArrays.from_subtask(st, order.quantity) for st in task.subtasks]
    # per-sub-task metrics for each candidate allocation
    stage_metrics = []
    for allocs, arr in zip(per_subtask, arrays):
        mat = np.array([a.counts for a in allocs], dtype=np.int64)
        stage_metrics.append(batch_metrics(mat, arr))

    # expand over the Cartesian product with index grids
    grids = np.meshgrid(*[np.arange(c) for c in counts], indexing="ij")
    idx = [g.reshape(-1) for g in grids]
    lt = [m[0][idx[i]] for i, m in enumerate(stage_metrics)]
    ut = [m[1][idx[i]] for i, m in enumerate(stage_metrics)]
    cost = [m[2][idx[i]] for i, m in enumerate(stage_metrics)]
    num = [m[3][idx[i]] for i, m in enumerate(stage_metrics)]
    objectives = batch_objectives(lt, ut, cost, num)

    unique, first = np.unique(objectives, axis=0, return_index=True)
    front = fast_non_dominated_sort(unique)[0]
    result = []
    for f in front:
        row = int(first[f])
        solution = CompositeSolution(
            tuple(per_subtask[i][int(idx[i][row])] for i in range(len(counts)))
        )
        obj = unique[f]
        result.append(
            (solution, ObjectiveVector(float(obj[0]), float(obj[1]), int(obj[2])))
        )
    result.sort(key=lambda pair: pair[1].as_tuple())
    return result
