"""Problem-decomposition genetic algorithm.

One GA population is kept per sub-task. Each generation assembles one
complete solution: a bootstrap rule picks a representative per population
(steered by a user completion-time limit), the slowest pick defines the
bottleneck population, and every other population contributes its cheapest
member that stays below the bottleneck time. The bottleneck population then
evolves under (time, cost, count) while the rest evolve under (cost, count);
the non-dominated set of all recorded solutions is returned at the end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import (
    Allocation,
    CompositeSolution,
    ObjectiveVector,
    Order,
    TaskSpec,
    check_feasible,
)
from .evaluation import ServiceArrays, batch_metrics, total_objectives
from .ranking import fast_non_dominated_sort, truncate_indices
from .variation import VariationParams, breed_blocks, random_counts, repair_blocks


@dataclass(frozen=True)
class PdgaParams:
    """Run parameters: budget, population size, time limit, operators, seed."""

    iterations: int = 100
    pop_size: int = 50
    search_limit: float = 0.0
    variation: VariationParams = VariationParams()
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2 (crossover needs pairs)")
        if self.search_limit < 0:
            raise ValueError("search_limit must be >= 0")


@dataclass(frozen=True)
class SubPopulation:
    """Population of count vectors for one sub-task, with cached metrics."""

    subtask_index: int
    counts: np.ndarray  # (size, n_services) int
    arrays: ServiceArrays
    time: np.ndarray  # bottleneck cumulative time per member
    cost: np.ndarray
    num: np.ndarray

    @classmethod
    def from_counts(
        cls, subtask_index: int, counts: np.ndarray, arrays: ServiceArrays
    ) -> "SubPopulation":
        lt, _, cost, num = batch_metrics(counts, arrays)
        return cls(subtask_index, counts, arrays, lt, cost, num)

    @classmethod
    def random(
        cls,
        subtask_index: int,
        arrays: ServiceArrays,
        quantity: int,
        size: int,
        rng: np.random.Generator,
    ) -> "SubPopulation":
        counts = np.stack([random_counts(arrays, quantity, rng) for _ in range(size)])
        return cls.from_counts(subtask_index, counts, arrays)

    def member(self, i: int) -> Allocation:
        return Allocation(tuple(self.counts[i].tolist()))


def search_bootstrap(pop: SubPopulation, limit: float) -> tuple[int, float]:
    """Pick one representative member, steered by the completion-time limit.

    If even the fastest member meets the limit, take the fastest. Otherwise
    take the slowest member that still meets the limit, freeing search
    pressure for cost and count; if nobody meets it, take the slowest
    overall. Returns (member index, its bottleneck time); ties break on the
    first index.
    """
    times = pop.time
    min_time = times.min()
    if min_time >= limit:
        idx = int(times.argmin())
    else:
        at_least = times >= limit
        if at_least.any():
            candidates = np.flatnonzero(at_least)
            idx = int(candidates[times[candidates].argmin()])
        else:
            idx = int(times.argmax())
    return idx, float(times[idx])


def generate_complete_solution(
    pops: list[SubPopulation], limit: float
) -> tuple[CompositeSolution, int]:
    """Assemble one complete solution and identify the bottleneck population.

    The bootstrap pick with the largest bottleneck time keeps its slot; every
    other population is re-picked as its cheapest member strictly faster than
    that time (ties: fewer services, then first index). When no member is
    fast enough, fall back to the fastest member, cheapest on ties.
    """
    picks = [search_bootstrap(p, limit) for p in pops]
    index = 0
    max_time = -np.inf
    for j, (_, t) in enumerate(picks):
        if t > max_time:
            max_time = t
            index = j

    chosen: list[Allocation] = []
    for m, pop in enumerate(pops):
        if m == index:
            chosen.append(pop.member(picks[m][0]))
            continue
        fast_enough = np.flatnonzero(pop.time < max_time)
        if fast_enough.size:
            order = np.lexsort((pop.num[fast_enough], pop.cost[fast_enough]))
            chosen.append(pop.member(int(fast_enough[order[0]])))
        else:
            order = np.lexsort((pop.cost, pop.time))
            chosen.append(pop.member(int(order[0])))
    return CompositeSolution(tuple(chosen)), index


def iterate(
    pops: list[SubPopulation],
    index: int,
    params: PdgaParams,
    rngs: list[np.random.Generator],
) -> list[SubPopulation]:
    """One elitist generation for every population.

    Offspring are bred and unioned with the parents; the bottleneck
    population (`index`) is ranked on (time, cost, count), all others on
    (cost, count); survivors are picked by front rank then crowding.
    """
    size = params.pop_size
    widths = [pop.arrays.n_services for pop in pops]
    width = max(widths)
    quantity = int(pops[0].counts[0].sum())
    parents = np.zeros((len(pops), size, width))
    upper = np.zeros((len(pops), width))
    unit_times = np.zeros((len(pops), width))
    unit_costs = np.zeros((len(pops), width))
    for j, pop in enumerate(pops):
        parents[j, :, : widths[j]] = pop.counts
        upper[j, : widths[j]] = pop.arrays.caps
        unit_times[j, : widths[j]] = pop.arrays.unit_times
        unit_costs[j, : widths[j]] = pop.arrays.unit_costs
    raw = breed_blocks(parents, upper, widths, params.variation, rngs)
    off = repair_blocks(raw, [pop.arrays for pop in pops], quantity)
    off_lt = (off * unit_times[:, None, :]).max(axis=2)
    off_cost = (off * unit_costs[:, None, :]).sum(axis=2)
    off_num = np.count_nonzero(off, axis=2)

    new_pops: list[SubPopulation] = []
    for j, pop in enumerate(pops):
        union = np.concatenate((pop.counts, off[j, :, : widths[j]]))
        lt = np.concatenate((pop.time, off_lt[j]))
        cost = np.concatenate((pop.cost, off_cost[j]))
        num = np.concatenate((pop.num, off_num[j]))
        if j == index:
            fitness = np.column_stack((lt, cost, num.astype(float)))
        else:
            fitness = np.column_stack((cost, num.astype(float)))
        keep = truncate_indices(fitness, size)
        new_pops.append(
            SubPopulation(j, union[keep], pop.arrays, lt[keep], cost[keep], num[keep])
        )
    return new_pops


def _population_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent per-population streams, stable under any scheduling."""
    return [
        np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
        for i in range(n)
    ]


def init_populations(
    task: TaskSpec, order: Order, params: PdgaParams
) -> tuple[list[SubPopulation], list[np.random.Generator]]:
    """Random initial populations plus their private RNG streams."""
    check_feasible(task, order)
    rngs = _population_rngs(params.seed, len(task.subtasks))
    pops = [
        SubPopulation.random(
            i,
            ServiceArrays.from_subtask(st, order.quantity),
            order.quantity,
            params.pop_size,
            rngs[i],
        )
        for i, st in enumerate(task.subtasks)
    ]
    return pops, rngs


def run(
    task: TaskSpec, order: Order, params: PdgaParams
) -> list[tuple[CompositeSolution, ObjectiveVector]]:
    """Full optimization run; returns the final non-dominated front.

    One complete solution is recorded per generation; duplicates by objective
    vector are merged before the final non-dominated filtering. The front is
    returned in lexicographic objective order.
    """
    pops, rngs = init_populations(task, order, params)
    solutions: list[CompositeSolution] = []
    for _ in range(params.iterations):
        solution, index = generate_complete_solution(pops, params.search_limit)
        solutions.append(solution)
        pops = iterate(pops, index, params, rngs)

    return select_non_dominated(solutions, task, order)


def select_non_dominated(
    solutions: list[CompositeSolution], task: TaskSpec, order: Order
) -> list[tuple[CompositeSolution, ObjectiveVector]]:
    """Deduplicate by objective vector and keep the first Pareto front."""
    seen: dict[tuple[float, float, int], CompositeSolution] = {}
    for sol in solutions:
        obj = total_objectives(sol, task, order)
        seen.setdefault(obj.as_tuple(), sol)
    keys = sorted(seen)
    fitness = np.asarray(keys, dtype=float)
    front = fast_non_dominated_sort(fitness)[0]
    return [
        (seen[keys[i]], ObjectiveVector(keys[i][0], keys[i][1], int(keys[i][2])))
        for i in front
    ]
