"""NSGA-II baseline over the monolithic encoding.

One chromosome concatenates the usage-count vectors of every sub-task.
Mating selection is binary tournament on (front rank, crowding distance);
variation applies SBX and polynomial mutation gene-wise, followed by a
per-segment repair so each sub-task keeps its own quantity constraint.
Fitness is always the full (time, cost, count) objective triple.
"""

from __future__ import annotations

import numpy as np

from .domain import (
    Allocation,
    CompositeSolution,
    ObjectiveVector,
    Order,
    TaskSpec,
    check_feasible,
)
from .evaluation import ServiceArrays, batch_metrics, batch_objectives
from .pdga import select_non_dominated
from .ranking import crowding_distance, fast_non_dominated_sort
from .variation import (
    VariationParams,
    polynomial_mutate,
    random_counts,
    repair_batch,
    sbx_pair,
)


def _objectives(segments: list[np.ndarray], arrays: list[ServiceArrays]) -> np.ndarray:
    lt, ut, cost, num = [], [], [], []
    for seg, arr in zip(segments, arrays):
        a, b, c, d = batch_metrics(seg, arr)
        lt.append(a)
        ut.append(b)
        cost.append(c)
        num.append(d)
    return batch_objectives(lt, ut, cost, num)


def _rank_and_crowding(fitness: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rank = np.empty(len(fitness), dtype=np.int64)
    crowd = np.empty(len(fitness))
    for level, front in enumerate(fast_non_dominated_sort(fitness)):
        rank[front] = level
        crowd[front] = crowding_distance(fitness[front])
    return rank, crowd


def _tournament(
    rank: np.ndarray, crowd: np.ndarray, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Binary tournament winners: lower rank, then higher crowding, then first."""
    a = rng.integers(0, len(rank), size=size)
    b = rng.integers(0, len(rank), size=size)
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] >= crowd[b]))
    return np.where(a_wins, a, b)


def run_nsga2(
    task: TaskSpec,
    order: Order,
    iterations: int = 200,
    pop_size: int = 50,
    variation: VariationParams = VariationParams(),
    seed: int = 0,
) -> list[tuple[CompositeSolution, ObjectiveVector]]:
    """Standard generational NSGA-II; returns the final non-dominated front."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if pop_size < 2:
        raise ValueError("pop_size must be >= 2")
    check_feasible(task, order)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xB5,)))
    quantity = order.quantity
    arrays = [ServiceArrays.from_subtask(st, quantity) for st in task.subtasks]
    widths = [a.n_services for a in arrays]
    n_genes = sum(widths)
    bounds = np.concatenate([np.minimum(a.caps, quantity) for a in arrays]).astype(float)
    offsets = np.cumsum([0] + widths)

    genomes = np.empty((pop_size, n_genes), dtype=np.int64)
    for i in range(pop_size):
        genomes[i] = np.concatenate(
            [random_counts(a, quantity, rng) for a in arrays]
        )
    fitness = _objectives(
        [genomes[:, offsets[k] : offsets[k + 1]] for k in range(len(widths))], arrays
    )
    rank, crowd = _rank_and_crowding(fitness)

    for _ in range(iterations):
        parents = _tournament(rank, crowd, pop_size, rng)

        n_pairs = pop_size // 2
        p1 = genomes[parents[: 2 * n_pairs : 2]].astype(float)
        p2 = genomes[parents[1 : 2 * n_pairs : 2]].astype(float)
        fire_c = rng.random(n_pairs) < variation.pr_c
        r = rng.random((n_pairs, n_genes))
        c1, c2 = sbx_pair(p1, p2, variation.eta_c, r)
        c1 = np.where(fire_c[:, None], c1, p1)
        c2 = np.where(fire_c[:, None], c2, p2)
        children = np.empty((pop_size, n_genes), dtype=float)
        children[: 2 * n_pairs : 2] = c1
        children[1 : 2 * n_pairs : 2] = c2
        if pop_size % 2:
            children[-1] = genomes[parents[-1]]
        children = np.clip(children, 0.0, bounds)

        fire_m = rng.random(pop_size) < variation.pr_m
        mask = rng.random((pop_size, n_genes)) < (1.0 / n_genes)
        forced = ~mask.any(axis=1)
        if forced.any():
            mask[np.flatnonzero(forced), rng.integers(0, n_genes, size=int(forced.sum()))] = True
        mask &= fire_m[:, None]
        rm = rng.random((pop_size, n_genes))
        children = np.where(
            mask, polynomial_mutate(children, 0.0, bounds, variation.eta_m, rm), children
        )

        offspring = np.empty((pop_size, n_genes), dtype=np.int64)
        for k, arr in enumerate(arrays):
            offspring[:, offsets[k] : offsets[k + 1]] = repair_batch(
                children[:, offsets[k] : offsets[k + 1]], arr, quantity
            )

        union = np.concatenate((genomes, offspring))
        union_fitness = np.concatenate(
            (
                fitness,
                _objectives(
                    [offspring[:, offsets[k] : offsets[k + 1]] for k in range(len(widths))],
                    arrays,
                ),
            )
        )
        # environmental selection: best pop_size by (rank, crowding, index);
        # survivors inherit the rank and crowding computed on the union
        u_rank, u_crowd = _rank_and_crowding(union_fitness)
        keep = np.lexsort((np.arange(len(union)), -u_crowd, u_rank))[:pop_size]
        keep.sort()
        genomes = union[keep]
        fitness = union_fitness[keep]
        rank, crowd = u_rank[keep], u_crowd[keep]

    front = fast_non_dominated_sort(fitness)[0]
    solutions = [
        CompositeSolution(
            tuple(
                Allocation(tuple(genomes[i, offsets[k] : offsets[k + 1]].tolist()))
                for k in range(len(widths))
            )
        )
        for i in front
    ]
    return select_non_dominated(solutions, task, order)
