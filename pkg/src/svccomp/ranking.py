"""Pareto machinery: dominance, fast non-dominated sorting, crowding, truncation.

All objectives are minimized. Fitness vectors carry either two components
(cost, service count) or three (time, cost, service count) depending on the
population's role; the functions here are dimension-agnostic.
"""

from __future__ import annotations

from bisect import bisect_right
from collections.abc import Sequence

import numpy as np


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff a is componentwise <= b and strictly better somewhere."""
    if len(a) != len(b):
        raise ValueError(f"fitness length mismatch: {len(a)} vs {len(b)}")
    not_worse = all(x <= y for x, y in zip(a, b))
    return not_worse and any(x < y for x, y in zip(a, b))


def _dominance_matrix(fit: np.ndarray) -> np.ndarray:
    """dom[i, j] is True iff row i dominates row j."""
    n = len(fit)
    le = np.ones((n, n), dtype=bool)
    lt = np.zeros((n, n), dtype=bool)
    for k in range(fit.shape[1]):
        col = fit[:, k]
        pair = col[:, None] <= col[None, :]
        le &= pair
        np.less(col[:, None], col[None, :], out=pair)
        lt |= pair
    le &= lt
    return le


def _peel_fronts(dom: np.ndarray, stop_after: int | None = None) -> list[list[int]]:
    """Fronts from a dominance matrix, optionally stopping once enough
    indices have been emitted."""
    n_dominators = dom.sum(axis=0)
    fronts: list[list[int]] = []
    emitted = 0
    current = np.flatnonzero(n_dominators == 0)
    while current.size:
        fronts.append(current.tolist())
        emitted += current.size
        if stop_after is not None and emitted >= stop_after:
            break
        n_dominators[current] = -1
        n_dominators -= dom[current].sum(axis=0)
        current = np.flatnonzero(n_dominators == 0)
    return fronts


def _fronts_two_objectives(fit: np.ndarray) -> list[list[int]]:
    """O(n log n) staircase sweep for the two-objective case.

    Unique vectors are visited in lexicographic order; a vector's front index
    is the first front whose current best second objective no longer beats
    it (patience-sorting on the non-decreasing front tails).
    """
    unique, inverse = np.unique(fit, axis=0, return_inverse=True)
    tails: list[float] = []  # per front: smallest second objective so far
    unique_front = np.empty(len(unique), dtype=np.int64)
    for i, (_, f2) in enumerate(unique):
        k = bisect_right(tails, f2)
        if k == len(tails):
            tails.append(f2)
        else:
            tails[k] = f2
        unique_front[i] = k
    front_of = unique_front[inverse]
    fronts: list[list[int]] = [[] for _ in range(len(tails))]
    for idx, k in enumerate(front_of):
        fronts[k].append(idx)
    return fronts


def fast_non_dominated_sort(fitness) -> list[list[int]]:
    """Partition indices into Pareto fronts F0, F1, ... (each in index order)."""
    fit = np.asarray(fitness, dtype=float)
    if fit.ndim != 2 or len(fit) == 0:
        raise ValueError("fitness must be a non-empty 2-d array")
    if fit.shape[1] == 2:
        return _fronts_two_objectives(fit)
    return _peel_fronts(_dominance_matrix(fit))


def crowding_distance(front_fitness) -> np.ndarray:
    """NSGA-II crowding distance for the members of one front.

    Extremes per objective get infinity; interior members accumulate
    normalized neighbor gaps. Objectives with zero range contribute nothing.
    """
    fit = np.asarray(front_fitness, dtype=float)
    if fit.ndim != 2 or len(fit) == 0:
        raise ValueError("front must be a non-empty 2-d array")
    n, m = fit.shape
    if n <= 2:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for k in range(m):
        order = np.argsort(fit[:, k], kind="stable")
        values = fit[order, k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = values[-1] - values[0]
        if span > 0 and n > 2:
            dist[order[1:-1]] += (values[2:] - values[:-2]) / span
    return dist


def truncate_indices(fitness, size: int) -> np.ndarray:
    """Indices of the `size` survivors under (front rank, crowding distance).

    Whole fronts are taken while they fit; the straddling front is sliced by
    descending crowding distance, ties broken by original index.
    """
    fit = np.asarray(fitness, dtype=float)
    if size > len(fit):
        raise ValueError(f"cannot keep {size} of {len(fit)} individuals")
    if fit.shape[1] == 2:
        fronts = _fronts_two_objectives(fit)
    else:
        fronts = _peel_fronts(_dominance_matrix(fit), stop_after=size)
    selected: list[int] = []
    for front in fronts:
        if len(selected) + len(front) <= size:
            selected.extend(front)
            if len(selected) == size:
                break
        else:
            dist = crowding_distance(fit[front])
            order = np.argsort(-dist, kind="stable")
            selected.extend(front[i] for i in order[: size - len(selected)])
            break
    return np.asarray(selected, dtype=np.int64)


def non_dominated_indices(fitness) -> list[int]:
    """Indices of the first front only."""
    return fast_non_dominated_sort(fitness)[0]
