"""Genetic operators: simulated binary crossover, polynomial mutation, repair.

The crossover and mutation act on real-valued genes; populations are integer
usage-count vectors, so every offspring passes through :func:`repair`, which
rounds, clamps to the usage caps, and restores the quantity constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Allocation, InfeasibleInstanceError, Order, SubTask
from .evaluation import ServiceArrays

# largest double strictly below 1; keeps the SBX spread factor finite
_R_MAX = 1.0 - 2.0**-53


@dataclass(frozen=True)
class VariationParams:
    """Operator parameters: distribution indices and firing probabilities."""

    eta_c: float = 0.1
    eta_m: float = 0.01
    pr_c: float = 1.0
    pr_m: float = 1.0

    def __post_init__(self) -> None:
        if self.eta_c < 0 or self.eta_m < 0:
            raise ValueError("distribution indices must be >= 0")
        if not (0.0 <= self.pr_c <= 1.0 and 0.0 <= self.pr_m <= 1.0):
            raise ValueError("operator probabilities must be in [0, 1]")


def sbx_pair(x1, x2, eta_c: float, r):
    """Simulated binary crossover of one gene (elementwise over arrays).

    Returns the two children; their sum equals the parents' sum. r is a
    uniform draw in [0, 1], clamped just below 1 to keep the spread finite.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    r = np.minimum(np.asarray(r, dtype=float), _R_MAX)
    exponent = 1.0 / (1.0 + eta_c)
    beta = np.where(
        r <= 0.5,
        (2.0 * r) ** exponent,
        (1.0 / (2.0 - 2.0 * r)) ** exponent,
    )
    mean = 0.5 * (x1 + x2)
    half_spread = 0.5 * beta * (x1 - x2)
    return mean - half_spread, mean + half_spread


def polynomial_mutate(x, l, u, eta_m: float, r):
    """Polynomial mutation of one gene (elementwise over arrays).

    The perturbation is zero at r = 0.5 and bounded so the result stays in
    [l, u]; degenerate ranges (l == u) return x unchanged.
    """
    x = np.asarray(x, dtype=float)
    l = np.asarray(l, dtype=float)
    u = np.asarray(u, dtype=float)
    r = np.asarray(r, dtype=float)
    span = u - l
    safe_span = np.where(span > 0, span, 1.0)
    d1 = (x - l) / safe_span
    d2 = (u - x) / safe_span
    power = 1.0 + eta_m
    exponent = 1.0 / power
    low = (2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1) ** power) ** exponent - 1.0
    high = 1.0 - (2.0 - 2.0 * r + (2.0 * r - 1.0) * (1.0 - d2) ** power) ** exponent
    delta = np.where(r <= 0.5, low, high)
    out = np.clip(x + delta * span, l, u)
    out = np.where(span > 0, out, x)
    if out.ndim == 0:
        return float(out)
    return out


def _adjust_row(
    counts: list[int],
    clipped: list[float],
    caps: list[int],
    costs: list[float],
    diff: int,
    cheap_first: list[int],
    dear_first: list[int],
) -> None:
    """Restore sum(counts) == quantity by +-diff units, in place."""
    n = len(counts)
    if diff > 0:
        # one unit each by descending rounding residual, cheap-first on ties
        order = sorted(range(n), key=lambda j: (counts[j] - clipped[j], costs[j], j))
        for j in order:
            if diff == 0:
                return
            if counts[j] < caps[j]:
                counts[j] += 1
                diff -= 1
        # bulk fill: cheapest services with cap slack first
        for j in cheap_first:
            take = min(diff, caps[j] - counts[j])
            counts[j] += take
            diff -= take
            if diff == 0:
                return
    else:
        deficit = -diff
        order = sorted(range(n), key=lambda j: (clipped[j] - counts[j], -costs[j], j))
        for j in order:
            if deficit == 0:
                return
            if counts[j] > 0:
                counts[j] -= 1
                deficit -= 1
        # bulk drain: most expensive services first
        for j in dear_first:
            take = min(deficit, counts[j])
            counts[j] -= take
            deficit -= take
            if deficit == 0:
                return


def repair_batch(raw: np.ndarray, arrays: ServiceArrays, quantity: int) -> np.ndarray:
    """Repair every row of a real-valued gene matrix into valid counts.

    Rounds half-to-even, clamps to [0, cap], then restores the quantity sum:
    first one unit per entry in order of largest rounding residual, then bulk
    units on the cheapest services with cap slack (for deficits) or the most
    expensive used services (for surpluses).
    """
    caps = arrays.caps
    if int(caps.sum()) < quantity:
        raise InfeasibleInstanceError(
            f"usage caps sum to {int(caps.sum())}, below the quantity {quantity}"
        )
    clipped = np.clip(np.asarray(raw, dtype=float), 0.0, caps)
    counts = np.rint(clipped).astype(np.int64)
    diffs = quantity - counts.sum(axis=1)
    broken = np.flatnonzero(diffs)
    if broken.size:
        n = arrays.n_services
        costs = arrays.unit_costs
        cheap_first = np.lexsort((np.arange(n), costs)).tolist()
        dear_first = np.lexsort((np.arange(n), -costs)).tolist()
        caps_list = caps.tolist()
        costs_list = costs.tolist()
        for i in broken:
            row = counts[i].tolist()
            _adjust_row(
                row, clipped[i].tolist(), caps_list, costs_list, int(diffs[i]),
                cheap_first, dear_first,
            )
            counts[i] = row
    return counts


def repair_counts(raw: np.ndarray, arrays: ServiceArrays, quantity: int) -> np.ndarray:
    """Repair a single real-valued gene vector into a valid count vector."""
    return repair_batch(np.asarray(raw, dtype=float)[None, :], arrays, quantity)[0]


def breed_blocks(
    parents: np.ndarray,
    upper: np.ndarray,
    gene_counts: list[int],
    params: VariationParams,
    rngs: list[np.random.Generator],
) -> np.ndarray:
    """SBX + mutation for several same-size populations in fused array ops.

    `parents` is (n_pops, size, width) with short gene vectors zero-padded to
    `width`; `upper` is the matching (n_pops, width) bound matrix with zeros
    on padded columns, which pins padded genes to zero throughout. Each
    population draws from its own RNG stream. Returns the raw (real-valued)
    children; the caller repairs them.
    """
    n_pops, size, width = parents.shape
    n_pairs = size // 2

    perms = np.stack([rng.permutation(size) for rng in rngs])
    shuffled = np.take_along_axis(parents, perms[:, :, None], axis=1)
    x1 = shuffled[:, : 2 * n_pairs : 2]
    x2 = shuffled[:, 1 : 2 * n_pairs : 2]
    fire_c = np.stack([rng.random(n_pairs) < params.pr_c for rng in rngs])
    r = np.stack([rng.random((n_pairs, width)) for rng in rngs])
    c1, c2 = sbx_pair(x1, x2, params.eta_c, r)
    gate = fire_c[:, :, None]
    children = np.empty_like(shuffled)
    children[:, : 2 * n_pairs : 2] = np.where(gate, c1, x1)
    children[:, 1 : 2 * n_pairs : 2] = np.where(gate, c2, x2)
    if size % 2:
        children[:, -1] = shuffled[:, -1]
    bounds = upper[:, None, :]
    children = np.clip(children, 0.0, bounds)

    fire_m = np.stack([rng.random(size) < params.pr_m for rng in rngs])
    mask = np.zeros((n_pops, size, width), dtype=bool)
    for p, rng in enumerate(rngs):
        n = gene_counts[p]
        pmask = rng.random((size, n)) < (1.0 / n)
        forced = np.flatnonzero(~pmask.any(axis=1))
        if forced.size:
            pmask[forced, rng.integers(0, n, size=forced.size)] = True
        mask[p, :, :n] = pmask
    mask &= fire_m[:, :, None]
    rm = np.stack([rng.random((size, width)) for rng in rngs])
    mutated = polynomial_mutate(children, 0.0, bounds, params.eta_m, rm)
    return np.where(mask, mutated, children)


def repair_blocks(
    raw: np.ndarray, arrays_list: list[ServiceArrays], quantity: int
) -> np.ndarray:
    """Fused repair counterpart of :func:`breed_blocks`.

    `raw` is the (n_pops, size, width) output of breed_blocks: already
    clipped to the caps, with padded columns pinned to zero. Rounds and
    restores the quantity sum with the same rules as :func:`repair_batch`.
    """
    counts = np.rint(raw).astype(np.int64)
    diffs = quantity - counts.sum(axis=2)
    for p in np.unique(np.nonzero(diffs)[0]):
        arr = arrays_list[p]
        n = arr.n_services
        costs = arr.unit_costs
        cheap_first = np.lexsort((np.arange(n), costs)).tolist()
        dear_first = np.lexsort((np.arange(n), -costs)).tolist()
        caps_list = arr.caps.tolist()
        costs_list = costs.tolist()
        for i in np.flatnonzero(diffs[p]):
            row = counts[p, i, :n].tolist()
            _adjust_row(
                row, raw[p, i, :n].tolist(), caps_list, costs_list,
                int(diffs[p, i]), cheap_first, dear_first,
            )
            counts[p, i, :n] = row
    return counts


def repair(raw, st: SubTask, o: Order) -> Allocation:
    """Repair a raw gene vector into a valid allocation for one sub-task."""
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (len(st.services),):
        raise ValueError(
            f"expected {len(st.services)} genes for sub-task {st.id!r}, got {raw.shape}"
        )
    arrays = ServiceArrays.from_subtask(st, o.quantity)
    return Allocation(tuple(repair_counts(raw, arrays, o.quantity).tolist()))


def random_counts(
    arrays: ServiceArrays, quantity: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform random composition of the quantity, repaired for caps."""
    n = arrays.n_services
    if n == 1:
        parts = np.array([quantity], dtype=np.int64)
    else:
        # stars and bars: bar positions among quantity + n - 1 slots
        bars = np.sort(rng.choice(quantity + n - 1, size=n - 1, replace=False))
        edges = np.concatenate(([-1], bars, [quantity + n - 1]))
        parts = np.diff(edges) - 1
    if (parts > arrays.caps).any():
        return repair_counts(parts, arrays, quantity)
    return parts.astype(np.int64)


def random_allocation(st: SubTask, o: Order, rng: np.random.Generator) -> Allocation:
    """Uniformly sampled valid allocation for one sub-task."""
    arrays = ServiceArrays.from_subtask(st, o.quantity)
    return Allocation(tuple(random_counts(arrays, o.quantity, rng).tolist()))


def offspring_counts(
    counts: np.ndarray,
    arrays: ServiceArrays,
    quantity: int,
    params: VariationParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """One generation of offspring for a population of count vectors.

    Parents are paired uniformly at random without replacement; each pair
    fires SBX with probability pr_c (all genes, independent draws). Each
    child then fires mutation with probability pr_m: every gene mutates with
    probability 1/n_genes, at least one forced. All children are repaired.
    """
    size, n = counts.shape
    perm = rng.permutation(size)
    n_pairs = size // 2
    p1 = counts[perm[: 2 * n_pairs : 2]].astype(float)
    p2 = counts[perm[1 : 2 * n_pairs : 2]].astype(float)

    fire_c = rng.random(n_pairs) < params.pr_c
    r = rng.random((n_pairs, n))
    c1, c2 = sbx_pair(p1, p2, params.eta_c, r)
    c1 = np.where(fire_c[:, None], c1, p1)
    c2 = np.where(fire_c[:, None], c2, p2)

    children = np.empty((size, n), dtype=float)
    children[: 2 * n_pairs : 2] = c1
    children[1 : 2 * n_pairs : 2] = c2
    if size % 2:
        children[-1] = counts[perm[-1]]

    upper = np.minimum(arrays.caps, quantity).astype(float)
    children = np.clip(children, 0.0, upper)

    fire_m = rng.random(size) < params.pr_m
    mask = rng.random((size, n)) < (1.0 / n)
    forced = ~mask.any(axis=1)
    if forced.any():
        mask[np.flatnonzero(forced), rng.integers(0, n, size=int(forced.sum()))] = True
    mask &= fire_m[:, None]
    rm = rng.random((size, n))
    mutated = polynomial_mutate(children, 0.0, upper, params.eta_m, rm)
    children = np.where(mask, mutated, children)

    return repair_batch(children, arrays, quantity)
