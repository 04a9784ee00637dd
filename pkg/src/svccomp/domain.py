"""Core data model for collaborative service composition problems.

A production task is an ordered sequence of sub-tasks. Every sub-task has a
pool of candidate services with identical functionality but different per-use
time and cost, and several of them may collaborate on the same sub-task. A
complete solution assigns each sub-task a usage count per candidate service;
the counts of one sub-task must add up to the order quantity.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

MAX_QUANTITY = 2**31 - 1


class InfeasibleInstanceError(ValueError):
    """No allocation can reach the order quantity under the usage caps."""


class AllocationViolation(Enum):
    """First violated allocation condition, in checking order."""

    NEGATIVE_COUNT = "negative or non-integer count"
    ZERO_VECTOR = "no service selected"
    QUANTITY_MISMATCH = "counts do not add up to the order quantity"
    CAP_EXCEEDED = "usage cap exceeded"


@dataclass(frozen=True)
class CandidateService:
    """One purchasable unit of work: fixed time and cost per single use."""

    id: str
    unit_time: float
    unit_cost: float
    max_uses: int | None = None

    def __post_init__(self) -> None:
        if not self.unit_time > 0:
            raise ValueError(f"service {self.id!r}: unit_time must be > 0")
        if self.unit_cost < 0:
            raise ValueError(f"service {self.id!r}: unit_cost must be >= 0")
        if self.max_uses is not None and self.max_uses < 1:
            raise ValueError(f"service {self.id!r}: max_uses must be >= 1")


@dataclass(frozen=True)
class SubTask:
    """One stage of the task with its candidate service pool."""

    id: str
    services: tuple[CandidateService, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "services", tuple(self.services))
        if not self.services:
            raise ValueError(f"sub-task {self.id!r}: needs at least one candidate service")
        ids = [s.id for s in self.services]
        if len(set(ids)) != len(ids):
            raise ValueError(f"sub-task {self.id!r}: duplicate service ids")


@dataclass(frozen=True)
class TaskSpec:
    """Ordered, sequentially executed sub-tasks of one production task."""

    subtasks: tuple[SubTask, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "subtasks", tuple(self.subtasks))
        if not self.subtasks:
            raise ValueError("task needs at least one sub-task")
        ids = [st.id for st in self.subtasks]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sub-task ids")

    def __len__(self) -> int:
        return len(self.subtasks)


@dataclass(frozen=True)
class Order:
    """A customer order: product type and how many units to produce."""

    id: str
    product_type: str
    quantity: int

    def __post_init__(self) -> None:
        if not 1 <= self.quantity <= MAX_QUANTITY:
            raise ValueError(f"order {self.id!r}: quantity must be in [1, {MAX_QUANTITY}]")


@dataclass(frozen=True)
class Allocation:
    """Usage counts over one sub-task's candidate services.

    Construction accepts any integer vector; use :func:`validate_allocation`
    to check it against a sub-task and an order.
    """

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))


@dataclass(frozen=True)
class CompositeSolution:
    """One allocation per sub-task, in task order."""

    allocations: tuple[Allocation, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "allocations", tuple(self.allocations))


@dataclass(frozen=True)
class ObjectiveVector:
    """The three minimized totals of a complete solution."""

    time_total: float
    cost_total: float
    num_total: int

    def as_tuple(self) -> tuple[float, float, int]:
        return (self.time_total, self.cost_total, self.num_total)


def validate_allocation(
    a: Allocation, st: SubTask, o: Order
) -> AllocationViolation | None:
    """Check an allocation against a sub-task and an order.

    Returns None when all conditions hold, otherwise the first violated
    condition: non-negative integers, at least one positive count, counts
    summing to the order quantity, and per-service usage caps.

    Raises ValueError when the vector length does not match the sub-task's
    service pool (a structural error, not a condition violation).
    """
    if len(a.counts) != len(st.services):
        raise ValueError(
            f"allocation has {len(a.counts)} counts but sub-task {st.id!r} "
            f"has {len(st.services)} services"
        )
    if any(c < 0 for c in a.counts):
        return AllocationViolation.NEGATIVE_COUNT
    if all(c == 0 for c in a.counts):
        return AllocationViolation.ZERO_VECTOR
    if sum(a.counts) != o.quantity:
        return AllocationViolation.QUANTITY_MISMATCH
    for c, svc in zip(a.counts, st.services):
        if svc.max_uses is not None and c > svc.max_uses:
            return AllocationViolation.CAP_EXCEEDED
    return None


def support(a: Allocation) -> tuple[int, ...]:
    """Indices of the services actually used (count > 0)."""
    return tuple(j for j, c in enumerate(a.counts) if c > 0)


def validate_solution(
    s: CompositeSolution, t: TaskSpec, o: Order
) -> AllocationViolation | None:
    """First violation across all sub-task allocations, or None."""
    if len(s.allocations) != len(t.subtasks):
        raise ValueError(
            f"solution has {len(s.allocations)} allocations but the task "
            f"has {len(t.subtasks)} sub-tasks"
        )
    for a, st in zip(s.allocations, t.subtasks):
        verdict = validate_allocation(a, st, o)
        if verdict is not None:
            return verdict
    return None


def check_feasible(t: TaskSpec, o: Order) -> None:
    """Raise InfeasibleInstanceError if any sub-task's caps cannot cover the quantity."""
    for st in t.subtasks:
        cap_sum = 0
        for svc in st.services:
            if svc.max_uses is None:
                cap_sum = o.quantity
                break
            cap_sum += svc.max_uses
        if cap_sum < o.quantity:
            raise InfeasibleInstanceError(
                f"sub-task {st.id!r}: usage caps sum to {cap_sum}, "
                f"below the order quantity {o.quantity}"
            )
