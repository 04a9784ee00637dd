"""Estimator-style front ends for the two optimizers.

Both solvers follow the scikit-learn parameter conventions (plain keyword
constructor, ``get_params``/``set_params``, ``clone`` compatible). ``fit``
takes the problem instance and exposes the resulting Pareto front through
fitted attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import nsga2, pdga
from .domain import Order, TaskSpec
from .variation import VariationParams


class _FrontSolverMixin:
    def _check_instance(self, task: TaskSpec, order: Order) -> None:
        if not isinstance(task, TaskSpec):
            raise TypeError("task must be a TaskSpec")
        if not isinstance(order, Order):
            raise TypeError("order must be an Order")

    def _store_front(self, front) -> None:
        self.front_ = front
        self.solutions_ = [s for s, _ in front]
        self.objectives_ = np.array([o.as_tuple() for _, o in front], dtype=float)

    def best(self, objective: str = "time"):
        """The front member minimizing one objective: time, cost, or num."""
        column = {"time": 0, "cost": 1, "num": 2}[objective]
        i = int(self.objectives_[:, column].argmin())
        return self.front_[i]

    def _variation(self) -> VariationParams:
        return VariationParams(
            eta_c=self.eta_c, eta_m=self.eta_m, pr_c=self.pr_c, pr_m=self.pr_m
        )


class PdgaSolver(_FrontSolverMixin, BaseEstimator):
    """Problem-decomposition GA solver.

    Fitted attributes: ``front_`` (list of (solution, objectives) pairs),
    ``solutions_``, and ``objectives_`` (array of shape (n, 3)).
    """

    def __init__(
        self,
        iterations: int = 100,
        pop_size: int = 50,
        search_limit: float = 0.0,
        eta_c: float = 0.1,
        eta_m: float = 0.01,
        pr_c: float = 1.0,
        pr_m: float = 1.0,
        seed: int = 0,
    ):
        self.iterations = iterations
        self.pop_size = pop_size
        self.search_limit = search_limit
        self.eta_c = eta_c
        self.eta_m = eta_m
        self.pr_c = pr_c
        self.pr_m = pr_m
        self.seed = seed

    def fit(self, task: TaskSpec, order: Order) -> "PdgaSolver":
        self._check_instance(task, order)
        params = pdga.PdgaParams(
            iterations=self.iterations,
            pop_size=self.pop_size,
            search_limit=self.search_limit,
            variation=self._variation(),
            seed=self.seed,
        )
        self._store_front(pdga.run(task, order, params))
        return self


class Nsga2Solver(_FrontSolverMixin, BaseEstimator):
    """NSGA-II baseline solver over the monolithic encoding.

    Fitted attributes match :class:`PdgaSolver`.
    """

    def __init__(
        self,
        iterations: int = 200,
        pop_size: int = 50,
        eta_c: float = 0.1,
        eta_m: float = 0.01,
        pr_c: float = 1.0,
        pr_m: float = 1.0,
        seed: int = 0,
    ):
        self.iterations = iterations
        self.pop_size = pop_size
        self.eta_c = eta_c
        self.eta_m = eta_m
        self.pr_c = pr_c
        self.pr_m = pr_m
        self.seed = seed

    def fit(self, task: TaskSpec, order: Order) -> "Nsga2Solver":
        self._check_instance(task, order)
        self._store_front(
            nsga2.run_nsga2(
                task,
                order,
                iterations=self.iterations,
                pop_size=self.pop_size,
                variation=self._variation(),
                seed=self.seed,
            )
        )
        return self
