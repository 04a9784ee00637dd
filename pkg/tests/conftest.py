"""Shared fixtures and the acceptance-criteria reporting hook."""

import numpy as np
import pytest

from svccomp import CandidateService, Order, SubTask, TaskSpec, clothing_config_path
from svccomp.experiments import load_config

_criteria_results = []


@pytest.fixture(scope="session")
def record_criterion():
    """Collector for acceptance criteria; one summary line per criterion."""

    def _record(name: str, passed: bool, detail: str = "") -> bool:
        _criteria_results.append((name, passed, detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _criteria_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, passed, detail in _criteria_results:
        status = "PASS" if passed else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        terminalreporter.write_line(f"{name}: {status}{suffix}")


@pytest.fixture(scope="session")
def clothing_cfg():
    return load_config(str(clothing_config_path()))


@pytest.fixture(scope="session")
def clothing_task(clothing_cfg):
    return clothing_cfg.task


@pytest.fixture(scope="session")
def clothing_order(clothing_cfg):
    return clothing_cfg.order


def make_service(i, j, unit_time, unit_cost, max_uses=None):
    return CandidateService(
        id=f"s{i}-{j}", unit_time=unit_time, unit_cost=unit_cost, max_uses=max_uses
    )


def random_instance(rng: np.random.Generator, max_subtasks=3, max_services=3, max_quantity=6):
    """Small random feasible instance for oracle-backed property tests."""
    n_subtasks = int(rng.integers(1, max_subtasks + 1))
    quantity = int(rng.integers(1, max_quantity + 1))
    subtasks = []
    for i in range(n_subtasks):
        n_services = int(rng.integers(1, max_services + 1))
        services = [
            make_service(
                i,
                j,
                unit_time=float(np.round(rng.uniform(0.5, 10.0), 2)),
                unit_cost=float(np.round(rng.uniform(0.0, 10.0), 2)),
                max_uses=None
                if rng.random() < 0.5
                else int(rng.integers(max(1, quantity // 2), quantity + 2)),
            )
            for j in range(n_services)
        ]
        cap_sum = sum(
            quantity if s.max_uses is None else s.max_uses for s in services
        )
        if cap_sum < quantity:
            services.append(make_service(i, "x", unit_time=1.0, unit_cost=5.0))
        subtasks.append(SubTask(id=f"st{i}", services=tuple(services)))
    return TaskSpec(tuple(subtasks)), Order(id="o", product_type="p", quantity=quantity)
