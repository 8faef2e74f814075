"""Per-task error-budget defaults and their environment override."""

from __future__ import annotations

import json
import math
import os

__all__ = ["TASK_ETA_DEFAULTS", "ENV_TASK_DEFAULTS", "load_task_defaults", "resolve_task_eta"]

TASK_ETA_DEFAULTS: dict[str, float] = {
    "lift": 0.005,
    "can": 0.005,
    "square": 0.005,
    "cube-transfer": 0.01,
    "bimanual-insertion": 0.01,
    "screwdriver-handover": 0.01,
    "wiping-table": 0.01,
    "coffee-making": 0.008,
}

# points at a JSON file mapping task name -> eta, replacing the built-in table
ENV_TASK_DEFAULTS = "AWE_TASK_DEFAULTS"


def load_task_defaults() -> dict[str, float]:
    """The task -> eta table, honoring the AWE_TASK_DEFAULTS override."""
    path = os.environ.get(ENV_TASK_DEFAULTS)
    if not path:
        return dict(TASK_ETA_DEFAULTS)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: task defaults must be a JSON object of task -> eta")
    table = {}
    for task, eta in data.items():
        if not isinstance(eta, (int, float)) or isinstance(eta, bool):
            raise ValueError(f"{path}: eta for task {task!r} must be a number")
        eta = float(eta)
        if not (math.isfinite(eta) and eta > 0.0):
            raise ValueError(f"{path}: eta for task {task!r} must be > 0")
        table[str(task)] = eta
    return table


def resolve_task_eta(task: str) -> float:
    table = load_task_defaults()
    try:
        return table[task]
    except KeyError:
        known = ", ".join(sorted(table))
        raise ValueError(f"unknown task {task!r}; known tasks: {known}") from None
