"""Shared builders for randomized test cases (all seeded, never flaky)."""

import json
import random

from simrt import (BasicPolicy, Policy, Task, TaskGraph, TaskTags,
                   load_profile)

WORKLOADS = ("alpha", "beta", "gamma")

ALL_POLICIES = (
    Policy.latency(),
    Policy.throughput(),
    Policy.energy(),
    Policy.advanced_over(BasicPolicy.LATENCY),
    Policy.advanced_over(BasicPolicy.THROUGHPUT),
    Policy.advanced_over(BasicPolicy.ENERGY),
)

_UNIT_POOLS = (
    ["CPU"], ["mGPU"], ["DSP"],
    ["CPU", "mGPU"], ["CPU", "DSP"], ["mGPU", "DSP"], ["GPU", "DSP"],
    ["CPU", "mGPU", "DSP"], ["CPU", "GPU", "DSP"],
)


def random_profile(rng: random.Random):
    """A profile with 1-3 local units, random weights, and full cost coverage."""
    kinds = rng.choice(_UNIT_POOLS)
    doc = {
        "name": "random",
        "units": [{"kind": k, "weight": rng.randint(1, 5)} for k in kinds],
        "workloads": [{"name": w} for w in WORKLOADS],
        "costs": {
            f"{w}@{k}": {
                "setup_us": rng.randint(0, 300),
                "xfer_in_us": rng.randint(0, 100),
                "kernel_us": rng.randint(1, 800),
                "xfer_out_us": rng.randint(0, 100),
                "energy_uj": rng.randint(1, 500),
            }
            for w in WORKLOADS
            for k in kinds
        },
        "cloud": {"latency_us": [1000, 9000], "energy_uj": 5},
    }
    return load_profile(json.dumps(doc))


def random_scenario(rng: random.Random, max_tasks: int = 20) -> TaskGraph:
    """A random DAG of tagged tasks with spread release times."""
    n = rng.randint(1, max_tasks)
    tasks = []
    for i in range(1, n + 1):
        deps = frozenset(d for d in range(1, i) if rng.random() < 0.2)
        tasks.append(Task(
            id=i,
            workload=rng.choice(WORKLOADS),
            tags=TaskTags(real_time=rng.random() < 0.8,
                          image_input=rng.random() < 0.3),
            deps=deps,
            release_us=rng.randint(0, 5000),
        ))
    return TaskGraph(tasks)
