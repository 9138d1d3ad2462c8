"""Seeded random planning tasks for tests and the self-test sweep."""
from __future__ import annotations

import random

from .task_model import Action, make_task


def random_task(rng: random.Random, max_vars=8, max_actions=12, max_cost=5, min_vars=1):
    n = rng.randint(min_vars, max_vars)
    V = ["v%d" % i for i in range(n)]
    actions = []
    for i in range(rng.randint(1, max_actions)):
        pre = {v for v in V if rng.random() < 0.25}
        add = {v for v in V if rng.random() < 0.3}
        dele = {v for v in V if v not in add and rng.random() < 0.2}
        actions.append(Action("a%d" % i, frozenset(pre), frozenset(add), frozenset(dele), rng.randint(0, max_cost)))
    init = {v for v in V if rng.random() < 0.3}
    goal = {v for v in V if rng.random() < 0.3}
    outside = [v for v in V if v not in init]
    if goal <= init and outside and rng.random() < 0.8:
        goal.add(rng.choice(outside))
    return make_task(V, actions, init, goal)


def random_pattern(rng: random.Random, task, max_size=3):
    k = rng.randint(0, min(max_size, len(task.variables)))
    return sorted(rng.sample(list(task.variables), k))


def chain_task(n, cost=1):
    """Task whose optimal plan sets v1..vn in order; size grows linearly."""
    V = ["v%d" % i for i in range(n + 1)]
    acts = [Action("step%d" % i, frozenset([V[i]]), frozenset([V[i + 1]]), frozenset(), cost) for i in range(n)]
    acts += [Action("skip%d" % i, frozenset([V[i]]), frozenset([V[min(i + 2, n)]]), frozenset([V[i]]), 2 * cost + 1)
             for i in range(n)]
    return make_task(V, acts, [V[0]], [V[n]])


def unreachable_region_task():
    """Solvable task whose projection onto {a, c} has an abstract state (neither
    a nor c) from which the abstract goal is unreachable; that state is also
    a concrete dead end reachable from the initial state."""
    acts = [
        Action("make_a", frozenset(["c"]), frozenset(["a"]), frozenset(), 1),
        Action("burn", frozenset(["c"]), frozenset(), frozenset(["c"]), 1),
        Action("make_g", frozenset(["a"]), frozenset(["g"]), frozenset(), 2),
        Action("reset", frozenset(["a"]), frozenset(), frozenset(["a", "g"]), 0),
    ]
    return make_task(["a", "c", "g"], acts, ["c"], ["a", "g"])
