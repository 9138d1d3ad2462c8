import random

import pytest

from certplan.certificate import Certificate, parse
from certplan.generators import random_pattern, random_task
from certplan.heuristic_hmax import HmaxHeuristic
from certplan.heuristic_pdb import PDBHeuristic
from certplan.mutations import MUTATIONS, mutate, run_battery
from certplan.search import astar_plan
from certplan.task_model import EXAMPLE_TASK, parse_task

TASK = parse_task(EXAMPLE_TASK)
CERT = astar_plan(TASK, HmaxHeuristic(TASK)).certificate


@pytest.mark.parametrize("kind", MUTATIONS)
def test_each_mutation_changes_the_certificate(kind):
    rng = random.Random(1)
    for _ in range(20):
        m = mutate(CERT, rng, kind)
        if m is None:
            continue
        if isinstance(m, str):
            try:
                m = parse(m)
            except Exception:
                continue
        assert isinstance(m, Certificate)
        assert m is not CERT
    assert CERT == astar_plan(TASK, HmaxHeuristic(TASK)).certificate


def test_bound_mutants_are_all_rejected():
    out = [o for o in run_battery(TASK, CERT, random.Random(2), 60, 3) if o.kind == "bound"]
    assert out and not any(o.accepted for o in out)


def test_battery_has_no_unsound_acceptances():
    rng = random.Random(12)
    total = 0
    while total < 150:
        t = random_task(rng, max_vars=5, max_actions=6)
        r = astar_plan(t, rng.choice([HmaxHeuristic(t), PDBHeuristic(t, random_pattern(rng, t), "naive"),
                                      PDBHeuristic(t, random_pattern(rng, t), "efficient")]))
        if not r.solvable:
            continue
        outcomes = run_battery(t, r.certificate, rng, 15, r.cost)
        total += len(outcomes)
        assert not any(o.unsound for o in outcomes)
        assert any(not o.accepted for o in outcomes)


def test_unknown_mutation():
    with pytest.raises(ValueError):
        mutate(CERT, random.Random(0), "nope")
