import copy
import json
import os
import random

import pytest

from certplan.builder import state_lits
from certplan.certificate import parse, serialize
from certplan.generators import chain_task, random_task
from certplan.heuristic_hmax import HmaxHeuristic
from certplan.heuristic_pdb import PDBHeuristic
from certplan.pb_core import Rup, clause, neg, parse_constraint, pos
from certplan.search import OUTPUT, BlindHeuristic, Heuristic, ReopeningError, astar_plan, closed_var
from certplan.task_model import EXAMPLE_TASK, make_task, parse_task, validate_plan
from certplan.verifier import verify_lower_bound, verify_optimality

FROZEN = os.path.join(os.path.dirname(__file__), "frozen", "random_tasks.json")


def example():
    return parse_task(EXAMPLE_TASK)


class TableHeuristic(BlindHeuristic):
    """Returns fixed values; used to provoke reopening."""

    def __init__(self, fn):
        self.fn = fn

    def evaluate(self, s):
        return self.fn(s)


def test_example_with_hmax():
    t = example()
    r = astar_plan(t, HmaxHeuristic(t))
    assert r.solvable and r.plan == ["a1", "a2"] and r.cost == 3
    assert verify_optimality(t, r.plan, r.certificate)


@pytest.mark.parametrize("h", ["blind", "hmax", "pdb"])
def test_goal_in_init_gives_trivial_certificate(h):
    t = make_task(["p", "q"], [("a", [], ["q"], [], 2)], ["p"], ["p"])
    heur = {"blind": BlindHeuristic(), "hmax": HmaxHeuristic(t), "pdb": PDBHeuristic(t, ["p"])}[h]
    r = astar_plan(t, heur)
    assert r.plan == [] and r.cost == 0
    assert r.certificate.bound == 0
    assert verify_lower_bound(t, 0, r.certificate)


def test_empty_goal():
    t = make_task(["p"], [("a", [], ["p"], [], 1)], [], [])
    r = astar_plan(t, HmaxHeuristic(t))
    assert r.cost == 0 and verify_lower_bound(t, 0, r.certificate)


def test_unsolvable_has_no_certificate():
    t = make_task(["p", "q"], [("a", [], ["p"], [], 1)], [], ["q"])
    r = astar_plan(t, BlindHeuristic())
    assert not r.solvable and r.certificate is None and r.plan is None


def test_closed_reification_body():
    t = example()
    r = astar_plan(t, BlindHeuristic())
    bodies = {x.var: x.body for x in r.certificate.circuit}
    for i, (s, g) in enumerate(r.closed):
        body = bodies[closed_var(i)]
        assert body.degree == len(t.variables) + 1
        assert {l for _, l in body.terms} >= set(state_lits(t, s))
    # s = {p} reached with g = 1
    i = [k for k, (s, g) in enumerate(r.closed) if s == {"p"}][0]
    assert r.closed[i][1] == 1
    assert bodies[closed_var(i)] == parse_constraint("1 xv_p 1 ~xv_q 1 xge_1 >= 3")
    assert r.closed[0] == (t.init, 0)


def test_closed_count_matches_reifications():
    rng = random.Random(3)
    for _ in range(20):
        t = random_task(rng, max_vars=5, max_actions=7)
        r = astar_plan(t, HmaxHeuristic(t))
        if not r.solvable:
            continue
        heads = [x.var for x in r.certificate.circuit if x.var.startswith("xs_") and x.var != OUTPUT]
        assert len(heads) == len(r.closed)
        goal_state, g = r.closed[-1]
        assert t.is_goal(goal_state) and g == r.cost
        out = [x for x in r.certificate.circuit if x.var == OUTPUT][0]
        assert r.certificate.output == OUTPUT
        assert len(out.body.terms) == len(set(heads) | {v for v in out.body.vars() if v.startswith("xh_")})
        for l in r.certificate.decls.mm:
            assert l in r.certificate.decls.mm


def test_reopening_detected():
    # I -1-> X -1-> Y, I -3-> Y; a heuristic that is huge on X makes Y close first with g=3
    t = make_task(["i", "x", "y", "g"],
                  [("ax", ["i"], ["x"], ["i"], 1), ("ay", ["i"], ["y"], ["i"], 3),
                   ("xy", ["x"], ["y"], ["x"], 1), ("yg", ["y"], ["g"], [], 10)], ["i"], ["g"])
    with pytest.raises(ReopeningError):
        astar_plan(t, TableHeuristic(lambda s: 10 if "x" in s else 0))
    assert astar_plan(t, HmaxHeuristic(t)).cost == 12


def test_dead_ends_stay_open():
    t = make_task(["p", "q", "d"], [("die", [], ["d"], [], 0), ("a", [], ["p"], [], 1),
                                    ("b", ["p"], ["q"], [], 1), ("x", ["d"], [], ["p", "q"], 0)],
                  [], ["q"])
    h = TableHeuristic(lambda s: None if "d" in s else 0)
    r = astar_plan(t, h, certify=False)
    assert r.cost == 2 and r.stats.dead_ends >= 1
    assert any("d" in s for s in r.open_states)
    assert all("d" not in s for s, _ in r.closed)


def test_tie_breaking_is_deterministic():
    rng = random.Random(8)
    for _ in range(10):
        t = random_task(rng, max_vars=5)
        a = astar_plan(t, HmaxHeuristic(t))
        b = astar_plan(t, HmaxHeuristic(t))
        assert a.plan == b.plan and a.closed == b.closed
        if a.solvable:
            assert serialize(a.certificate) == serialize(b.certificate)


def test_frozen_costs_for_every_heuristic():
    with open(FROZEN) as f:
        rows = json.load(f)
    for row in rows:
        t = parse_task(row["task"])
        for h in (BlindHeuristic(), HmaxHeuristic(t), PDBHeuristic(t, row["pattern"], "efficient")):
            r = astar_plan(t, h)
            assert r.cost == row["optimal"]
            if r.solvable:
                assert validate_plan(t, r.plan) == r.cost
                assert verify_lower_bound(t, r.cost, r.certificate), row


def _without(cert, pred):
    c = copy.deepcopy(cert)
    c.circuit = [x for x in c.circuit if not pred(x)]
    return c


def test_dropping_initial_closed_reif_rejects():
    t = example()
    r = astar_plan(t, HmaxHeuristic(t))
    assert not verify_lower_bound(t, 3, _without(r.certificate, lambda x: x.var == closed_var(0)))


def _blank_heuristic_chain(task, cert, head):
    """Replace the inductivity lemma of head and its per-action lemmas by
    tautologies, keeping ids aligned."""
    c = copy.deepcopy(cert)
    ind = c.proofs["ind"]
    lemmas = {clause([neg(head), neg("xrT"), pos(head + "_p")])}
    lemmas |= {clause([neg(head), neg("xa_" + a.name), pos(head + "_p")]) for a in task.actions}
    hit = [i for i, st in enumerate(ind.steps) if isinstance(st, Rup) and st.claim in lemmas]
    for i in hit:
        ind.steps[i] = Rup(clause([pos("xrT"), neg("xrT")]))
    return c, len(hit)


def test_blanking_heuristic_inductivity_rejects():
    t = chain_task(4)
    r = astar_plan(t, HmaxHeuristic(t))
    assert r.open_states
    c, n = _blank_heuristic_chain(t, r.certificate, "xh_0_max")
    assert n == len(t.actions) + 1
    assert not verify_lower_bound(t, r.cost, c)


def test_goal_claim_with_smaller_bound_rejects():
    t = example()
    r = astar_plan(t, HmaxHeuristic(t))
    c = copy.deepcopy(r.certificate)
    c.bound = 4
    assert not verify_lower_bound(t, 4, c)


class ConstantHeuristic(Heuristic):
    pass


def test_interface_is_abstract():
    with pytest.raises(NotImplementedError):
        ConstantHeuristic().evaluate(frozenset())
